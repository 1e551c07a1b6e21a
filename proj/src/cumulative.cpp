#include "mixeig/cumulative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mixeig {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Relative error accepted when adaptive refinement stalls on roundoff.
constexpr double kStalledRelTol = 1e-6;
/// Intervals shorter than this many ulps of their position are below the resolution of x.
constexpr double kResolvableUlps = 67108864.0;

double cell_integral(const RealFunction& f, double a, double b, const QuadConfig& cfg) {
    try {
        return integrate(f, a, b, cfg);
    } catch (const ConvergenceError& e) {
        if (std::isfinite(e.estimate()) && e.error_bound() <= std::max(cfg.abs_tol, kStalledRelTol * std::abs(e.estimate())))
            return e.estimate();
        const double scale = std::max(std::abs(a), std::abs(b));
        if (std::isfinite(e.estimate()) && b - a <= kResolvableUlps * std::numeric_limits<double>::epsilon() * scale)
            return e.estimate();
        std::ostringstream msg;
        msg << "integrand is not integrable on [" << a << ", " << b << "]: " << e.what();
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

CumulativeTable::CumulativeTable(std::vector<double> grid, RealFunction f, const QuadConfig& cfg)
    : grid_(std::move(grid)), f_(std::move(f)), cfg_(cfg) {
    if (grid_.size() < 2) throw std::invalid_argument("CumulativeTable: grid needs at least two nodes");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("CumulativeTable: grid must be strictly increasing");

    QuadConfig cell_cfg = cfg_;
    cell_cfg.abs_tol = cfg_.abs_tol * 1e-6;
    const std::size_t cells = grid_.size() - 1;
    cell_.resize(cells);
    smooth_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = grid_[i];
        const double b = grid_[i + 1];
        const double value = cell_integral(f_, a, b, cell_cfg);
        if (!std::isfinite(value) || value < 0.0) {
            std::ostringstream msg;
            msg << "integrand is not locally integrable (or negative) on [" << a << ", " << b << "]";
            throw std::invalid_argument(msg.str());
        }
        cell_[i] = value;
        const double tol = std::max(cell_cfg.abs_tol, cfg_.rel_tol * std::abs(value));
        const double mid = 0.5 * (a + b);
        const double whole = integrate_fixed(f_, a, b, 8);
        const double halves = integrate_fixed(f_, a, mid, 8) + integrate_fixed(f_, mid, b, 8);
        smooth_[i] = std::abs(whole - value) <= tol && std::abs(halves - value) <= tol ? 1 : 0;
    }

    left_.assign(grid_.size(), 0.0);
    right_.assign(grid_.size(), 0.0);
    CompensatedSum acc;
    for (std::size_t i = 0; i < cells; ++i) {
        acc.add(cell_[i]);
        left_[i + 1] = acc.value();
    }
    CompensatedSum back;
    for (std::size_t i = cells; i-- > 0;) {
        back.add(cell_[i]);
        right_[i] = back.value();
    }
}

std::size_t CumulativeTable::cell_of(double x) const {
    if (x < grid_.front() || x > grid_.back() || std::isnan(x)) {
        std::ostringstream msg;
        msg << "CumulativeTable: query " << x << " outside [" << grid_.front() << ", " << grid_.back() << "]";
        throw std::domain_error(msg.str());
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    if (i == 0) return 0;
    i -= 1;
    return std::min(i, grid_.size() - 2);
}

double CumulativeTable::partial(std::size_t cell, double a, double b) const {
    if (a >= b) return 0.0;
    if (a == grid_[cell] && b == grid_[cell + 1]) return cell_[cell];
    if (smooth_[cell]) return integrate_fixed(f_, a, b, 8);
    QuadConfig c = cfg_;
    c.abs_tol = cfg_.abs_tol * 1e-6;
    return cell_integral(f_, a, b, c);
}

double CumulativeTable::from_left(double x) const {
    const std::size_t i = cell_of(x);
    if (x == grid_[i]) return left_[i];
    return left_[i] + partial(i, grid_[i], x);
}

double CumulativeTable::from_right(double x) const {
    const std::size_t i = cell_of(x);
    if (x == grid_[i + 1]) return right_[i + 1];
    return right_[i + 1] + partial(i, x, grid_[i + 1]);
}

double CumulativeTable::between(double a, double b) const {
    if (a > b) throw std::invalid_argument("CumulativeTable::between: a > b");
    if (a == b) return 0.0;
    const std::size_t ia = cell_of(a);
    const std::size_t ib = cell_of(b);
    if (ia == ib) return partial(ia, a, b);
    // Difference of the cumulative whose operands are smaller.
    const double lb = from_left(b);
    const double ra = from_right(a);
    if (lb <= ra) return std::max(0.0, lb - from_left(a));
    return std::max(0.0, ra - from_right(b));
}

std::size_t CumulativeTable::smooth_cells() const noexcept {
    return static_cast<std::size_t>(std::count(smooth_.begin(), smooth_.end(), 1));
}

} // namespace mixeig
