#include "mixeig/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mixeig {

std::vector<double> clustered_grid(double T, int cells, int grading) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("clustered_grid: T must be finite and positive");
    if (cells < 2) throw std::invalid_argument("clustered_grid: need at least two cells");
    if (grading < 0) throw std::invalid_argument("clustered_grid: grading must be nonnegative");
    std::vector<double> x;
    x.reserve(cells + 1 + 2 * grading);
    x.push_back(0.0);
    const double first = 0.5 * T * (1.0 - std::cos(M_PI / cells));
    for (int j = grading; j >= 1; --j) x.push_back(std::ldexp(first, -j));
    for (int i = 1; i < cells; ++i) {
        // Symmetric form: distance to the nearer end is computed directly.
        const double s = std::sin(0.5 * M_PI * i / cells);
        const double near = T * s * s;
        x.push_back(2 * i <= cells ? near : T - T * std::pow(std::sin(0.5 * M_PI * (cells - i) / cells), 2));
    }
    const double last_gap = x.back() > 0 ? T - x.back() : first;
    // Points near T only resolve distances down to eps * T, so the right-end levels stop earlier.
    const double min_gap = std::ldexp(std::numeric_limits<double>::epsilon(), 26) * T;
    for (int j = 1; j <= grading && std::ldexp(last_gap, -j) >= min_gap; ++j) x.push_back(T - std::ldexp(last_gap, -j));
    x.push_back(T);
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    return x;
}

std::vector<double> uniform_grid(double T, int n) {
    if (n < 2) throw std::invalid_argument("uniform_grid: need at least two nodes");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = T * static_cast<double>(i) / (n - 1);
    x.back() = T;
    return x;
}

std::vector<double> with_node(std::vector<double> grid, double x) {
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it != grid.end() && *it == x) return grid;
    grid.insert(it, x);
    return grid;
}

GridFunction::GridFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2) throw std::invalid_argument("GridFunction: need at least two nodes");
    if (grid_.size() != values_.size()) throw std::invalid_argument("GridFunction: grid/value length mismatch");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1])) throw std::invalid_argument("GridFunction: grid must be strictly increasing");
}

GridFunction GridFunction::sample(const std::function<double(double)>& f, std::vector<double> grid) {
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), f);
    return GridFunction(std::move(grid), std::move(values));
}

std::size_t GridFunction::segment_of(double x) const {
    if (!(x >= grid_.front() && x <= grid_.back())) {
        std::ostringstream msg;
        msg << "GridFunction: x = " << x << " outside [" << grid_.front() << ", " << grid_.back() << "]";
        throw std::domain_error(msg.str());
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, grid_.size() - 2);
}

double GridFunction::segment_slope(std::size_t i) const {
    return (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
}

double GridFunction::operator()(double x) const {
    const std::size_t i = segment_of(x);
    if (x == grid_[i]) return values_[i];
    if (x == grid_[i + 1]) return values_[i + 1];
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double GridFunction::slope(double x) const { return segment_slope(segment_of(x)); }

double GridFunction::node_derivative(std::size_t i) const {
    const std::size_t n = grid_.size();
    if (n == 2) return segment_slope(0);
    if (i == 0 || i == n - 1) {
        // One-sided three-point formula at the ends.
        const bool left = i == 0;
        const std::size_t a = left ? 0 : n - 1, b = left ? 1 : n - 2, c = left ? 2 : n - 3;
        const double d1 = grid_[b] - grid_[a];
        const double d2 = grid_[c] - grid_[b];
        return -(2.0 * d1 + d2) / (d1 * (d1 + d2)) * values_[a] + (d1 + d2) / (d1 * d2) * values_[b] -
               d1 / (d2 * (d1 + d2)) * values_[c];
    }
    const double dl = grid_[i] - grid_[i - 1];
    const double dr = grid_[i + 1] - grid_[i];
    return (segment_slope(i - 1) * dr + segment_slope(i) * dl) / (dl + dr);
}

double GridFunction::derivative(double x) const {
    const std::size_t i = segment_of(x);
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return (1.0 - t) * node_derivative(i) + t * node_derivative(i + 1);
}

} // namespace mixeig
