#include "mixeig/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace mixeig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Direction-aware access to the tables of a truncated problem.
class Sides {
public:
    explicit Sides(const Problem& problem)
        : problem_(problem), nd_(problem.boundary() == Boundary::ND), T_(problem.truncation()) {}

    double mass(double x) const { return problem_.mu_neumann(x); }
    double dual(double x) const { return problem_.nu_hat_dirichlet(x); }

    double neumann(const CumulativeTable& t, double x) const { return nd_ ? t.from_left(x) : t.from_right(x); }
    double dirichlet(const CumulativeTable& t, double x) const { return nd_ ? t.from_right(x) : t.from_left(x); }
    /// Integral of t between x and s, whichever way round they are.
    double span(const CumulativeTable& t, double x, double s) const { return x <= s ? t.between(x, s) : t.between(s, x); }

    /// Integral of g from x to the Dirichlet end.
    double toward_dirichlet(const RealFunction& g, double x) const {
        return nd_ ? integrate(g, x, T_, problem_.quad()) : integrate(g, 0.0, x, problem_.quad());
    }

    CumulativeTable table(RealFunction f) const { return CumulativeTable(problem_.master_grid(), std::move(f), problem_.quad()); }

    const Problem& problem() const { return problem_; }
    double T() const { return T_; }

private:
    const Problem& problem_;
    bool nd_;
    double T_;
};

Extremum sup_over_interior(const std::function<double(double)>& f, double T) {
    return maximize_over(f, candidate_points(0.0, T), 0.0, T);
}

double product_beyond(const Problem& problem, double x) {
    const double p = problem.p();
    if (problem.boundary() == Boundary::ND) return problem.mu(0.0, x) * std::pow(problem.nu_hat(x, kInf), p - 1.0);
    return problem.mu(x, kInf) * std::pow(problem.nu_hat(0.0, x), p - 1.0);
}

bool grows_beyond_truncation(const Problem& problem) {
    if (!problem.infinite_domain()) return false;
    const QuadConfig& cfg = problem.quad();
    double x = problem.truncation();
    double prev = product_beyond(problem, x);
    int streak = 0;
    for (int k = 0; k < 4 * cfg.divergence_streak && streak < cfg.divergence_streak; ++k) {
        x *= 2.0;
        const double next = product_beyond(problem, x);
        if (!std::isfinite(next)) return true;
        streak = (prev > 0.0 && next > cfg.divergence_factor * prev) ? streak + 1 : 0;
        prev = next;
    }
    return streak >= cfg.divergence_streak;
}

double delta1_on(const Sides& sides) {
    const Problem& pr = sides.problem();
    const double p = pr.p(), ps = pr.p_star();
    auto inner = std::make_shared<CumulativeTable>(sides.table([&sides, &pr, p, ps](double t) {
        return std::pow(sides.dual(t), (p - 1.0) / ps) * pr.u_at(t);
    }));
    CumulativeTable outer = sides.table([&sides, &pr, inner, ps](double s) {
        const double F = sides.neumann(*inner, s);
        return F > 0.0 ? pr.v_hat(s) * std::pow(F, ps - 1.0) : 0.0;
    });
    auto value = [&](double x) {
        const double dual = sides.dual(x);
        if (!(dual > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::pow(std::pow(dual, -1.0 / ps) * sides.dirichlet(outer, x), p - 1.0);
    };
    return sup_over_interior(value, sides.T()).value;
}

double delta1_prime_on(const Sides& sides) {
    const Problem& pr = sides.problem();
    const double p = pr.p(), ps = pr.p_star();
    CumulativeTable K = sides.table([&sides, &pr, p](double t) { return std::pow(sides.dual(t), p - 1.0) * pr.u_at(t); });
    auto value = [&](double x) {
        const double dual = sides.dual(x);
        if (!(dual > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double c = sides.mass(x) * std::pow(dual, p - 1.0);
        RealFunction g = [&](double s) {
            const double inner = c + sides.span(K, x, s);
            return inner > 0.0 ? pr.v_hat(s) * std::pow(inner, ps - 1.0) : 0.0;
        };
        return std::pow(dual, 1.0 - p) * std::pow(sides.toward_dirichlet(g, x), p - 1.0);
    };
    return sup_over_interior(value, sides.T()).value;
}

double bar_delta1_on(const Sides& sides) {
    const Problem& pr = sides.problem();
    const double p = pr.p();
    CumulativeTable J = sides.table([&sides, &pr, p](double t) { return std::pow(sides.dual(t), p) * pr.u_at(t); });
    auto value = [&](double x) {
        const double dual = sides.dual(x);
        if (!(dual > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return sides.mass(x) * std::pow(dual, p - 1.0) + sides.dirichlet(J, x) / dual;
    };
    return sup_over_interior(value, sides.T()).value;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

Extremum sigma_p_truncated(const Problem& problem) {
    const Sides sides(problem);
    const double p = problem.p();
    return sup_over_interior([&](double x) { return sides.mass(x) * std::pow(sides.dual(x), p - 1.0); }, problem.truncation());
}

double sigma_p(const Problem& problem) {
    if (problem.degenerate() || grows_beyond_truncation(problem)) return kInf;
    return sigma_p_truncated(problem).value;
}

std::pair<double, double> basic_bounds(double sigma, const Exponent& exponent) {
    if (!std::isfinite(sigma)) return {0.0, 0.0};
    return {1.0 / (exponent.k_p() * sigma), 1.0 / sigma};
}

std::pair<double, double> basic_bounds(const Problem& problem) { return basic_bounds(sigma_p(problem), problem.exponent()); }

double delta1(const Problem& problem) { return std::isfinite(sigma_p(problem)) ? delta1_on(Sides(problem)) : kInf; }

double delta1_prime(const Problem& problem) {
    return std::isfinite(sigma_p(problem)) ? delta1_prime_on(Sides(problem)) : kInf;
}

double bar_delta1(const Problem& problem) { return std::isfinite(sigma_p(problem)) ? bar_delta1_on(Sides(problem)) : kInf; }

BoundsReport compute_bounds(const Problem& problem) {
    BoundsReport r;
    r.p = problem.p();
    r.boundary = problem.boundary();
    r.truncation = problem.truncation();
    if (problem.degenerate() || grows_beyond_truncation(problem)) {
        r.sigma_p = kInf;
        r.sigma_argmax = std::numeric_limits<double>::quiet_NaN();
        r.delta1 = r.delta1_prime = r.bar_delta1 = kInf;
        return r;
    }
    const Extremum s = sigma_p_truncated(problem);
    r.sigma_p = s.value;
    r.sigma_argmax = s.x;
    r.positivity = true;
    std::tie(r.basic_lower, r.basic_upper) = basic_bounds(s.value, problem.exponent());
    const Sides sides(problem);
    r.delta1 = delta1_on(sides);
    r.delta1_prime = delta1_prime_on(sides);
    r.bar_delta1 = bar_delta1_on(sides);
    r.lower_best = std::max(r.basic_lower, 1.0 / r.delta1);
    r.upper_best = std::min({r.basic_upper, 1.0 / r.delta1_prime, 1.0 / r.bar_delta1});
    return r;
}

std::string BoundsReport::describe() const {
    std::ostringstream os;
    os << "case " << to_string(boundary) << ", p = " << fmt(p) << ", truncation T = " << fmt(truncation) << "\n";
    os << "sigma_p        = " << fmt(sigma_p);
    if (positivity) os << "  (attained near x = " << fmt(sigma_argmax) << ")";
    os << "\n";
    os << "positivity     = " << (positivity ? "lambda_p > 0" : "lambda_p = 0") << "\n";
    os << "basic bounds   = [" << fmt(basic_lower) << ", " << fmt(basic_upper) << "]\n";
    os << "delta1         = " << fmt(delta1) << "  (lower bound " << fmt(positivity ? 1.0 / delta1 : 0.0) << ")\n";
    os << "delta1_prime   = " << fmt(delta1_prime) << "  (upper bound " << fmt(positivity ? 1.0 / delta1_prime : 0.0) << ")\n";
    os << "bar_delta1     = " << fmt(bar_delta1) << "  (upper bound " << fmt(positivity ? 1.0 / bar_delta1 : 0.0) << ")\n";
    os << "best bracket   = [" << fmt(lower_best) << ", " << fmt(upper_best) << "]\n";
    return os.str();
}

} // namespace mixeig
