#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixeig {

/// Tolerances for the adaptive quadrature engine.
struct QuadConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 60;
    /// Window-doubling ratio above which an improper integral is considered growing.
    double divergence_factor = 1.01;
    /// Number of consecutive growing doublings that produce a +inf verdict.
    int divergence_streak = 8;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Thrown when adaptive bisection exhausts its depth or panel budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

using RealFunction = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// The integrand is first pulled through the endpoint-clustering map
/// x = a + (b - a)(3t^2 - 2t^3), which turns algebraic endpoint singularities
/// (x - a)^alpha into the milder t^(2 alpha + 1). Nodes are strictly interior,
/// so f is never evaluated at a or b.
QuadResult integrate_detailed(const RealFunction& f, double a, double b, const QuadConfig& cfg = {});

/// Value-only form of integrate_detailed. Requires a <= b.
double integrate(const RealFunction& f, double a, double b, const QuadConfig& cfg = {});

/// Integral of f over [a, inf). Returns +inf when the window-doubling test of
/// QuadConfig declares divergence; otherwise integrates after x = a + t/(1-t).
double integrate_to_infinity(const RealFunction& f, double a, const QuadConfig& cfg = {});

/// n-point Gauss-Legendre rule on [-1, 1], ascending nodes.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule; 1 <= n <= 64.
const GaussRule& gauss_legendre(int n);

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_fixed(F&& f, double a, double b, int order = 8) {
    const GaussRule& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

} // namespace mixeig
