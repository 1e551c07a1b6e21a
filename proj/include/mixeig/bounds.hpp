#pragma once

#include "mixeig/core.hpp"
#include "mixeig/search.hpp"

#include <string>
#include <utility>

namespace mixeig {

/// Explicit estimates of the principal eigenvalue lambda_p.
///
/// Lower bounds: basic_lower, 1 / delta1. Upper bounds: basic_upper, 1 / delta1_prime,
/// 1 / bar_delta1. When sigma_p is infinite every bound is zero and the delta fields are +inf.
struct BoundsReport {
    double p = 0.0;
    Boundary boundary = Boundary::ND;
    double truncation = 0.0;
    double sigma_p = 0.0;
    double sigma_argmax = 0.0;
    double basic_lower = 0.0;
    double basic_upper = 0.0;
    double delta1 = 0.0;
    double delta1_prime = 0.0;
    double bar_delta1 = 0.0;
    double lower_best = 0.0;
    double upper_best = 0.0;
    bool positivity = false;

    std::string describe() const;
};

/// sup over (0, T) of mu(Neumann side) * nu_hat(Dirichlet side)^(p-1) for the truncated problem.
Extremum sigma_p_truncated(const Problem& problem);

/// sigma_p, +inf when the controlling total diverges or, for D = inf, when the product keeps
/// growing beyond the truncation under the quadrature divergence rule.
double sigma_p(const Problem& problem);

/// ((k(p) sigma)^-1, sigma^-1), or (0, 0) when sigma is infinite.
std::pair<double, double> basic_bounds(double sigma, const Exponent& exponent);
std::pair<double, double> basic_bounds(const Problem& problem);

/// First-step improved estimates. Each is +inf when sigma_p is infinite.
double delta1(const Problem& problem);
double delta1_prime(const Problem& problem);
double bar_delta1(const Problem& problem);

/// Everything above in one pass, sharing the auxiliary tables.
BoundsReport compute_bounds(const Problem& problem);

} // namespace mixeig
