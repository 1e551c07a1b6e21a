#include "mixeig/exact.hpp"

#include "mixeig/core.hpp"

#include <cmath>
#include <numbers>

namespace mixeig {

ExactValue exact_values(double p) {
    const double p_star = conjugate(p);
    ExactValue e;
    e.p = p;
    e.lambda_root = std::numbers::pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(std::numbers::pi / p));
    e.sigma_root = std::pow(1.0 / p, 1.0 / p) * std::pow(1.0 / p_star, 1.0 / p_star);
    e.bar_delta1_root = std::pow(p, 1.0 / p - 2.0) * std::pow(p * p - 1.0, 1.0 - 1.0 / p);
    return e;
}

double exact_lambda(double p) { return std::pow(exact_values(p).lambda_root, p); }

double exact_sigma(double p) { return std::pow(exact_values(p).sigma_root, p); }

double exact_bar_delta1(double p) { return std::pow(exact_values(p).bar_delta1_root, p); }

} // namespace mixeig
