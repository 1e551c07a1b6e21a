#pragma once

#include <cmath>
#include <functional>

/// Independent reference computations for the tests.
namespace oracle {

/// Composite midpoint rule with n cells, accumulated in long double.
inline double midpoint(const std::function<double(double)>& f, double a, double b, long n) {
    const long double h = (static_cast<long double>(b) - a) / n;
    long double s = 0.0L;
    for (long i = 0; i < n; ++i) s += f(static_cast<double>(a + (i + 0.5L) * h));
    return static_cast<double>(s * h);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// pi (p - 1)^(1/p) / (p sin(pi / p)), raised to p.
inline double lambda_unit(double p) { return std::pow(M_PI * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(M_PI / p)), p); }

/// (1/p)^(1/p) (1/p*)^(1/p*), raised to p.
inline double sigma_unit(double p) {
    const double ps = p / (p - 1.0);
    return std::pow(std::pow(1.0 / p, 1.0 / p) * std::pow(1.0 / ps, 1.0 / ps), p);
}

/// p^(1/p - 2) (p^2 - 1)^(1 - 1/p), raised to p.
inline double bar_delta1_unit(double p) { return std::pow(std::pow(p, 1.0 / p - 2.0) * std::pow(p * p - 1.0, 1.0 - 1.0 / p), p); }

} // namespace oracle
