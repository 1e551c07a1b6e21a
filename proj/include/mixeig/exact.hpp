#pragma once

namespace mixeig {

/// Closed-form quantities for u = v = 1 on (0, 1), Neumann at 0 and Dirichlet at 1.
/// Each *_root value is the p-th root of the corresponding quantity. All throw
/// std::domain_error for p <= 1.
struct ExactValue {
    double p = 0.0;
    double lambda_root = 0.0;
    double sigma_root = 0.0;
    double bar_delta1_root = 0.0;
};

ExactValue exact_values(double p);

/// [pi (p - 1)^(1/p) / (p sin(pi / p))]^p
double exact_lambda(double p);
/// (1/p) (1/p*)^(p-1)
double exact_sigma(double p);
/// [p^(1/p - 2) (p^2 - 1)^(1 - 1/p)]^p
double exact_bar_delta1(double p);

} // namespace mixeig
