#pragma once

#include "mixeig/cumulative.hpp"
#include "mixeig/expression.hpp"
#include "mixeig/quad.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixeig {

/// Conjugate exponent p / (p - 1). Throws std::domain_error for p <= 1.
double conjugate(double p);

/// The exponent p together with its conjugate p* and k(p) = p * p*^(p-1).
class Exponent {
public:
    explicit Exponent(double p);

    double p() const noexcept { return p_; }
    double p_star() const noexcept { return p_star_; }
    double k_p() const noexcept { return k_p_; }

private:
    double p_;
    double p_star_;
    double k_p_;
};

/// Left/right boundary codes: ND is Neumann at 0 and Dirichlet at D; DN the mirror.
enum class Boundary { ND, DN };

std::string to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// A positive weight function on (0, D).
class WeightFn {
public:
    enum class Kind { Constant, Exponential, Power, Expression };

    /// c
    static WeightFn constant(double c);
    /// scale * exp(rate * x)
    static WeightFn exponential(double rate, double scale = 1.0);
    /// scale * x^exponent
    static WeightFn power(double exponent, double scale = 1.0);
    static WeightFn expression(std::string_view text);

    /// Accepts "const:C", "exp:RATE", "pow:EXPONENT", a bare number (constant),
    /// or an arithmetic expression in x.
    static WeightFn parse(std::string_view spec);

    double operator()(double x) const;
    /// Analytic for built-ins, centered difference with step 1e-6 (1 + |x|) otherwise.
    double derivative(double x) const;
    bool has_analytic_derivative() const noexcept { return kind_ != Kind::Expression; }

    Kind kind() const noexcept { return kind_; }
    const std::vector<double>& parameters() const noexcept { return params_; }
    /// True for the built-in constant weight equal to c.
    bool is_constant(double c) const noexcept;
    std::string describe() const;

private:
    WeightFn(Kind kind, std::vector<double> params, std::shared_ptr<const Expression> expr = nullptr);

    Kind kind_;
    std::vector<double> params_;
    std::shared_ptr<const Expression> expr_;
};

/// Everything needed to build a Problem. D may be +infinity.
struct ProblemSpec {
    WeightFn u = WeightFn::constant(1.0);
    WeightFn v = WeightFn::constant(1.0);
    double D = 1.0;
    double p = 2.0;
    Boundary boundary = Boundary::ND;
    /// Effective right endpoint for D = inf; chosen from tail_tol when absent.
    std::optional<double> truncation;
    /// Neglected tail of nu_hat (ND) or mu (DN), relative to the total, when picking the truncation.
    double tail_tol = 1e-10;
    /// Cells of the master grid carrying the cumulative tables.
    int table_cells = 1024;
    QuadConfig quad;
};

/// Truncation used when D = inf and the controlling total diverges, so no tail rule applies.
inline constexpr double kFallbackTruncation = 64.0;

/// An immutable eigenvalue problem: weights u and v on (0, D), exponent and boundary case.
///
/// mu(dx) = u(x) dx and nu_hat(dx) = v(x)^(1 - p*) dx. Cumulative tables of both
/// measures over the master grid on [0, T] are built once at construction, where T is
/// the truncation. Copies share the tables.
class Problem {
public:
    explicit Problem(ProblemSpec spec);

    const WeightFn& u() const noexcept { return spec_.u; }
    const WeightFn& v() const noexcept { return spec_.v; }
    double D() const noexcept { return spec_.D; }
    bool infinite_domain() const noexcept { return !std::isfinite(spec_.D); }
    const Exponent& exponent() const noexcept { return exponent_; }
    double p() const noexcept { return exponent_.p(); }
    double p_star() const noexcept { return exponent_.p_star(); }
    Boundary boundary() const noexcept { return spec_.boundary; }
    double truncation() const noexcept { return truncation_; }
    const QuadConfig& quad() const noexcept { return spec_.quad; }
    const ProblemSpec& spec() const noexcept { return spec_; }

    double u_at(double x) const { return spec_.u(x); }
    double v_at(double x) const { return spec_.v(x); }
    double v_hat(double x) const;

    /// mu over [a, b] for 0 <= a <= b <= D; b may be +inf. +inf on divergence.
    double mu(double a, double b) const;
    /// nu_hat over [a, b] for 0 <= a <= b <= D; b may be +inf. +inf on divergence.
    double nu_hat(double a, double b) const;
    /// Totals over (0, D), +inf when divergent.
    double mu_total() const noexcept { return mu_total_; }
    double nu_hat_total() const noexcept { return nu_hat_total_; }

    /// lambda_p = 0 by the positivity criterion: nu_hat(0, D) = inf (ND) or mu(0, D) = inf (DN).
    bool degenerate() const noexcept;

    /// mu on the Neumann side of x inside [0, T]: mu(0, x) for ND, mu(x, T) for DN.
    double mu_neumann(double x) const;
    /// nu_hat on the Dirichlet side of x inside [0, T]: nu_hat(x, T) for ND, nu_hat(0, x) for DN.
    double nu_hat_dirichlet(double x) const;

    const std::vector<double>& master_grid() const noexcept { return tables_->grid; }
    const CumulativeTable& mu_table() const noexcept { return tables_->mu; }
    const CumulativeTable& nu_hat_table() const noexcept { return tables_->nu_hat; }

    /// Copy of this problem with a different exponent (tables rebuilt).
    Problem with_p(double p) const;
    /// Copy with an explicit truncation (tables rebuilt).
    Problem with_truncation(double T) const;

    std::string describe() const;

private:
    struct Tables {
        std::vector<double> grid;
        CumulativeTable mu;
        CumulativeTable nu_hat;
    };

    void check_interval(double a, double b, const char* what) const;

    ProblemSpec spec_;
    Exponent exponent_;
    double truncation_ = 0.0;
    double mu_total_ = 0.0;
    double nu_hat_total_ = 0.0;
    std::shared_ptr<const Tables> tables_;
};

} // namespace mixeig
