#pragma once

#include "mixeig/core.hpp"
#include "mixeig/grid.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixeig {

/// Test-function classes. The tilde classes are the modified ones used for upper bounds.
enum class FunctionClass { F_I, F_II, H, Ftilde_I, Ftilde_II, Htilde };

struct ClassTag {
    FunctionClass which = FunctionClass::F_I;
    Boundary boundary = Boundary::ND;
};

std::string to_string(FunctionClass c);
FunctionClass parse_function_class(std::string_view text);

/// Outcome of a membership check at grid resolution.
struct ClassReport {
    bool ok = true;
    std::vector<std::string> violations;
    /// Support of the test function found by the check: x0 and x1 for the ND modified classes
    /// (x0 = 0 when there is no constant head), x0 alone for the others.
    double x0 = 0.0;
    double x1 = 0.0;

    std::string describe() const;
};

/// Thrown by bound_from_test_function when the test function is not in its class.
class ClassViolation : public std::invalid_argument {
public:
    explicit ClassViolation(ClassReport report);
    const ClassReport& report() const noexcept { return report_; }

private:
    ClassReport report_;
};

/// Checks signs, monotonicity and boundary values of f on its grid nodes against the class.
/// The grid must span [0, T] of the problem and carry at least 64 nodes.
ClassReport validate_class(const Problem& problem, const GridFunction& f, ClassTag tag);

/// |s|^(p-2) s with phi_p(0) = 0.
double phi_p(double s, double p);

/// Operators I and II of a piecewise-linear test function.
///
/// The inner integral A (of f^(p-1) du from the Neumann end) is tabulated at the nodes once;
/// the outer integral B of II (of v_hat A^(p*-1) toward the Dirichlet end, over supp f) is
/// tabulated on first use. Off-node values add a partial-segment integral.
class OperatorEvaluator {
public:
    OperatorEvaluator(const Problem& problem, GridFunction f);

    const Problem& problem() const noexcept { return problem_; }
    const GridFunction& function() const noexcept { return f_; }

    /// Inner integral: int_0^x f^(p-1) du (ND) or int_x^T f^(p-1) du (DN).
    double inner(double x) const;
    /// Outer integral of II: int over (x, T) (ND) or (0, x) (DN), restricted to supp f.
    double outer(double x) const;

    /// Single integral form with f' the slope of the active segment (the right one at nodes);
    /// +inf where f' = 0. Requires 0 < x < T.
    double I(double x) const;
    /// Double integral form; +inf where f(x) = 0. Requires 0 < x < T.
    double II(double x) const;

private:
    void build_outer() const;
    double inner_partial(std::size_t seg, double a, double b) const;
    double outer_partial(std::size_t seg, double a, double b) const;
    bool in_support(std::size_t seg) const;
    void check_point(double x, const char* what) const;

    Problem problem_;
    GridFunction f_;
    bool nd_;
    std::vector<double> inner_nodes_;
    mutable std::once_flag outer_once_;
    mutable std::vector<double> outer_nodes_;
};

double op_I(const Problem& problem, const GridFunction& f, double x);
double op_II(const Problem& problem, const GridFunction& f, double x);

/// Differential form u^-1 [-|h|^(p-2) (v' h + (p-1)(h^2 + h') v)] with h' from
/// GridFunction::derivative (interpolated three-point nodal estimates).
/// At h = 0: 0 when the bracket vanishes or p > 2, the bracket itself at p = 2, and a signed
/// infinity for p < 2. Throws std::domain_error where u(x) = 0.
double op_R(const Problem& problem, const GridFunction& h, double x);

enum class Direction { Lower, Upper };
std::string to_string(Direction d);

/// A bound on lambda_p produced by one test function.
struct DirectedBound {
    double value = 0.0;
    Direction direction = Direction::Lower;
    /// Extremal operator value and where it was found.
    double operator_extremum = 0.0;
    double at = 0.0;
};

/// Search window for the extremum over x; defaults to the relevant part of (0, T).
struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Unmodified classes give Lower = 1 / sup I or II (inf R for H); modified classes give
/// Upper = 1 / inf I or II over the support (sup R for H-tilde). Throws ClassViolation.
DirectedBound bound_from_test_function(const Problem& problem, const GridFunction& f, ClassTag tag,
                                       std::optional<Window> window = std::nullopt);

} // namespace mixeig
