#pragma once

#include "mixeig/core.hpp"
#include "mixeig/grid.hpp"

#include <stdexcept>
#include <string>

namespace mixeig {

/// Raised when the initial value problem cannot be continued (step size underflow or a
/// non-finite right-hand side). location() is the x where integration stopped.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double location)
        : std::runtime_error(what), location_(location) {}
    double location() const noexcept { return location_; }

private:
    double location_;
};

/// Raised when the eigenvalue search cannot produce a trustworthy answer.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShootConfig {
    /// Relative local error tolerance of the Dormand-Prince 5(4) pair.
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    /// Number of eigenfunction samples (uniform on [0, T]).
    int samples = 4097;
    int max_iterations = 200;
    /// Target of |boundary functional| relative to the normalization.
    double residual_tol = 1e-10;
};

/// Terminal values of one shot.
struct ShotEnd {
    double g_end = 0.0;
    double w_end = 0.0;
    /// Sign changes of g (ND) or w (DN) along the accepted steps on (0, T].
    int sign_changes = 0;
    int steps = 0;
};

/// Integrates g' = sgn(w) (|w| / v)^(p*-1), w' = -lambda u |g|^(p-2) g over [0, T] with
/// g = 1, w = 0 (ND) or g = 0, w = 1 (DN) at x = 0.
ShotEnd shoot_once(const Problem& problem, double lambda, const ShootConfig& cfg = {});

struct ShootResult {
    double lambda = 0.0;
    /// Eigenfunction, its derivative, and the flux w = v |g'|^(p-2) g' on a uniform grid over [0, T].
    GridFunction g{{0.0, 1.0}, {0.0, 0.0}};
    GridFunction dg{{0.0, 1.0}, {0.0, 0.0}};
    GridFunction w{{0.0, 1.0}, {0.0, 0.0}};
    int iterations = 0;
    /// |g(T)| (ND) or |w(T)| (DN) at the returned lambda.
    double residual = 0.0;
    double truncation = 0.0;
    /// Final bracket of the search.
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;

    std::string describe() const;
};

/// Principal eigenvalue of the (truncated) problem by bisection on the first-crossing
/// predicate inside the basic-bound bracket, followed by Illinois refinement on the
/// boundary functional. Throws OracleFailure when no bracket is found or the accepted
/// eigenfunction violates the sign structure of a principal eigenfunction.
ShootResult solve_eigenvalue(const Problem& problem, const ShootConfig& cfg = {});

} // namespace mixeig
