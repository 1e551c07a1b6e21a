#pragma once

#include "mixeig/core.hpp"
#include "mixeig/grid.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixeig {

/// Raised when an iteration cannot proceed (lambda_p = 0, or a non-finite operator value).
class IterationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IterateConfig {
    /// Cells of the quadrature mesh; each carries `order` Gauss points.
    int cells = 512;
    int order = 8;
    /// Early stop of iterate_lower once |delta_{n+1} - delta_n| <= stop_rel * delta_n.
    double stop_rel = 1e-8;

    void validate() const;
};

/// Result of the descending iteration.
struct IterationState {
    int n = 0;
    /// Last iterate on the mesh nodes, normalized to 1 at the Neumann end.
    GridFunction f_n{{0.0, 1.0}, {1.0, 1.0}};
    double delta_n = 0.0;
    std::vector<std::pair<int, double>> history;

    std::string describe() const;
};

/// delta_n = sup over (0, T) of II(f_n), f_1 = nu_hat on the Dirichlet side to the power 1/p*,
/// f_{n+1} = f_n II(f_n)^(p*-1). Stops after n_max steps or when the sequence settles.
IterationState iterate_lower(const Problem& problem, int n_max, const IterateConfig& cfg = {});

/// A member of the test family: for ND the support is [0, x1) with a constant head on [0, x0];
/// for DN x1 = T and the member is constant beyond x0 at every step.
struct TwoPointFamily {
    double x0 = 0.0;
    double x1 = 0.0;
    GridFunction f{{0.0, 1.0}, {1.0, 1.0}};
};

TwoPointFamily family_member(const Problem& problem, double x0, double x1, int n, const IterateConfig& cfg = {});

/// Per-pair values of the family at step n: inf of II over the support and the
/// Rayleigh quotient ||f_n||_p^p / D_p(f_n).
struct FamilyValues {
    std::vector<double> inf_II;
    std::vector<double> rayleigh;
};
FamilyValues family_values(const Problem& problem, double x0, double x1, int n_max, const IterateConfig& cfg = {});

/// Optimum of one family quantity at step n.
struct FamilyOptimum {
    int n = 0;
    double value = 0.0;
    double x0 = 0.0;
    double x1 = 0.0;
};

struct UpperSequence {
    /// delta'_n, nondecreasing in n; 1 / delta'_n is an upper bound on lambda_p.
    std::vector<FamilyOptimum> delta_prime;
    /// bar delta_n; 1 / bar delta_n is an upper bound on lambda_p.
    std::vector<FamilyOptimum> bar_delta;

    std::string describe() const;
};

/// Sup over (x0, x1) of the family quantities: an m x m coarse grid (m for DN, which has
/// x1 = T) followed by coordinate-wise golden refinement. Pairs with x1 - x0 below two mesh
/// cells are excluded.
UpperSequence iterate_upper(const Problem& problem, int n_max, int grid_m = 24, const IterateConfig& cfg = {});

/// bar delta_n alone.
double rayleigh_bar_delta(const Problem& problem, int n, const IterateConfig& cfg = {}, int grid_m = 24);

} // namespace mixeig
