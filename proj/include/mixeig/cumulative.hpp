#pragma once

#include "mixeig/quad.hpp"

#include <cstdint>
#include <vector>

namespace mixeig {

/// Running integrals of a nonnegative function over a fixed grid.
///
/// Cell integrals are computed once by adaptive quadrature; left and right
/// cumulatives are summed from their own ends so either direction keeps full
/// relative precision near the end it starts from. Queries inside a cell add a
/// partial-cell integral: an 8-point Gauss rule on cells where that rule was
/// verified against the adaptive value at construction, adaptive otherwise.
class CumulativeTable {
public:
    CumulativeTable(std::vector<double> grid, RealFunction f, const QuadConfig& cfg);

    /// Integral from grid.front() to x.
    double from_left(double x) const;
    /// Integral from x to grid.back().
    double from_right(double x) const;
    /// Integral over [a, b], a <= b.
    double between(double a, double b) const;
    double total() const noexcept { return left_.back(); }

    const std::vector<double>& grid() const noexcept { return grid_; }
    double integrand(double x) const { return f_(x); }

    /// Number of cells answered by the fixed Gauss rule.
    std::size_t smooth_cells() const noexcept;

private:
    std::size_t cell_of(double x) const;
    double partial(std::size_t cell, double a, double b) const;

    std::vector<double> grid_;
    RealFunction f_;
    QuadConfig cfg_;
    std::vector<double> cell_;
    std::vector<double> left_;
    std::vector<double> right_;
    std::vector<std::uint8_t> smooth_;
};

} // namespace mixeig
