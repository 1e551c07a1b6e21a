#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mixeig {

/// Chebyshev-clustered nodes on [0, T] with `grading` extra geometric levels
/// inside the first and last cells (each level halves the distance to the endpoint).
std::vector<double> clustered_grid(double T, int cells, int grading = 20);

/// n equally spaced nodes on [0, T], n >= 2.
std::vector<double> uniform_grid(double T, int n);

/// Returns a copy of `grid` with x inserted (no-op if already present).
std::vector<double> with_node(std::vector<double> grid, double x);

/// A function sampled on a strictly increasing grid, read by linear interpolation.
class GridFunction {
public:
    GridFunction(std::vector<double> grid, std::vector<double> values);

    static GridFunction sample(const std::function<double(double)>& f, std::vector<double> grid);

    /// Linear interpolation; throws std::domain_error outside [left(), right()].
    double operator()(double x) const;
    /// Slope of the segment containing x (the right segment at interior nodes).
    double slope(double x) const;
    double segment_slope(std::size_t segment) const;
    /// Three-point derivative estimate at node i (one-sided at the ends).
    double node_derivative(std::size_t i) const;
    /// Linear interpolation of the nodal derivative estimates: a continuous,
    /// second-order approximation of the derivative of the sampled function.
    double derivative(double x) const;
    /// Index i with grid[i] <= x <= grid[i + 1].
    std::size_t segment_of(double x) const;

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }
    std::size_t segments() const noexcept { return grid_.size() - 1; }
    double left() const noexcept { return grid_.front(); }
    double right() const noexcept { return grid_.back(); }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

} // namespace mixeig
