#pragma once

#include <span>
#include <vector>

namespace mixeig {

/// Composite Gauss-Legendre mesh with spectral cumulative integration.
///
/// Each cell carries `order` Gauss points. A function sampled at the points is read as its
/// degree order-1 interpolant in every cell, which gives running integrals at the nodes,
/// at the points, and at arbitrary positions.
class QuadratureMesh {
public:
    QuadratureMesh(std::vector<double> nodes, int order = 8);

    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    int order() const noexcept { return order_; }
    /// Number of quadrature points, cells() * order().
    std::size_t size() const noexcept { return points_.size(); }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& points() const noexcept { return points_; }
    /// Quadrature weight of each point (already scaled to its cell).
    const std::vector<double>& weights() const noexcept { return weights_; }
    double left() const noexcept { return nodes_.front(); }
    double right() const noexcept { return nodes_.back(); }
    std::size_t cell_of(double x) const;

    /// Integral of the interpolant over the whole mesh.
    double total(std::span<const double> g) const;

    /// Running integrals of g from the left end (forward) or to the right end (backward).
    struct Cumulative {
        std::vector<double> nodes;
        std::vector<double> points;
    };
    Cumulative forward(std::span<const double> g) const;
    Cumulative backward(std::span<const double> g) const;

    /// Values of the running integrals at an arbitrary x in [left(), right()].
    double forward_at(std::span<const double> g, const Cumulative& c, double x) const;
    double backward_at(std::span<const double> g, const Cumulative& c, double x) const;

private:
    /// Integrals over [-1, t] and [t, 1] of the Lagrange basis of the reference rule.
    void basis_integrals(double t, std::vector<double>& left, std::vector<double>& right) const;

    std::vector<double> nodes_;
    int order_;
    std::vector<double> ref_nodes_;
    std::vector<double> ref_weights_;
    std::vector<double> points_;
    std::vector<double> weights_;
    /// left_[i * order + j] = int_{-1}^{t_i} l_j, right_ likewise over [t_i, 1].
    std::vector<double> left_;
    std::vector<double> right_;
};

} // namespace mixeig
