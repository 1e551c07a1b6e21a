#include "mixeig/mesh.hpp"

#include "mixeig/quad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mixeig {

namespace {

/// P_0 .. P_n at t.
void legendre(double t, int n, std::vector<double>& P) {
    P.assign(n + 1, 0.0);
    P[0] = 1.0;
    if (n >= 1) P[1] = t;
    for (int m = 1; m < n; ++m) P[m + 1] = ((2.0 * m + 1.0) * t * P[m] - m * P[m - 1]) / (m + 1.0);
}

} // namespace

QuadratureMesh::QuadratureMesh(std::vector<double> nodes, int order) : nodes_(std::move(nodes)), order_(order) {
    if (nodes_.size() < 2) throw std::invalid_argument("QuadratureMesh: need at least one cell");
    if (order_ < 2 || order_ > 32) throw std::invalid_argument("QuadratureMesh: order must be in [2, 32]");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("QuadratureMesh: nodes must increase strictly");

    const GaussRule& rule = gauss_legendre(order_);
    ref_nodes_ = rule.nodes;
    ref_weights_ = rule.weights;
    const std::size_t k = order_;
    left_.resize(k * k);
    right_.resize(k * k);
    std::vector<double> l, r;
    for (std::size_t i = 0; i < k; ++i) {
        basis_integrals(ref_nodes_[i], l, r);
        std::copy(l.begin(), l.end(), left_.begin() + i * k);
        std::copy(r.begin(), r.end(), right_.begin() + i * k);
    }

    points_.resize(cells() * k);
    weights_.resize(cells() * k);
    for (std::size_t c = 0; c < cells(); ++c) {
        const double a = nodes_[c], b = nodes_[c + 1];
        const double h = 0.5 * (b - a);
        for (std::size_t j = 0; j < k; ++j) {
            // Place points relative to the nearer cell end to keep their distance to it exact.
            const double t = ref_nodes_[j];
            points_[c * k + j] = t < 0.0 ? a + h * (1.0 + t) : b - h * (1.0 - t);
            weights_[c * k + j] = h * ref_weights_[j];
        }
    }
}

void QuadratureMesh::basis_integrals(double t, std::vector<double>& left, std::vector<double>& right) const {
    const int k = order_;
    std::vector<double> Pt;
    legendre(t, k, Pt);
    left.assign(k, 0.0);
    right.assign(k, 0.0);
    std::vector<double> Pj;
    for (int j = 0; j < k; ++j) {
        legendre(ref_nodes_[j], k - 1, Pj);
        double sl = 0.5 * (t + 1.0);
        double sr = 0.5 * (1.0 - t);
        for (int m = 1; m < k; ++m) {
            const double d = 0.5 * (Pt[m + 1] - Pt[m - 1]) * Pj[m];
            sl += d;
            sr -= d;
        }
        left[j] = ref_weights_[j] * sl;
        right[j] = ref_weights_[j] * sr;
    }
}

std::size_t QuadratureMesh::cell_of(double x) const {
    if (!(x >= nodes_.front() && x <= nodes_.back())) {
        std::ostringstream msg;
        msg << "QuadratureMesh: x = " << x << " outside [" << nodes_.front() << ", " << nodes_.back() << "]";
        throw std::domain_error(msg.str());
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, cells() - 1);
}

double QuadratureMesh::total(std::span<const double> g) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < points_.size(); ++i) s += static_cast<long double>(weights_[i]) * g[i];
    return static_cast<double>(s);
}

QuadratureMesh::Cumulative QuadratureMesh::forward(std::span<const double> g) const {
    if (g.size() != points_.size()) throw std::invalid_argument("QuadratureMesh: sample count mismatch");
    const std::size_t k = order_;
    Cumulative c;
    c.nodes.assign(nodes_.size(), 0.0);
    c.points.assign(points_.size(), 0.0);
    long double run = 0.0L;
    for (std::size_t cell = 0; cell < cells(); ++cell) {
        const double h = 0.5 * (nodes_[cell + 1] - nodes_[cell]);
        const double* gc = g.data() + cell * k;
        long double cell_sum = 0.0L;
        for (std::size_t j = 0; j < k; ++j) cell_sum += ref_weights_[j] * gc[j];
        for (std::size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += left_[i * k + j] * gc[j];
            c.points[cell * k + i] = static_cast<double>(run + h * s);
        }
        run += h * cell_sum;
        c.nodes[cell + 1] = static_cast<double>(run);
    }
    return c;
}

QuadratureMesh::Cumulative QuadratureMesh::backward(std::span<const double> g) const {
    if (g.size() != points_.size()) throw std::invalid_argument("QuadratureMesh: sample count mismatch");
    const std::size_t k = order_;
    Cumulative c;
    c.nodes.assign(nodes_.size(), 0.0);
    c.points.assign(points_.size(), 0.0);
    long double run = 0.0L;
    for (std::size_t cell = cells(); cell-- > 0;) {
        const double h = 0.5 * (nodes_[cell + 1] - nodes_[cell]);
        const double* gc = g.data() + cell * k;
        long double cell_sum = 0.0L;
        for (std::size_t j = 0; j < k; ++j) cell_sum += ref_weights_[j] * gc[j];
        for (std::size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += right_[i * k + j] * gc[j];
            c.points[cell * k + i] = static_cast<double>(run + h * s);
        }
        run += h * cell_sum;
        c.nodes[cell] = static_cast<double>(run);
    }
    return c;
}

double QuadratureMesh::forward_at(std::span<const double> g, const Cumulative& c, double x) const {
    const std::size_t cell = cell_of(x);
    const double a = nodes_[cell], b = nodes_[cell + 1];
    if (x == a) return c.nodes[cell];
    if (x == b) return c.nodes[cell + 1];
    const double h = 0.5 * (b - a);
    const double t = x - a < b - x ? (x - a) / h - 1.0 : 1.0 - (b - x) / h;
    std::vector<double> l, r;
    basis_integrals(t, l, r);
    double s = 0.0;
    for (int j = 0; j < order_; ++j) s += l[j] * g[cell * order_ + j];
    return c.nodes[cell] + h * s;
}

double QuadratureMesh::backward_at(std::span<const double> g, const Cumulative& c, double x) const {
    const std::size_t cell = cell_of(x);
    const double a = nodes_[cell], b = nodes_[cell + 1];
    if (x == a) return c.nodes[cell];
    if (x == b) return c.nodes[cell + 1];
    const double h = 0.5 * (b - a);
    const double t = x - a < b - x ? (x - a) / h - 1.0 : 1.0 - (b - x) / h;
    std::vector<double> l, r;
    basis_integrals(t, l, r);
    double s = 0.0;
    for (int j = 0; j < order_; ++j) s += r[j] * g[cell * order_ + j];
    return c.nodes[cell + 1] + h * s;
}

} // namespace mixeig
