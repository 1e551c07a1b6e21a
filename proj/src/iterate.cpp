#include "mixeig/iterate.hpp"

#include "mixeig/bounds.hpp"
#include "mixeig/mesh.hpp"
#include "mixeig/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace mixeig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

/// The iteration in coordinates y measured from the Neumann end (y = x for ND, y = T - x for
/// DN), on the support [0, L]. With a cut y0 the first iterate is constant on [0, y0]; with
/// `recut` every later iterate is made constant there as well.
class Chain {
public:
    enum class Start { Lower, Family };

    Chain(const Problem& problem, double L, std::optional<double> y0, bool recut, Start start, const IterateConfig& cfg)
        : pr_(problem), nd_(problem.boundary() == Boundary::ND), T_(problem.truncation()), L_(L),
          y0_(y0.value_or(0.0)), recut_(recut), start_(start), mesh_(make_nodes(L, y0, cfg.cells), cfg.order) {
        const std::size_t N = mesh_.size();
        u_.resize(N);
        vh_.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double x = to_x(mesh_.points()[i]);
            u_[i] = pr_.u_at(x);
            vh_[i] = pr_.v_hat(x);
            if (!std::isfinite(u_[i]) || !std::isfinite(vh_[i]) || u_[i] < 0.0 || !(vh_[i] > 0.0))
                throw IterationError("iteration: weights are not finite and positive at x = " + fmt(x));
        }
        V_ = mesh_.backward(vh_);

        Step first;
        first.f.resize(N);
        const double ps = pr_.p_star();
        for (std::size_t i = 0; i < N; ++i) {
            const double y = mesh_.points()[i];
            first.f[i] = start_ == Start::Lower ? std::pow(V_.points[i], 1.0 / ps) : (y <= y0_ ? node_value(V_, y0_) : V_.points[i]);
        }
        first.scale = start_ == Start::Lower ? std::pow(V_.nodes[0], 1.0 / ps) : node_value(V_, y0_);
        if (!(first.scale > 0.0) || !std::isfinite(first.scale)) throw IterationError("iteration: first iterate is not finite and positive");
        for (double& f : first.f) f /= first.scale;
        complete(first);
        steps_.push_back(std::move(first));
    }

    const QuadratureMesh& mesh() const { return mesh_; }
    int steps() const { return static_cast<int>(steps_.size()); }

    void advance() {
        const Step& prev = steps_.back();
        Step next;
        const std::size_t N = mesh_.size();
        next.f.resize(N);
        next.scale = recut_ ? node_value(prev.B, y0_) : prev.B.nodes[0];
        if (!(next.scale > 0.0) || !std::isfinite(next.scale)) throw IterationError("iteration: iterate lost positivity");
        const double cut_value = recut_ ? node_value(prev.B, y0_) : 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double y = mesh_.points()[i];
            next.f[i] = (recut_ && y <= y0_ ? cut_value : prev.B.points[i]) / next.scale;
        }
        complete(next);
        steps_.push_back(std::move(next));
    }

    /// f_n at y (n is 1-based).
    double f(int n, double y) const {
        const Step& s = steps_[n - 1];
        if (n == 1) {
            if (start_ == Start::Lower) return std::pow(mesh_.backward_at(vh_, V_, y), 1.0 / pr_.p_star()) / s.scale;
            return mesh_.backward_at(vh_, V_, std::max(y, y0_)) / s.scale;
        }
        const Step& prev = steps_[n - 2];
        return mesh_.backward_at(prev.h, prev.B, recut_ ? std::max(y, y0_) : y) / s.scale;
    }

    double II(int n, double y) const {
        const Step& s = steps_[n - 1];
        const double B = mesh_.backward_at(s.h, s.B, y);
        const double fy = f(n, y);
        return fy > 0.0 ? std::pow(B / fy, pr_.p() - 1.0) : kInf;
    }

    double II_at_point(int n, std::size_t i) const { return steps_[n - 1].II[i]; }

    /// Extremum of II(f_n) over the open support, refined off the points.
    Extremum extremum_II(int n, bool maximize) const {
        const auto& pts = mesh_.points();
        const Step& s = steps_[n - 1];
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (maximize ? s.II[i] > s.II[best] : s.II[i] < s.II[best]) best = i;
        if (!std::isfinite(s.II[best])) return {pts[best], s.II[best]};
        const double lo = best > 0 ? pts[best - 1] : 0.0;
        const double hi = best + 1 < pts.size() ? pts[best + 1] : L_;
        const double sign = maximize ? 1.0 : -1.0;
        Extremum r = golden_maximize([&](double y) { return sign * II(n, y); }, lo, hi, 1e-14);
        r.value *= sign;
        Extremum e{pts[best], s.II[best]};
        if (maximize ? r.value > e.value : r.value < e.value) e = r;
        return e;
    }

    /// ||f_n||_p^p / D_p(f_n).
    double rayleigh(int n) const {
        const Step& s = steps_[n - 1];
        const double p = pr_.p();
        const auto& pts = mesh_.points();
        const auto& w = mesh_.weights();
        long double norm = 0.0L, energy = 0.0L;
        for (std::size_t i = 0; i < pts.size(); ++i) norm += static_cast<long double>(w[i]) * std::pow(s.f[i], p) * u_[i];
        if (n == 1) {
            if (start_ == Start::Lower) {
                const double ps = pr_.p_star();
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    const double d = vh_[i] * std::pow(V_.points[i], 1.0 / ps - 1.0) / ps;
                    energy += static_cast<long double>(w[i]) * std::pow(d, p) * vh_[i] / std::pow(vh_[i], p);
                }
                energy /= std::pow(s.scale, p);
            } else {
                energy = node_value(V_, y0_) / std::pow(s.scale, p);
            }
        } else {
            const Step& prev = steps_[n - 2];
            const double ps = pr_.p_star();
            const double from = recut_ ? y0_ : 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (pts[i] > from) energy += static_cast<long double>(w[i]) * vh_[i] * std::pow(prev.A[i], ps);
            energy /= std::pow(s.scale, p);
        }
        return static_cast<double>(norm / energy);
    }

    /// Iterate n on the mesh nodes, in x coordinates.
    GridFunction node_function(int n) const {
        const auto& ys = mesh_.nodes();
        std::vector<double> xs(ys.size()), vals(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            xs[i] = to_x(ys[i]);
            vals[i] = f(n, ys[i]);
        }
        if (!nd_) {
            std::reverse(xs.begin(), xs.end());
            std::reverse(vals.begin(), vals.end());
            xs.front() = 0.0;
        }
        return GridFunction(std::move(xs), std::move(vals));
    }

    double to_x(double y) const { return nd_ ? y : T_ - y; }

private:
    struct Step {
        std::vector<double> f;
        std::vector<double> A;
        std::vector<double> h;
        QuadratureMesh::Cumulative B;
        std::vector<double> II;
        double scale = 1.0;
    };

    static std::vector<double> make_nodes(double L, std::optional<double> y0, int cells) {
        std::vector<double> nodes = clustered_grid(L, cells);
        if (y0 && *y0 > 0.0 && *y0 < L) nodes = with_node(std::move(nodes), *y0);
        return nodes;
    }

    double node_value(const QuadratureMesh::Cumulative& c, double y) const {
        const auto& nodes = mesh_.nodes();
        auto it = std::lower_bound(nodes.begin(), nodes.end(), y);
        if (it == nodes.end() || *it != y) throw std::logic_error("iteration: cut point is not a mesh node");
        return c.nodes[it - nodes.begin()];
    }

    void complete(Step& s) const {
        const std::size_t N = mesh_.size();
        const double p = pr_.p(), ps = pr_.p_star();
        std::vector<double> g(N);
        for (std::size_t i = 0; i < N; ++i) g[i] = std::pow(s.f[i], p - 1.0) * u_[i];
        s.A = mesh_.forward(g).points;
        s.h.resize(N);
        for (std::size_t i = 0; i < N; ++i) s.h[i] = vh_[i] * std::pow(s.A[i], ps - 1.0);
        s.B = mesh_.backward(s.h);
        s.II.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            s.II[i] = s.f[i] > 0.0 ? std::pow(s.B.points[i] / s.f[i], p - 1.0) : kInf;
            if (std::isnan(s.II[i])) throw IterationError("iteration: II produced NaN");
        }
    }

    const Problem& pr_;
    bool nd_;
    double T_;
    double L_;
    double y0_;
    bool recut_;
    Start start_;
    QuadratureMesh mesh_;
    std::vector<double> u_;
    std::vector<double> vh_;
    QuadratureMesh::Cumulative V_;
    std::vector<Step> steps_;
};

void require_positive(const Problem& problem, const char* what) {
    if (!std::isfinite(sigma_p(problem)))
        throw IterationError(std::string(what) + ": sigma_p is infinite, so lambda_p = 0 and there is nothing to iterate");
}

Chain family_chain(const Problem& problem, double x0, double x1, const IterateConfig& cfg) {
    const double T = problem.truncation();
    if (problem.boundary() == Boundary::ND) {
        if (!(x0 >= 0.0 && x0 < x1 && x1 <= T))
            throw std::invalid_argument("family: need 0 <= x0 < x1 <= T, got x0 = " + fmt(x0) + ", x1 = " + fmt(x1));
        return Chain(problem, x1, x0, false, Chain::Start::Family, cfg);
    }
    if (!(x0 > 0.0 && x0 <= T)) throw std::invalid_argument("family: need 0 < x0 <= T, got x0 = " + fmt(x0));
    return Chain(problem, T, T - x0, true, Chain::Start::Family, cfg);
}

/// Coarse-to-fine maximization of one family quantity over the admissible pairs.
class FamilySearch {
public:
    FamilySearch(const Problem& problem, int n_max, int m, const IterateConfig& cfg)
        : pr_(problem), n_max_(n_max), m_(m), cfg_(cfg), nd_(problem.boundary() == Boundary::ND),
          T_(problem.truncation()), gap_(2.0 * T_ / cfg.cells) {}

    /// quantity 0: inf II, 1: Rayleigh quotient.
    double value(int quantity, int n, double x0, double x1) const {
        const FamilyValues v = family_values(pr_, x0, nd_ ? x1 : T_, n_max_, cfg_);
        const auto& seq = quantity == 0 ? v.inf_II : v.rayleigh;
        return seq[n - 1];
    }

    struct Coarse {
        double x0, x1;
        FamilyValues values;
    };

    std::vector<Coarse> coarse() const {
        std::vector<Coarse> out;
        if (nd_) {
            for (int i = 0; i < m_; ++i)
                for (int j = 1; j <= m_; ++j) {
                    const double x0 = T_ * i / m_, x1 = T_ * j / m_;
                    if (x1 - x0 < gap_) continue;
                    out.push_back({x0, x1, family_values(pr_, x0, x1, n_max_, cfg_)});
                }
        } else {
            for (int i = 1; i <= m_; ++i) {
                const double x0 = T_ * i / m_;
                out.push_back({x0, T_, family_values(pr_, x0, T_, n_max_, cfg_)});
            }
        }
        return out;
    }

    FamilyOptimum refine(int quantity, int n, double x0, double x1) const {
        const double step = T_ / m_;
        const double tol = 1e-9;
        double best = value(quantity, n, x0, x1);
        for (int sweep = 0; sweep < 12; ++sweep) {
            const double before = best;
            const double old0 = x0, old1 = x1;
            {
                const double lo = std::max(nd_ ? 0.0 : gap_, x0 - step);
                const double hi = nd_ ? std::min(x1 - gap_, x0 + step) : std::min(T_, x0 + step);
                if (hi > lo) {
                    Extremum e = golden_maximize([&](double a) { return value(quantity, n, a, x1); }, lo, hi, tol);
                    for (double edge : {lo, hi}) {
                        const double v = value(quantity, n, edge, x1);
                        if (v > e.value) e = {edge, v};
                    }
                    if (e.value > best) {
                        best = e.value;
                        x0 = e.x;
                    }
                }
            }
            if (nd_) {
                const double lo = std::max(x0 + gap_, x1 - step);
                const double hi = std::min(T_, x1 + step);
                if (hi > lo) {
                    Extremum e = golden_maximize([&](double b) { return value(quantity, n, x0, b); }, lo, hi, tol);
                    for (double edge : {lo, hi}) {
                        const double v = value(quantity, n, x0, edge);
                        if (v > e.value) e = {edge, v};
                    }
                    if (e.value > best) {
                        best = e.value;
                        x1 = e.x;
                    }
                }
            }
            if (!nd_) break;
            if (std::abs(x0 - old0) + std::abs(x1 - old1) <= 1e-8 * T_ || best - before <= 1e-13 * std::abs(best)) break;
        }
        return {n, best, x0, x1};
    }

private:
    const Problem& pr_;
    int n_max_;
    int m_;
    IterateConfig cfg_;
    bool nd_;
    double T_;
    double gap_;
};

} // namespace

void IterateConfig::validate() const {
    if (cells < 16) throw std::invalid_argument("IterateConfig: cells must be >= 16");
    if (order < 2 || order > 32) throw std::invalid_argument("IterateConfig: order must be in [2, 32]");
    if (!(stop_rel >= 0.0)) throw std::invalid_argument("IterateConfig: stop_rel must be nonnegative");
}

IterationState iterate_lower(const Problem& problem, int n_max, const IterateConfig& cfg) {
    if (n_max < 1) throw std::invalid_argument("iterate_lower: n_max must be >= 1");
    cfg.validate();
    require_positive(problem, "iterate_lower");
    Chain chain(problem, problem.truncation(), std::nullopt, false, Chain::Start::Lower, cfg);
    IterationState state;
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) chain.advance();
        const double delta = chain.extremum_II(n, true).value;
        if (!std::isfinite(delta)) throw IterationError("iterate_lower: sup of II is not finite at step " + std::to_string(n));
        state.history.emplace_back(n, delta);
        state.n = n;
        state.delta_n = delta;
        if (n > 1 && std::abs(state.history[n - 2].second - delta) <= cfg.stop_rel * delta) break;
    }
    state.f_n = chain.node_function(state.n);
    return state;
}

std::string IterationState::describe() const {
    std::ostringstream os;
    os << "n   delta_n            lower bound 1/delta_n\n";
    for (const auto& [k, d] : history) os << k << "   " << fmt(d) << "   " << fmt(1.0 / d) << "\n";
    return os.str();
}

TwoPointFamily family_member(const Problem& problem, double x0, double x1, int n, const IterateConfig& cfg) {
    if (n < 1) throw std::invalid_argument("family_member: n must be >= 1");
    cfg.validate();
    const bool nd = problem.boundary() == Boundary::ND;
    const double T = problem.truncation();
    Chain chain = family_chain(problem, x0, nd ? x1 : T, cfg);
    for (int k = 2; k <= n; ++k) chain.advance();
    GridFunction f = chain.node_function(n);
    if (nd && x1 < T) {
        // Extend by zero on (x1, T].
        std::vector<double> xs(f.grid().begin(), f.grid().end());
        std::vector<double> vals(f.values().begin(), f.values().end());
        vals.back() = 0.0;
        xs.push_back(T);
        vals.push_back(0.0);
        f = GridFunction(std::move(xs), std::move(vals));
    }
    return {x0, nd ? x1 : T, std::move(f)};
}

FamilyValues family_values(const Problem& problem, double x0, double x1, int n_max, const IterateConfig& cfg) {
    if (n_max < 1) throw std::invalid_argument("family_values: n_max must be >= 1");
    Chain chain = family_chain(problem, x0, x1, cfg);
    FamilyValues out;
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) chain.advance();
        out.inf_II.push_back(chain.extremum_II(n, false).value);
        out.rayleigh.push_back(chain.rayleigh(n));
    }
    return out;
}

UpperSequence iterate_upper(const Problem& problem, int n_max, int grid_m, const IterateConfig& cfg) {
    if (n_max < 1) throw std::invalid_argument("iterate_upper: n_max must be >= 1");
    if (grid_m < 2) throw std::invalid_argument("iterate_upper: grid_m must be >= 2");
    cfg.validate();
    require_positive(problem, "iterate_upper");
    FamilySearch search(problem, n_max, grid_m, cfg);
    const auto coarse = search.coarse();
    UpperSequence out;
    for (int quantity = 0; quantity < 2; ++quantity) {
        auto& seq = quantity == 0 ? out.delta_prime : out.bar_delta;
        for (int n = 1; n <= n_max; ++n) {
            const FamilySearch::Coarse* best = nullptr;
            double best_value = -kInf;
            for (const auto& c : coarse) {
                const double v = (quantity == 0 ? c.values.inf_II : c.values.rayleigh)[n - 1];
                if (v > best_value) {
                    best_value = v;
                    best = &c;
                }
            }
            double x0 = best->x0, x1 = best->x1;
            if (!seq.empty() && search.value(quantity, n, seq.back().x0, seq.back().x1) > best_value) {
                x0 = seq.back().x0;
                x1 = seq.back().x1;
            }
            seq.push_back(search.refine(quantity, n, x0, x1));
        }
    }
    return out;
}

double rayleigh_bar_delta(const Problem& problem, int n, const IterateConfig& cfg, int grid_m) {
    if (n < 1) throw std::invalid_argument("rayleigh_bar_delta: n must be >= 1");
    cfg.validate();
    require_positive(problem, "rayleigh_bar_delta");
    FamilySearch search(problem, n, grid_m, cfg);
    double x0 = 0.0, x1 = 0.0, best = -kInf;
    for (const auto& c : search.coarse())
        if (c.values.rayleigh[n - 1] > best) {
            best = c.values.rayleigh[n - 1];
            x0 = c.x0;
            x1 = c.x1;
        }
    return search.refine(1, n, x0, x1).value;
}

std::string UpperSequence::describe() const {
    std::ostringstream os;
    os << "n   delta'_n           upper bound        x0            x1\n";
    for (const auto& d : delta_prime)
        os << d.n << "   " << fmt(d.value) << "   " << fmt(1.0 / d.value) << "   " << fmt(d.x0) << "   " << fmt(d.x1) << "\n";
    os << "n   bar_delta_n        upper bound        x0            x1\n";
    for (const auto& d : bar_delta)
        os << d.n << "   " << fmt(d.value) << "   " << fmt(1.0 / d.value) << "   " << fmt(d.x0) << "   " << fmt(d.x1) << "\n";
    return os.str();
}

} // namespace mixeig
