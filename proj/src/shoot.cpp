#include "mixeig/shoot.hpp"

#include "mixeig/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace mixeig {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

/// The first-order eigen-system with adaptive step control.
class EigenSystem {
public:
    EigenSystem(const Problem& problem, double lambda, const ShootConfig& cfg)
        : problem_(problem), lambda_(lambda), cfg_(cfg), p_(problem.p()), ps_(problem.p_star()) {}

    State rhs(double x, const State& y) const {
        const double v = problem_.v_at(x);
        const double u = problem_.u_at(x);
        const double w = y[1];
        const double dg = w == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(w) / v, ps_ - 1.0), w);
        const double g = y[0];
        const double dw = g == 0.0 || u == 0.0 ? 0.0 : -lambda_ * u * std::copysign(std::pow(std::abs(g), p_ - 1.0), g);
        if (!std::isfinite(dg) || !std::isfinite(dw))
            throw IntegrationError("shoot: non-finite right-hand side at x = " + fmt(x), x);
        return {dg, dw};
    }

    double derivative_g(double x, double w) const {
        return w == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(w) / problem_.v_at(x), ps_ - 1.0), w);
    }

    /// Advances y from x0 to x1 exactly, calling on_step(x, y) after each accepted step.
    template <class OnStep>
    void advance(double x0, double x1, State& y, double& h, int& steps, OnStep&& on_step) const {
        double x = x0;
        State k1 = rhs(x, y);
        const double span = x1 - x0;
        while (x < x1) {
            if (x + h >= x1 || x + 1.01 * h >= x1) h = x1 - x;
            h = limit_step(h, y, k1);
            const double h_min = 1e-15 * std::max(1.0, std::abs(x)) + 1e-300;
            if (h < h_min)
                throw IntegrationError("shoot: step size underflow at x = " + fmt(x), x);

            auto add = [&](std::initializer_list<std::pair<double, const State*>> terms) {
                State r = y;
                for (const auto& [c, k] : terms) {
                    r[0] += h * c * (*k)[0];
                    r[1] += h * c * (*k)[1];
                }
                return r;
            };
            const State k2 = rhs(x + c2 * h, add({{a21, &k1}}));
            const State k3 = rhs(x + c3 * h, add({{a31, &k1}, {a32, &k2}}));
            const State k4 = rhs(x + c4 * h, add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 = rhs(x + c5 * h, add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const double x_end = (h == x1 - x) ? x1 : x + h;
            const State k6 = rhs(x_end, add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State y_new = add({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const State k7 = rhs(x_end, y_new);

            double err = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max({std::abs(y[i]), std::abs(y_new[i]), 1e-300});
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) throw IntegrationError("shoot: non-finite error estimate at x = " + fmt(x), x);
            if (err <= 1.0) {
                x = x_end;
                y = y_new;
                k1 = k7;
                ++steps;
                on_step(x, y);
                const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                h = std::min(h * grow, span);
            } else {
                h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            }
        }
    }

private:
    /// For p > 2 the map w -> g' is not Lipschitz at w = 0; cap |dw| per step near there.
    double limit_step(double h, const State& y, const State& k) const {
        if (p_ <= 2.0 || k[1] == 0.0) return h;
        const double floor = 1e-8;
        const double cap = std::max(0.5 * std::abs(y[1]), floor) / std::abs(k[1]);
        return std::min(h, cap);
    }

    const Problem& problem_;
    double lambda_;
    const ShootConfig& cfg_;
    double p_;
    double ps_;
};

State initial_state(const Problem& problem) {
    return problem.boundary() == Boundary::ND ? State{1.0, 0.0} : State{0.0, 1.0};
}

/// Component whose first zero marks lambda above the principal eigenvalue.
int watched(const Problem& problem) { return problem.boundary() == Boundary::ND ? 0 : 1; }

} // namespace

ShotEnd shoot_once(const Problem& problem, double lambda, const ShootConfig& cfg) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("shoot_once: lambda must be nonnegative");
    const EigenSystem sys(problem, lambda, cfg);
    State y = initial_state(problem);
    const int i = watched(problem);
    const double T = problem.truncation();
    double h = 1e-3 * T;
    ShotEnd end;
    int prev_sign = sign_of(y[i]);
    sys.advance(0.0, T, y, h, end.steps, [&](double, const State& s) {
        const int sg = sign_of(s[i]);
        if (sg != prev_sign && prev_sign != 0) ++end.sign_changes;
        if (sg != 0) prev_sign = sg;
    });
    end.g_end = y[0];
    end.w_end = y[1];
    return end;
}

ShootResult solve_eigenvalue(const Problem& problem, const ShootConfig& cfg) {
    if (cfg.samples < 64) throw std::invalid_argument("solve_eigenvalue: need at least 64 samples");
    const Extremum sigma = sigma_p_truncated(problem);
    if (!std::isfinite(sigma.value) || !(sigma.value > 0.0))
        throw OracleFailure("solve_eigenvalue: sigma_p of the truncated problem is not finite and positive");
    auto [lo, hi] = basic_bounds(sigma.value, problem.exponent());
    const int watch = watched(problem);
    const bool nd = problem.boundary() == Boundary::ND;
    int iterations = 0;

    auto functional = [&](double lambda) {
        const ShotEnd e = shoot_once(problem, lambda, cfg);
        ++iterations;
        return std::pair{e, nd ? e.g_end : e.w_end};
    };
    auto crossed = [&](const ShotEnd& e) { return e.sign_changes > 0 || (watch == 0 ? e.g_end : e.w_end) <= 0.0; };

    auto [e_lo, f_lo] = functional(lo);
    for (int k = 0; k < 2 && crossed(e_lo); ++k) std::tie(e_lo, f_lo) = functional(lo /= 2.0);
    auto [e_hi, f_hi] = functional(hi);
    for (int k = 0; k < 2 && !crossed(e_hi); ++k) std::tie(e_hi, f_hi) = functional(hi *= 2.0);
    if (crossed(e_lo) || !crossed(e_hi))
        throw OracleFailure("solve_eigenvalue: no sign change of the boundary functional in [" + fmt(lo) + ", " + fmt(hi) + "]");

    // Bisection on the first-crossing predicate until the bracket holds a single simple crossing.
    while (hi - lo > 1e-4 * hi || e_hi.sign_changes > 1) {
        if (iterations >= cfg.max_iterations) throw OracleFailure("solve_eigenvalue: iteration budget exhausted");
        const double mid = 0.5 * (lo + hi);
        auto [e, f] = functional(mid);
        if (crossed(e)) {
            hi = mid;
            e_hi = e;
            f_hi = f;
        } else {
            lo = mid;
            e_lo = e;
            f_lo = f;
        }
    }

    // Illinois refinement on the continuous boundary functional.
    double lambda = f_lo < -f_hi ? lo : hi;
    double residual = std::min(std::abs(f_lo), std::abs(f_hi));
    int side = 0;
    while (residual > cfg.residual_tol && hi - lo > 4e-16 * hi) {
        if (iterations >= cfg.max_iterations) throw OracleFailure("solve_eigenvalue: iteration budget exhausted");
        double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        auto [e, f] = functional(x);
        lambda = x;
        residual = std::abs(f);
        if (f > 0.0 && !crossed(e)) {
            lo = x;
            f_lo = f;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            f_hi = f;
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
    }

    // Sample the eigenfunction at the accepted lambda.
    const double T = problem.truncation();
    std::vector<double> xs = uniform_grid(T, cfg.samples);
    std::vector<double> g(xs.size()), dg(xs.size()), w(xs.size());
    const EigenSystem sys(problem, lambda, cfg);
    State y = initial_state(problem);
    double h = 1e-3 * T;
    int steps = 0;
    g[0] = y[0];
    w[0] = y[1];
    dg[0] = sys.derivative_g(xs[0], y[1]);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        sys.advance(xs[k - 1], xs[k], y, h, steps, [](double, const State&) {});
        g[k] = y[0];
        w[k] = y[1];
        dg[k] = sys.derivative_g(xs[k], y[1]);
    }

    // Values within the terminal-residual noise of zero are not counted as sign changes.
    const double slack = std::max(100.0 * cfg.residual_tol, 1e-8);
    for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
        const bool ok = nd ? (g[k] > -slack && w[k] < 0.0) : (g[k] > 0.0 && w[k] > -slack);
        if (!ok)
            throw OracleFailure("solve_eigenvalue: eigenfunction at lambda = " + fmt(lambda) +
                                " changes sign near x = " + fmt(xs[k]) + "; not principal");
    }

    ShootResult r;
    r.lambda = lambda;
    r.g = GridFunction(xs, std::move(g));
    r.dg = GridFunction(xs, std::move(dg));
    r.w = GridFunction(std::move(xs), std::move(w));
    r.iterations = iterations;
    r.residual = residual;
    r.truncation = T;
    r.lambda_lo = lo;
    r.lambda_hi = hi;
    return r;
}

std::string ShootResult::describe() const {
    std::ostringstream os;
    os.precision(15);
    os << "lambda      = " << lambda << "\n";
    os << "bracket     = [" << lambda_lo << ", " << lambda_hi << "]\n";
    os << "residual    = " << residual << "\n";
    os << "iterations  = " << iterations << "\n";
    os << "truncation  = " << truncation << "\n";
    return os.str();
}

} // namespace mixeig
