#include "mixeig/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

namespace mixeig {

namespace {

// Kronrod 15 / Gauss 7 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    int depth;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class G>
Panel gauss_kronrod(const G& g, double lo, double hi, int depth, int& evals) {
    const double centr = 0.5 * (lo + hi);
    const double hlgth = 0.5 * (hi - lo);
    const double fc = g(centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};
    for (int j = 0; j < 7; ++j) {
        const double absc = hlgth * kXgk[j];
        const double f1 = g(centr - absc);
        const double f2 = g(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    evals += 15;
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    if (resabs > kTiny / (50.0 * kEps)) abserr = std::max(50.0 * kEps * resabs, abserr);
    return Panel{lo, hi, result, abserr, depth};
}

// Smoothstep map on [0, 1]; 3t^2 - 2t^3 and its derivative.
inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
inline double smoothstep_prime(double t) { return 6.0 * t * (1.0 - t); }

constexpr int kMaxPanels = 4000;

} // namespace

void QuadConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("QuadConfig: tolerances must be positive");
    if (max_depth < 10) throw std::invalid_argument("QuadConfig: max_depth must be >= 10");
    if (!(divergence_factor > 1.0))
        throw std::invalid_argument("QuadConfig: divergence_factor must exceed 1");
    if (divergence_streak < 1)
        throw std::invalid_argument("QuadConfig: divergence_streak must be positive");
}

QuadResult integrate_detailed(const RealFunction& f, double a, double b, const QuadConfig& cfg) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN limit");
    if (a > b) throw std::invalid_argument("integrate: lower limit exceeds upper limit");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate: limits must be finite (use integrate_to_infinity)");
    if (a == b) return {};

    const double len = b - a;
    // Evaluate near each endpoint relative to that endpoint so b - x keeps its precision.
    auto g = [&](double t) {
        const double x = t < 0.5 ? a + len * smoothstep(t) : b - len * smoothstep(1.0 - t);
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx * len * smoothstep_prime(t);
    };

    int evals = 0;
    std::priority_queue<Panel> active;
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    Panel first = gauss_kronrod(g, 0.0, 1.0, 0, evals);
    double total = first.value;
    double total_err = first.error;
    active.push(first);
    int splits = 0;

    while (true) {
        if (!std::isfinite(total)) {
            if (std::isnan(total)) throw std::domain_error("integrate: integrand produced NaN");
            return {total, std::numeric_limits<double>::infinity(), evals};
        }
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (total_err <= tol) break;
        if (frozen_error > tol || active.empty())
            throw ConvergenceError("integrate: max_depth exhausted before tolerance", total, total_err);
        if (static_cast<int>(active.size()) > kMaxPanels)
            throw ConvergenceError("integrate: panel budget exhausted before tolerance", total, total_err);

        Panel worst = active.top();
        active.pop();
        if (worst.depth >= cfg.max_depth) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        Panel left = gauss_kronrod(g, worst.lo, mid, worst.depth + 1, evals);
        Panel right = gauss_kronrod(g, mid, worst.hi, worst.depth + 1, evals);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);

        // Refresh sums periodically to shed accumulated cancellation.
        if (++splits % 256 == 0) {
            std::priority_queue<Panel> copy = active;
            total = frozen_value;
            total_err = frozen_error;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }

    // Recompute the sum from panels for the returned value.
    double value = frozen_value;
    double err = frozen_error;
    while (!active.empty()) {
        value += active.top().value;
        err += active.top().error;
        active.pop();
    }
    return {value, err, evals};
}

double integrate(const RealFunction& f, double a, double b, const QuadConfig& cfg) {
    return integrate_detailed(f, a, b, cfg).value;
}

double integrate_to_infinity(const RealFunction& f, double a, const QuadConfig& cfg) {
    if (!std::isfinite(a)) throw std::invalid_argument("integrate_to_infinity: lower limit must be finite");

    // Divergence test on doubling windows [a, a + 2^k].
    constexpr int kMaxDoublings = 64;
    double window = integrate(f, a, a + 1.0, cfg);
    int growing = 0;
    int calm = 0;
    double reach = 1.0;
    for (int k = 1; k <= kMaxDoublings; ++k) {
        const double inc = integrate(f, a + reach, a + 2.0 * reach, cfg);
        reach *= 2.0;
        const double next = window + inc;
        if (!std::isfinite(next)) return next;
        double ratio;
        if (window != 0.0)
            ratio = std::abs(next) / std::abs(window);
        else
            ratio = next == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        if (ratio > cfg.divergence_factor) {
            ++growing;
            calm = 0;
        } else {
            growing = 0;
            ++calm;
        }
        window = next;
        if (growing >= cfg.divergence_streak)
            return window > 0.0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
        if (calm >= 2 && std::abs(inc) <= cfg.rel_tol * std::abs(window)) break;
    }

    auto g = [&](double t) {
        const double s = 1.0 - t;
        const double x = a + t / s;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx / (s * s);
    };
    return integrate(g, 0.0, 1.0, cfg);
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

} // namespace mixeig
