#include "mixeig/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixeig {

std::vector<double> candidate_points(double a, double b, int count) {
    if (!(b > a)) throw std::invalid_argument("candidate_points: empty interval");
    if (count < 8) throw std::invalid_argument("candidate_points: count must be >= 8");
    const double len = b - a;
    const int clustered = count / 4;
    const int uniform = count - 2 * clustered;
    std::vector<double> xs;
    xs.reserve(count);
    const double lo_exp = std::log(1e-10), hi_exp = std::log(0.25);
    for (int i = 0; i < clustered; ++i) {
        const double s = len * std::exp(lo_exp + (hi_exp - lo_exp) * i / (clustered - 1));
        xs.push_back(a + s);
        xs.push_back(b - s);
    }
    for (int i = 1; i <= uniform; ++i) xs.push_back(a + len * i / (uniform + 1));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::erase_if(xs, [&](double x) { return !(x > a && x < b); });
    return xs;
}

Extremum golden_maximize(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
    constexpr double r = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    Extremum best = fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
    for (int it = 0; it < 200 && (b - a) > x_tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (fc >= fd || std::isnan(fd)) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
            if (fc > best.value) best = {c, fc};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
            if (fd > best.value) best = {d, fd};
        }
    }
    return best;
}

Extremum maximize_over(const std::function<double(double)>& f, const std::vector<double>& xs, double lo, double hi) {
    if (xs.empty()) throw std::invalid_argument("maximize_over: no candidate points");
    Extremum best{std::numeric_limits<double>::quiet_NaN(), -std::numeric_limits<double>::infinity()};
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        if (std::isnan(v)) continue;
        if (v == std::numeric_limits<double>::infinity()) return {xs[i], v};
        if (v > best.value) {
            best = {xs[i], v};
            best_i = i;
        }
    }
    if (std::isnan(best.x)) return best;
    const double left = best_i > 0 ? xs[best_i - 1] : lo;
    const double right = best_i + 1 < xs.size() ? xs[best_i + 1] : hi;
    const Extremum refined = golden_maximize(f, left, right);
    return refined.value > best.value ? refined : best;
}

Extremum minimize_over(const std::function<double(double)>& f, const std::vector<double>& xs, double lo, double hi) {
    Extremum e = maximize_over([&f](double x) { return -f(x); }, xs, lo, hi);
    e.value = -e.value;
    return e;
}

} // namespace mixeig
