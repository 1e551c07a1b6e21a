#include "mixeig/operators.hpp"

#include "mixeig/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace mixeig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

bool is_modified(FunctionClass c) {
    return c == FunctionClass::Ftilde_I || c == FunctionClass::Ftilde_II || c == FunctionClass::Htilde;
}

/// Scans for the windows where consecutive node checks hold, building violation messages.
class Checker {
public:
    explicit Checker(ClassReport& report) : report_(report) {}

    void require(bool cond, const std::string& message) {
        if (cond) return;
        report_.ok = false;
        if (report_.violations.size() < 8) report_.violations.push_back(message);
    }

private:
    ClassReport& report_;
};

/// First index k such that values are (numerically) zero from k to the end; size() if none.
std::size_t zero_tail(std::span<const double> values, double tol) {
    std::size_t k = values.size();
    while (k > 0 && std::abs(values[k - 1]) <= tol) --k;
    return k;
}

/// Ratio-of-windows divergence test for the integral of h near 0 (h(0) itself is ignored).
bool diverges_at_zero(const GridFunction& h, const QuadConfig& cfg) {
    const auto xs = h.grid();
    const double c = 0.5 * h.right();
    const double floor = xs.size() > 1 ? xs[1] : c;
    auto window = [&](double a) {
        double sum = 0.0;
        for (std::size_t j = h.segment_of(a); j < h.segments() && xs[j] < c; ++j) {
            const double lo = std::max(a, xs[j]);
            const double hi = std::min(c, xs[j + 1]);
            if (hi > lo) sum += 0.5 * (h(lo) + h(hi)) * (hi - lo);
        }
        return sum;
    };
    double prev = window(0.5 * c);
    int streak = 0;
    for (double a = 0.25 * c; a >= floor; a *= 0.5) {
        const double next = window(a);
        streak = (prev > 0.0 && next > cfg.divergence_factor * prev) ? streak + 1 : 0;
        if (streak >= cfg.divergence_streak) return true;
        prev = next;
    }
    return false;
}

/// v' h + (p - 1)(h^2 + h') v at x.
double r_bracket(const Problem& problem, double h, double dh, double x) {
    return problem.v().derivative(x) * h + (problem.p() - 1.0) * (h * h + dh) * problem.v_at(x);
}

} // namespace

std::string to_string(FunctionClass c) {
    switch (c) {
    case FunctionClass::F_I: return "F_I";
    case FunctionClass::F_II: return "F_II";
    case FunctionClass::H: return "H";
    case FunctionClass::Ftilde_I: return "Ftilde_I";
    case FunctionClass::Ftilde_II: return "Ftilde_II";
    case FunctionClass::Htilde: return "Htilde";
    }
    return {};
}

FunctionClass parse_function_class(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    for (FunctionClass c : {FunctionClass::F_I, FunctionClass::F_II, FunctionClass::H, FunctionClass::Ftilde_I,
                            FunctionClass::Ftilde_II, FunctionClass::Htilde}) {
        std::string name = to_string(c);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (s == name) return c;
    }
    throw std::invalid_argument("unknown function class '" + std::string(text) + "'");
}

std::string to_string(Direction d) { return d == Direction::Lower ? "lower" : "upper"; }

std::string ClassReport::describe() const {
    if (ok) return "ok";
    std::string out;
    for (const auto& v : violations) out += (out.empty() ? "" : "; ") + v;
    return out;
}

ClassViolation::ClassViolation(ClassReport report)
    : std::invalid_argument("test function is not in its class: " + report.describe()), report_(std::move(report)) {}

ClassReport validate_class(const Problem& problem, const GridFunction& f, ClassTag tag) {
    ClassReport report;
    Checker check(report);
    const double T = problem.truncation();
    const auto xs = f.grid();
    const auto ys = f.values();
    const std::size_t n = f.size();
    check.require(n >= 64, "grid has " + std::to_string(n) + " nodes, need at least 64");
    check.require(f.left() == 0.0 && std::abs(f.right() - T) <= 1e-12 * T,
                  "grid must span [0, " + fmt(T) + "], got [" + fmt(f.left()) + ", " + fmt(f.right()) + "]");
    if (tag.boundary != problem.boundary())
        check.require(false, "class boundary " + to_string(tag.boundary) + " does not match problem " +
                                  to_string(problem.boundary()));
    if (!report.ok) return report;

    double scale = 0.0;
    for (double y : ys) scale = std::max(scale, std::abs(y));
    check.require(scale > 0.0 && std::isfinite(scale), "function must be finite and not identically zero");
    if (!report.ok) return report;
    const double zero = 1e-13 * scale;
    const double flat = 1e-12 * scale / T;
    const bool nd = tag.boundary == Boundary::ND;
    report.x0 = 0.0;
    report.x1 = T;

    auto all_nodes = [&](std::size_t from, std::size_t to, auto pred, const std::string& what) {
        for (std::size_t i = from; i < to; ++i)
            if (!pred(ys[i])) {
                check.require(false, what + " fails at x = " + fmt(xs[i]));
                return;
            }
    };
    auto all_slopes = [&](std::size_t from, std::size_t to, auto pred, const std::string& what) {
        for (std::size_t j = from; j < to; ++j)
            if (!pred(f.segment_slope(j))) {
                check.require(false, what + " fails on [" + fmt(xs[j]) + ", " + fmt(xs[j + 1]) + "]");
                return;
            }
    };
    auto positive = [&](double y) { return y > zero; };
    auto negative = [&](double y) { return y < -zero; };
    auto nonpositive = [&](double y) { return y <= zero; };

    switch (tag.which) {
    case FunctionClass::F_I:
        all_nodes(nd ? 0 : 1, n - 1, positive, "f > 0");
        if (nd) all_slopes(0, n - 1, [&](double s) { return s < -flat; }, "f' < 0");
        else {
            check.require(std::abs(ys[0]) <= zero, "f(0) = 0");
            all_slopes(0, n - 1, [&](double s) { return s > flat; }, "f' > 0");
        }
        break;
    case FunctionClass::F_II:
        all_nodes(nd ? 0 : 1, n - 1, positive, "f > 0");
        if (!nd) check.require(std::abs(ys[0]) <= zero, "f(0) = 0");
        break;
    case FunctionClass::H:
        if (nd) {
            check.require(std::abs(ys[0]) <= zero, "h(0) = 0");
            if (std::isfinite(problem.nu_hat_total())) all_nodes(1, n - 1, negative, "h < 0");
            else all_nodes(1, n - 1, nonpositive, "h <= 0");
        } else {
            all_nodes(1, n - 1, positive, "h > 0");
            check.require(diverges_at_zero(f, problem.quad()), "integral of h near 0 must diverge");
        }
        break;
    case FunctionClass::Ftilde_I: {
        if (nd) {
            const std::size_t tail = zero_tail(ys, zero);
            check.require(tail >= 2, "f must be positive near 0");
            if (!report.ok) break;
            const std::size_t end = std::min(tail, n - 1);
            report.x1 = xs[end];
            all_nodes(0, tail, positive, "f > 0 before x1");
            std::size_t head = 0;
            while (head + 1 < end && std::abs(f.segment_slope(head)) <= flat) ++head;
            report.x0 = xs[head];
            all_slopes(head, end, [&](double s) { return s < -flat; }, "f' < 0 on (x0, x1)");
        } else {
            check.require(std::abs(ys[0]) <= zero, "f(0) = 0");
            std::size_t last = n - 1;
            while (last > 1 && std::abs(f.segment_slope(last - 1)) <= flat) --last;
            check.require(last < n - 1, "f must be constant on [x0, T] for some x0 < T");
            report.x0 = xs[last];
            all_slopes(0, last, [&](double s) { return s > flat; }, "f' > 0 on (0, x0)");
        }
        break;
    }
    case FunctionClass::Ftilde_II: {
        if (nd) {
            const std::size_t tail = zero_tail(ys, zero);
            check.require(tail >= 1 && tail < n, "f must vanish on [x0, T] for some x0 in (0, T]");
            if (!report.ok) break;
            report.x0 = xs[tail];
            report.x1 = xs[tail];
            all_nodes(0, tail, positive, "f > 0 on [0, x0)");
        } else {
            check.require(std::abs(ys[0]) <= zero, "f(0) = 0");
            all_nodes(1, n, positive, "f > 0");
            check.require(std::abs(f.segment_slope(n - 2)) <= flat, "f must be constant on [x0, T] for some x0 < T");
            std::size_t last = n - 1;
            while (last > 1 && std::abs(f.segment_slope(last - 1)) <= flat) --last;
            report.x0 = xs[last];
        }
        break;
    }
    case FunctionClass::Htilde: {
        const std::size_t tail = zero_tail(ys, zero);
        check.require(tail >= 2 && tail < n, "h must vanish on [x0, T] for some x0 in (0, T)");
        if (!report.ok) break;
        report.x0 = xs[tail];
        if (nd) {
            check.require(std::abs(ys[0]) <= zero, "h(0) = 0");
            all_nodes(1, tail, negative, "h < 0 on (0, x0)");
        } else {
            all_nodes(1, tail, positive, "h > 0 on (0, x0)");
            check.require(diverges_at_zero(f, problem.quad()), "integral of h near 0 must diverge");
        }
        for (std::size_t j = 0; j + 1 < tail && report.ok; ++j) {
            const double x = 0.5 * (xs[j] + xs[j + 1]);
            check.require(r_bracket(problem, f(x), f.segment_slope(j), x) < 0.0,
                          "v'h + (p-1)(h^2 + h')v < 0 fails near x = " + fmt(x));
        }
        break;
    }
    }
    return report;
}

double phi_p(double s, double p) {
    if (s == 0.0 || (p < 2.0 && std::abs(s) < 1e-300)) return 0.0;
    return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

OperatorEvaluator::OperatorEvaluator(const Problem& problem, GridFunction f)
    : problem_(problem), f_(std::move(f)), nd_(problem.boundary() == Boundary::ND) {
    const double T = problem_.truncation();
    if (f_.left() != 0.0 || std::abs(f_.right() - T) > 1e-12 * T)
        throw std::invalid_argument("OperatorEvaluator: grid must span [0, T]");
    const std::size_t segs = f_.segments();
    inner_nodes_.assign(f_.size(), 0.0);
    const auto xs = f_.grid();
    if (nd_) {
        for (std::size_t j = 0; j < segs; ++j) inner_nodes_[j + 1] = inner_nodes_[j] + inner_partial(j, xs[j], xs[j + 1]);
    } else {
        for (std::size_t j = segs; j-- > 0;) inner_nodes_[j] = inner_nodes_[j + 1] + inner_partial(j, xs[j], xs[j + 1]);
    }
}

double OperatorEvaluator::inner_partial(std::size_t seg, double a, double b) const {
    if (!(b > a)) return 0.0;
    const double p = problem_.p();
    const double x0 = f_.grid()[seg];
    const double y0 = f_.values()[seg];
    const double slope = f_.segment_slope(seg);
    RealFunction g = [&](double s) {
        const double y = std::max(0.0, y0 + slope * (s - x0));
        const double u = problem_.u_at(s);
        return y == 0.0 || u == 0.0 ? 0.0 : std::pow(y, p - 1.0) * u;
    };
    return integrate(g, a, b, problem_.quad());
}

double OperatorEvaluator::inner(double x) const {
    const std::size_t j = f_.segment_of(x);
    const auto xs = f_.grid();
    return nd_ ? inner_nodes_[j] + inner_partial(j, xs[j], x) : inner_nodes_[j + 1] + inner_partial(j, x, xs[j + 1]);
}

bool OperatorEvaluator::in_support(std::size_t seg) const {
    return f_.values()[seg] > 0.0 || f_.values()[seg + 1] > 0.0;
}

double OperatorEvaluator::outer_partial(std::size_t seg, double a, double b) const {
    if (!(b > a) || !in_support(seg)) return 0.0;
    const double ps = problem_.p_star();
    RealFunction g = [&](double s) {
        const double A = inner(s);
        return A > 0.0 ? problem_.v_hat(s) * std::pow(A, ps - 1.0) : 0.0;
    };
    return integrate(g, a, b, problem_.quad());
}

void OperatorEvaluator::build_outer() const {
    std::call_once(outer_once_, [this] {
        const auto xs = f_.grid();
        const std::size_t segs = f_.segments();
        outer_nodes_.assign(f_.size(), 0.0);
        if (nd_) {
            for (std::size_t j = segs; j-- > 0;)
                outer_nodes_[j] = outer_nodes_[j + 1] + outer_partial(j, xs[j], xs[j + 1]);
        } else {
            for (std::size_t j = 0; j < segs; ++j)
                outer_nodes_[j + 1] = outer_nodes_[j] + outer_partial(j, xs[j], xs[j + 1]);
        }
    });
}

double OperatorEvaluator::outer(double x) const {
    build_outer();
    const std::size_t j = f_.segment_of(x);
    const auto xs = f_.grid();
    return nd_ ? outer_nodes_[j + 1] + outer_partial(j, x, xs[j + 1]) : outer_nodes_[j] + outer_partial(j, xs[j], x);
}

void OperatorEvaluator::check_point(double x, const char* what) const {
    if (!(x > 0.0 && x < f_.right()))
        throw std::domain_error(std::string(what) + ": x = " + fmt(x) + " is not inside (0, T)");
}

double OperatorEvaluator::I(double x) const {
    check_point(x, "op_I");
    const double flux = problem_.v_at(x) * phi_p(f_.slope(x), problem_.p());
    if (flux == 0.0) return kInf;
    const double A = inner(x);
    return nd_ ? -A / flux : A / flux;
}

double OperatorEvaluator::II(double x) const {
    check_point(x, "op_II");
    const double fx = f_(x);
    if (!(fx > 0.0)) return kInf;
    const double p = problem_.p();
    return std::pow(outer(x) / fx, p - 1.0);
}

double op_I(const Problem& problem, const GridFunction& f, double x) { return OperatorEvaluator(problem, f).I(x); }

double op_II(const Problem& problem, const GridFunction& f, double x) { return OperatorEvaluator(problem, f).II(x); }

double op_R(const Problem& problem, const GridFunction& h, double x) {
    const double u = problem.u_at(x);
    if (u == 0.0) throw std::domain_error("op_R: u vanishes at x = " + fmt(x));
    const double p = problem.p();
    const double hx = h(x);
    const double bracket = r_bracket(problem, hx, h.derivative(x), x);
    if (hx == 0.0) {
        if (bracket == 0.0 || p > 2.0) return 0.0;
        if (p == 2.0) return -bracket / u;
        return bracket > 0.0 ? -kInf : kInf;
    }
    return -std::pow(std::abs(hx), p - 2.0) * bracket / u;
}

DirectedBound bound_from_test_function(const Problem& problem, const GridFunction& f, ClassTag tag,
                                       std::optional<Window> window) {
    ClassReport report = validate_class(problem, f, tag);
    if (!report.ok) throw ClassViolation(std::move(report));
    const double T = problem.truncation();
    const bool nd = tag.boundary == Boundary::ND;

    Window w{0.0, T};
    switch (tag.which) {
    case FunctionClass::Ftilde_I: w.hi = nd ? report.x1 : report.x0; break;
    case FunctionClass::Ftilde_II: w.hi = nd ? report.x0 : T; break;
    case FunctionClass::Htilde: w.hi = report.x0; break;
    default: break;
    }
    if (window) w = {std::max(w.lo, window->lo), std::min(w.hi, window->hi)};
    if (!(w.hi > w.lo)) throw std::invalid_argument("bound_from_test_function: empty search window");

    std::vector<double> xs;
    const auto nodes = f.grid();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
        if (nodes[i] > w.lo && nodes[i] < w.hi) xs.push_back(nodes[i]);
        if (mid > w.lo && mid < w.hi) xs.push_back(mid);
    }
    if (xs.empty()) xs.push_back(0.5 * (w.lo + w.hi));

    std::function<double(double)> op;
    std::unique_ptr<OperatorEvaluator> eval;
    if (tag.which == FunctionClass::H || tag.which == FunctionClass::Htilde) {
        op = [&](double x) { return op_R(problem, f, x); };
    } else {
        eval = std::make_unique<OperatorEvaluator>(problem, f);
        if (tag.which == FunctionClass::F_I || tag.which == FunctionClass::Ftilde_I)
            op = [&](double x) { return eval->I(x); };
        else
            op = [&](double x) { return eval->II(x); };
    }

    DirectedBound b;
    b.direction = is_modified(tag.which) ? Direction::Upper : Direction::Lower;
    const bool differential = tag.which == FunctionClass::H || tag.which == FunctionClass::Htilde;
    // Lower: 1/sup of I, II or inf of R. Upper: 1/inf of I, II or sup of R.
    const bool take_max = (b.direction == Direction::Lower) != differential;
    const Extremum e = take_max ? maximize_over(op, xs, w.lo, w.hi) : minimize_over(op, xs, w.lo, w.hi);
    b.operator_extremum = e.value;
    b.at = e.x;
    if (differential) b.value = e.value;
    else b.value = e.value == kInf ? 0.0 : (e.value > 0.0 ? 1.0 / e.value : kInf);
    return b;
}

} // namespace mixeig
