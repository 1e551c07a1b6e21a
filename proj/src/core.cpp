#include "mixeig/core.hpp"

#include "mixeig/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mixeig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(15);
    os << x;
    return os.str();
}

// Smallest T (to 0.1%) with tail(T) <= tol * total, where tail(T) is the integral of w over [T, inf).
double tail_truncation(const RealFunction& w, double total, double tol, const QuadConfig& cfg) {
    const double target = tol * total;
    auto tail = [&](double T) { return integrate_to_infinity(w, T, cfg); };
    double hi = 1.0;
    int doublings = 0;
    while (tail(hi) > target) {
        hi *= 2.0;
        if (++doublings > 60) throw std::runtime_error("truncation search: tail does not decay");
    }
    if (doublings == 0) return hi;
    double lo = hi / 2.0;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

} // namespace

double conjugate(double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::domain_error("conjugate: exponent must satisfy 1 < p < inf, got " + fmt(p));
    return p / (p - 1.0);
}

Exponent::Exponent(double p) : p_(p), p_star_(conjugate(p)), k_p_(p * std::pow(p_star_, p - 1.0)) {}

std::string to_string(Boundary b) { return b == Boundary::ND ? "nd" : "dn"; }

Boundary parse_boundary(std::string_view text) {
    std::string s = trim(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "nd") return Boundary::ND;
    if (s == "dn") return Boundary::DN;
    throw std::invalid_argument("boundary case must be 'nd' or 'dn', got '" + std::string(text) + "'");
}

WeightFn::WeightFn(Kind kind, std::vector<double> params, std::shared_ptr<const Expression> expr)
    : kind_(kind), params_(std::move(params)), expr_(std::move(expr)) {}

WeightFn WeightFn::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("constant weight must be positive and finite");
    return WeightFn(Kind::Constant, {c});
}

WeightFn WeightFn::exponential(double rate, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(rate))
        throw std::invalid_argument("exponential weight needs finite rate and positive scale");
    return WeightFn(Kind::Exponential, {rate, scale});
}

WeightFn WeightFn::power(double exponent, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(exponent))
        throw std::invalid_argument("power weight needs finite exponent and positive scale");
    return WeightFn(Kind::Power, {exponent, scale});
}

WeightFn WeightFn::expression(std::string_view text) {
    auto e = std::make_shared<const Expression>(Expression::parse(text));
    return WeightFn(Kind::Expression, {}, std::move(e));
}

WeightFn WeightFn::parse(std::string_view spec) {
    const std::string s = trim(spec);
    double value = 0.0;
    if (parse_real(s, value)) return constant(value);
    auto prefixed = [&](std::string_view prefix, double& out) {
        if (s.rfind(prefix, 0) != 0) return false;
        const std::string rest = trim(std::string_view(s).substr(prefix.size()));
        if (!parse_real(rest, out)) throw std::invalid_argument("bad parameter in weight '" + s + "'");
        return true;
    };
    if (prefixed("const:", value)) return constant(value);
    if (prefixed("exp:", value)) return exponential(value);
    if (prefixed("pow:", value)) return power(value);
    return expression(s);
}

double WeightFn::operator()(double x) const {
    switch (kind_) {
    case Kind::Constant: return params_[0];
    case Kind::Exponential: return params_[1] * std::exp(params_[0] * x);
    case Kind::Power: return params_[1] * std::pow(x, params_[0]);
    case Kind::Expression: return (*expr_)(x);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double WeightFn::derivative(double x) const {
    switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Exponential: return params_[0] * params_[1] * std::exp(params_[0] * x);
    case Kind::Power:
        return params_[0] == 0.0 ? 0.0 : params_[0] * params_[1] * std::pow(x, params_[0] - 1.0);
    case Kind::Expression: {
        const double h = 1e-6 * (1.0 + std::abs(x));
        return ((*expr_)(x + h) - (*expr_)(x - h)) / (2.0 * h);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool WeightFn::is_constant(double c) const noexcept { return kind_ == Kind::Constant && params_[0] == c; }

std::string WeightFn::describe() const {
    switch (kind_) {
    case Kind::Constant: return "const:" + fmt(params_[0]);
    case Kind::Exponential:
        return params_[1] == 1.0 ? "exp:" + fmt(params_[0]) : fmt(params_[1]) + "*exp(" + fmt(params_[0]) + "*x)";
    case Kind::Power:
        return params_[1] == 1.0 ? "pow:" + fmt(params_[0]) : fmt(params_[1]) + "*x^" + fmt(params_[0]);
    case Kind::Expression: return expr_->text();
    }
    return {};
}

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)), exponent_(spec_.p) {
    spec_.quad.validate();
    if (!(spec_.D > 0.0)) throw std::invalid_argument("Problem: D must be positive (or inf)");
    if (!(spec_.tail_tol > 0.0 && spec_.tail_tol < 1.0))
        throw std::invalid_argument("Problem: tail_tol must lie in (0, 1)");
    if (spec_.table_cells < 8) throw std::invalid_argument("Problem: table_cells must be >= 8");

    const double p_star = exponent_.p_star();
    const WeightFn v = spec_.v;
    RealFunction v_hat = [v, p_star](double x) { return std::pow(v(x), 1.0 - p_star); };
    const WeightFn u = spec_.u;
    RealFunction u_fn = [u](double x) { return u(x); };

    if (std::isfinite(spec_.D)) {
        if (spec_.truncation && *spec_.truncation != spec_.D)
            throw std::invalid_argument("Problem: truncation must equal D when D is finite");
        truncation_ = spec_.D;
    } else {
        mu_total_ = integrate_to_infinity(u_fn, 0.0, spec_.quad);
        nu_hat_total_ = integrate_to_infinity(v_hat, 0.0, spec_.quad);
        if (spec_.truncation) {
            truncation_ = *spec_.truncation;
            if (!(truncation_ > 0.0) || !std::isfinite(truncation_))
                throw std::invalid_argument("Problem: truncation must be finite and positive");
        } else {
            const bool nd = spec_.boundary == Boundary::ND;
            const double total = nd ? nu_hat_total_ : mu_total_;
            truncation_ = std::isfinite(total)
                              ? tail_truncation(nd ? v_hat : u_fn, total, spec_.tail_tol, spec_.quad)
                              : kFallbackTruncation;
        }
    }

    std::vector<double> grid = clustered_grid(truncation_, spec_.table_cells);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid[i];
        const double ux = u(x);
        const double vx = v(x);
        if (!(ux >= 0.0) || !std::isfinite(ux))
            throw std::invalid_argument("Problem: weight u must be nonnegative and finite, u(" + fmt(x) + ") = " + fmt(ux));
        if (!(vx > 0.0) || !std::isfinite(vx))
            throw std::invalid_argument("Problem: weight v must be positive and finite, v(" + fmt(x) + ") = " + fmt(vx));
    }
    try {
        CumulativeTable mu_table(grid, u_fn, spec_.quad);
        CumulativeTable nu_table(grid, v_hat, spec_.quad);
        tables_ = std::make_shared<const Tables>(Tables{std::move(grid), std::move(mu_table), std::move(nu_table)});
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("Problem: weight not locally integrable: ") + e.what());
    }
    if (std::isfinite(spec_.D)) {
        mu_total_ = tables_->mu.total();
        nu_hat_total_ = tables_->nu_hat.total();
    }
}

double Problem::v_hat(double x) const { return std::pow(spec_.v(x), 1.0 - exponent_.p_star()); }

void Problem::check_interval(double a, double b, const char* what) const {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument(std::string(what) + ": NaN argument");
    if (a > b) throw std::invalid_argument(std::string(what) + ": a > b");
    if (a < 0.0 || b > spec_.D) throw std::domain_error(std::string(what) + ": interval outside [0, D]");
}

double Problem::mu(double a, double b) const {
    check_interval(a, b, "mu");
    const double T = truncation_;
    double inside = 0.0;
    if (a < T) inside = tables_->mu.between(a, std::min(b, T));
    if (b <= T) return inside;
    const WeightFn& u = spec_.u;
    RealFunction f = [&u](double x) { return u(x); };
    const double from = std::max(a, T);
    const double outside = std::isfinite(b) ? integrate(f, from, b, spec_.quad) : integrate_to_infinity(f, from, spec_.quad);
    return inside + outside;
}

double Problem::nu_hat(double a, double b) const {
    check_interval(a, b, "nu_hat");
    const double T = truncation_;
    double inside = 0.0;
    if (a < T) inside = tables_->nu_hat.between(a, std::min(b, T));
    if (b <= T) return inside;
    RealFunction f = [this](double x) { return v_hat(x); };
    const double from = std::max(a, T);
    const double outside = std::isfinite(b) ? integrate(f, from, b, spec_.quad) : integrate_to_infinity(f, from, spec_.quad);
    return inside + outside;
}

bool Problem::degenerate() const noexcept {
    return spec_.boundary == Boundary::ND ? !std::isfinite(nu_hat_total_) : !std::isfinite(mu_total_);
}

double Problem::mu_neumann(double x) const {
    return spec_.boundary == Boundary::ND ? tables_->mu.from_left(x) : tables_->mu.from_right(x);
}

double Problem::nu_hat_dirichlet(double x) const {
    return spec_.boundary == Boundary::ND ? tables_->nu_hat.from_right(x) : tables_->nu_hat.from_left(x);
}

Problem Problem::with_p(double p) const {
    ProblemSpec s = spec_;
    s.p = p;
    if (infinite_domain() && !spec_.truncation) s.truncation.reset();
    return Problem(std::move(s));
}

Problem Problem::with_truncation(double T) const {
    ProblemSpec s = spec_;
    if (std::isfinite(s.D)) s.D = T;
    else s.truncation = T;
    return Problem(std::move(s));
}

std::string Problem::describe() const {
    std::ostringstream os;
    os << "u=" << spec_.u.describe() << " v=" << spec_.v.describe() << " D=" << (infinite_domain() ? "inf" : fmt(spec_.D))
       << " p=" << fmt(exponent_.p()) << " case=" << to_string(spec_.boundary) << " T=" << fmt(truncation_);
    return os.str();
}

} // namespace mixeig
