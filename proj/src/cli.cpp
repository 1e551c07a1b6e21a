#include "mixeig/cli.hpp"

#include "mixeig/exact.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace mixeig::cli {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double parse_number(std::string_view text, const char* what) {
    const std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(std::string(what) + ": trailing characters in '" + s + "'");
    return value;
}

WeightFn weight_from_json(const json& j, const char* what) {
    try {
        if (j.is_number()) return WeightFn::constant(j.get<double>());
        if (j.is_string()) return WeightFn::parse(j.get<std::string>());
        if (j.is_object()) {
            if (j.contains("expr")) return WeightFn::expression(j.at("expr").get<std::string>());
            const std::string name = lower(j.at("name").get<std::string>());
            std::vector<double> params = j.value("params", std::vector<double>{});
            auto param = [&](std::size_t i, double fallback) { return i < params.size() ? params[i] : fallback; };
            if (params.size() > 2) throw ConfigError(std::string(what) + ": at most two params");
            if (name == "const" || name == "constant") return WeightFn::constant(param(0, 1.0));
            if (name == "exp" || name == "exponential") return WeightFn::exponential(param(0, 1.0), param(1, 1.0));
            if (name == "pow" || name == "power") return WeightFn::power(param(0, 1.0), param(1, 1.0));
            throw ConfigError(std::string(what) + ": unknown builtin weight '" + name + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
    throw ConfigError(std::string(what) + ": expected a number, a string or an object");
}

double length_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_length(j.get<std::string>());
    throw ConfigError("problem.D: expected a number or \"inf\"");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

std::ostream& write_number(std::ostream& os, double x) {
    if (std::isnan(x)) return os << "nan";
    if (std::isinf(x)) return os << (x > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return os << buf;
}

double root(double x, double p) { return std::isinf(x) ? x : std::pow(x, 1.0 / p); }

double inverse(double x) { return x == kInf ? 0.0 : 1.0 / x; }

class Checker {
public:
    explicit Checker(double slack) : slack_(slack) {}

    /// a <= b up to relative slack.
    void le(const std::string& name, double a, double b) {
        const bool ok = a <= b + slack_ * std::max(std::abs(a), std::abs(b));
        record(ok, name + ": " + fmt(a) + " <= " + fmt(b));
    }
    void close(const std::string& name, double a, double b, double tol) {
        const bool ok = std::abs(a - b) <= tol * std::abs(b);
        record(ok, name + ": " + fmt(a) + " vs " + fmt(b) + " (tol " + fmt(tol) + ")");
    }
    void note(const std::string& text) { cert_.lines.push_back("[info] " + text); }

    Certificate result() const { return cert_; }

private:
    void record(bool ok, const std::string& text) {
        cert_.ok = cert_.ok && ok;
        cert_.lines.push_back((ok ? "[ok]   " : "[FAIL] ") + text);
    }

    double slack_;
    Certificate cert_;
};

void write_report(const RunConfig& config, std::ostream& out, const std::string& body) {
    const std::string text = "# " + config.header() + "\n" + body;
    if (config.out) {
        std::ofstream file(*config.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file '" + *config.out + "'");
        file << text;
    } else {
        out << text;
    }
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::Bounds: return "bounds";
    case Command::Iterate: return "iterate";
    case Command::Shoot: return "shoot";
    case Command::Figure: return "figure";
    case Command::Certify: return "certify";
    }
    return "?";
}

Command parse_command(std::string_view text) {
    const std::string s = lower(text);
    for (Command c : {Command::Bounds, Command::Iterate, Command::Shoot, Command::Figure, Command::Certify})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown command '" + std::string(text) + "' (expected bounds, iterate, shoot, figure or certify)");
}

std::vector<double> PRange::values() const {
    std::vector<double> out;
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
}

std::string PRange::text() const { return fmt(lo) + ":" + fmt(hi) + ":" + fmt(step); }

PRange parse_p_range(std::string_view text) {
    const std::string s(text);
    const auto a = s.find(':');
    const auto b = a == std::string::npos ? std::string::npos : s.find(':', a + 1);
    if (b == std::string::npos || s.find(':', b + 1) != std::string::npos)
        throw ConfigError("p-range: expected LO:HI:STEP, got '" + s + "'");
    PRange r{parse_number(s.substr(0, a), "p-range"), parse_number(s.substr(a + 1, b - a - 1), "p-range"),
             parse_number(s.substr(b + 1), "p-range")};
    if (!(r.lo > 1.0) || !(r.hi >= r.lo) || !(r.step > 0.0) || !std::isfinite(r.hi))
        throw ConfigError("p-range: need 1 < LO <= HI and STEP > 0, got '" + s + "'");
    if ((r.hi - r.lo) / r.step > 100000.0) throw ConfigError("p-range: more than 100000 rows");
    return r;
}

double parse_length(std::string_view text) {
    const std::string s = lower(text);
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    const double d = parse_number(s, "D");
    if (!(d > 0.0)) throw ConfigError("D must be positive, got '" + std::string(text) + "'");
    return d;
}

void RunConfig::validate() const {
    if (p_range && command != Command::Figure) throw ConfigError("a p-range is only accepted by the figure command");
    if (!p_range && command == Command::Figure) throw ConfigError("figure needs a p-range (--p-range LO:HI:STEP)");
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must be a finite real > 1, got " + fmt(p));
    if (!(D > 0.0)) throw ConfigError("D must be positive");
    if (!(rel_tol > 0.0 && rel_tol < 1e-2)) throw ConfigError("rel-tol must lie in (0, 1e-2)");
    if (grid < 16) throw ConfigError("grid must be >= 16");
    if (grid_m < 2) throw ConfigError("grid-m must be >= 2");
    if (n_max < 1 || n_max > 1000) throw ConfigError("n-max must lie in [1, 1000]");
    if (upper_n_max < 1 || upper_n_max > 50) throw ConfigError("upper-n-max must lie in [1, 50]");
}

ProblemSpec RunConfig::problem_spec(double p_value) const {
    ProblemSpec spec;
    spec.u = u;
    spec.v = v;
    spec.D = D;
    spec.p = p_value;
    spec.boundary = boundary;
    spec.quad.rel_tol = rel_tol;
    return spec;
}

ShootConfig RunConfig::shoot_config() const {
    ShootConfig cfg;
    cfg.rel_tol = std::min(1e-11, rel_tol / 10.0);
    return cfg;
}

IterateConfig RunConfig::iterate_config() const {
    IterateConfig cfg;
    cfg.cells = grid;
    return cfg;
}

std::string RunConfig::header() const {
    std::ostringstream os;
    os << "mixeig " << to_string(command);
    if (p_range)
        os << " --p-range " << p_range->text();
    else
        os << " --p " << fmt(p);
    os << " --case " << to_string(boundary) << " --u '" << u.describe() << "' --v '" << v.describe() << "' --D "
       << (std::isinf(D) ? std::string("inf") : fmt(D)) << " --rel-tol " << fmt(rel_tol) << " --grid " << grid
       << " --grid-m " << grid_m << " --n-max " << n_max << " --upper-n-max " << upper_n_max;
    if (out) os << " --out " << *out;
    return os.str();
}

RunConfig parse_config(const std::string& json_text, RunConfig base) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig c = std::move(base);
    try {
        check_keys(j, {"command", "problem", "p_range", "tolerances", "grid", "iterate", "output", "threads"}, "config");
        if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
        if (j.contains("problem")) {
            const json& pj = j.at("problem");
            check_keys(pj, {"u", "v", "D", "p", "case"}, "problem");
            if (pj.contains("u")) c.u = weight_from_json(pj.at("u"), "problem.u");
            if (pj.contains("v")) c.v = weight_from_json(pj.at("v"), "problem.v");
            if (pj.contains("D")) c.D = length_from_json(pj.at("D"));
            if (pj.contains("p")) c.p = pj.at("p").get<double>();
            if (pj.contains("case")) c.boundary = parse_boundary(pj.at("case").get<std::string>());
        }
        if (j.contains("p_range")) {
            const json& r = j.at("p_range");
            if (r.is_string()) {
                c.p_range = parse_p_range(r.get<std::string>());
            } else {
                check_keys(r, {"lo", "hi", "step"}, "p_range");
                c.p_range = parse_p_range(fmt(r.at("lo").get<double>()) + ":" + fmt(r.at("hi").get<double>()) + ":" +
                                          fmt(r.at("step").get<double>()));
            }
        }
        if (j.contains("tolerances")) {
            check_keys(j.at("tolerances"), {"rel_tol"}, "tolerances");
            c.rel_tol = j.at("tolerances").value("rel_tol", c.rel_tol);
        }
        if (j.contains("grid")) {
            check_keys(j.at("grid"), {"cells", "m"}, "grid");
            c.grid = j.at("grid").value("cells", c.grid);
            c.grid_m = j.at("grid").value("m", c.grid_m);
        }
        if (j.contains("iterate")) {
            check_keys(j.at("iterate"), {"n_max", "upper_n_max"}, "iterate");
            c.n_max = j.at("iterate").value("n_max", c.n_max);
            c.upper_n_max = j.at("iterate").value("upper_n_max", c.upper_n_max);
        }
        if (j.contains("output")) c.out = j.at("output").get<std::string>();
        if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

bool row_ordered(const SweepRow& r, double slack) {
    auto le = [slack](double a, double b) { return a <= b + slack * std::max(std::abs(a), std::abs(b)); };
    const double upper = std::min(r.delta1_prime_inv_root, r.bar_delta1_inv_root);
    return le(r.basic_lower_root, r.delta1_inv_root) && le(r.delta1_inv_root, r.lambda_root) && le(r.lambda_root, upper) &&
           le(upper, r.basic_upper_root);
}

bool has_closed_form(const RunConfig& config) {
    return config.u.is_constant(1.0) && config.v.is_constant(1.0) && config.D == 1.0;
}

SweepRow sweep_row(const RunConfig& config, double p) {
    const Problem problem(config.problem_spec(p));
    const BoundsReport b = compute_bounds(problem);
    SweepRow row;
    row.p = p;
    row.sigma_root = root(b.sigma_p, p);
    row.basic_lower_root = root(b.basic_lower, p);
    row.basic_upper_root = root(b.basic_upper, p);
    row.delta1_inv_root = root(inverse(b.delta1), p);
    row.delta1_prime_inv_root = root(inverse(b.delta1_prime), p);
    row.bar_delta1_inv_root = root(inverse(b.bar_delta1), p);
    row.lambda_root = b.positivity ? root(solve_eigenvalue(problem, config.shoot_config()).lambda, p) : 0.0;
    if (has_closed_form(config)) row.exact_lambda_root = exact_values(p).lambda_root;
    return row;
}

std::vector<SweepRow> sweep(const RunConfig& config) {
    const std::vector<double> ps = config.p_range ? config.p_range->values() : std::vector<double>{config.p};
    std::vector<SweepRow> rows(ps.size());
    std::vector<std::exception_ptr> errors(ps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ps.size(); i = next++) {
            try {
                rows[i] = sweep_row(config, ps[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(ps.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

const char* const kCsvHeader = "p,sigma_root,basic_lower_root,basic_upper_root,delta1_inv_root,delta1_prime_inv_root,"
                               "bar_delta1_inv_root,lambda_root,exact_lambda_root";

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        for (double x : {r.p, r.sigma_root, r.basic_lower_root, r.basic_upper_root, r.delta1_inv_root,
                         r.delta1_prime_inv_root, r.bar_delta1_inv_root, r.lambda_root}) {
            write_number(os, x);
            os << ',';
        }
        if (r.exact_lambda_root) write_number(os, *r.exact_lambda_root);
        os << '\n';
    }
}

Certificate certify(const RunConfig& config, double slack) {
    const Problem problem(config.problem_spec(config.p));
    const BoundsReport b = compute_bounds(problem);
    Checker check(slack);
    check.note(problem.describe());
    if (!b.positivity) {
        check.note("sigma_p = inf, so lambda_p = 0");
        check.le("basic upper bound is 0", b.basic_upper, 0.0);
        check.le("basic lower bound is 0", b.basic_lower, 0.0);
        const ShootResult s = solve_eigenvalue(problem, config.shoot_config());
        check.note("eigenvalue of the problem truncated at T = " + fmt(s.truncation) + ": " + fmt(s.lambda));
        return check.result();
    }
    const double p = problem.p();
    const double k = problem.exponent().k_p();
    const double sigma = b.sigma_p;
    const ShootResult s = solve_eigenvalue(problem, config.shoot_config());
    const double lambda = s.lambda;
    check.note("lambda (shooting) = " + fmt(lambda));

    check.le("1/(k sigma) <= 1/delta1", 1.0 / (k * sigma), 1.0 / b.delta1);
    check.le("1/delta1 <= lambda", 1.0 / b.delta1, lambda);
    check.le("lambda <= 1/delta1'", lambda, 1.0 / b.delta1_prime);
    check.le("1/delta1' <= 1/sigma", 1.0 / b.delta1_prime, 1.0 / sigma);
    check.le("lambda <= 1/bar delta1", lambda, 1.0 / b.bar_delta1);
    check.le("sigma <= bar delta1", sigma, b.bar_delta1);
    check.le("bar delta1 <= p sigma", b.bar_delta1, p * sigma);
    if (has_closed_form(config)) check.close("lambda matches the closed form", lambda, exact_lambda(p), 1e-6);

    const IterationState lower = iterate_lower(problem, config.n_max, config.iterate_config());
    check.close("delta1 from the iteration matches the bounds", lower.history.front().second, b.delta1, 1e-6);
    for (std::size_t i = 0; i < lower.history.size(); ++i) {
        const auto [n, d] = lower.history[i];
        check.le("1/delta_" + std::to_string(n) + " <= lambda", 1.0 / d, lambda);
        if (i > 0) check.le("delta_" + std::to_string(n) + " <= delta_" + std::to_string(n - 1), d, lower.history[i - 1].second);
    }
    const UpperSequence upper = iterate_upper(problem, config.upper_n_max, config.grid_m, config.iterate_config());
    for (std::size_t i = 0; i < upper.delta_prime.size(); ++i) {
        const std::string n = std::to_string(i + 1);
        check.le("lambda <= 1/delta'_" + n, lambda, 1.0 / upper.delta_prime[i].value);
        check.le("lambda <= 1/bar delta_" + n, lambda, 1.0 / upper.bar_delta[i].value);
        if (i > 0) {
            const std::string m = std::to_string(i);
            check.le("delta'_" + m + " <= delta'_" + n, upper.delta_prime[i - 1].value, upper.delta_prime[i].value);
            check.le("delta'_" + m + " <= bar delta_" + n, upper.delta_prime[i - 1].value, upper.bar_delta[i].value);
        }
    }
    const double lo = std::max(b.lower_best, 1.0 / lower.delta_n);
    double hi = b.upper_best;
    for (const auto& d : upper.delta_prime) hi = std::min(hi, 1.0 / d.value);
    for (const auto& d : upper.bar_delta) hi = std::min(hi, 1.0 / d.value);
    check.note("certified bracket: " + fmt(lo) + " <= lambda_p <= " + fmt(hi));
    return check.result();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        switch (config.command) {
        case Command::Bounds: {
            write_report(config, out, compute_bounds(Problem(config.problem_spec(config.p))).describe());
            return kExitOk;
        }
        case Command::Shoot: {
            write_report(config, out, solve_eigenvalue(Problem(config.problem_spec(config.p)), config.shoot_config()).describe());
            return kExitOk;
        }
        case Command::Iterate: {
            const Problem problem(config.problem_spec(config.p));
            if (!std::isfinite(sigma_p(problem))) {
                write_report(config, out, "sigma_p = inf: lambda_p = 0, nothing to iterate\n");
                return kExitOk;
            }
            const IterationState lower = iterate_lower(problem, config.n_max, config.iterate_config());
            const UpperSequence upper = iterate_upper(problem, config.upper_n_max, config.grid_m, config.iterate_config());
            write_report(config, out, lower.describe() + upper.describe());
            return kExitOk;
        }
        case Command::Figure: {
            const std::vector<SweepRow> rows = sweep(config);
            std::ostringstream csv;
            write_csv(csv, rows);
            if (config.out) {
                std::ofstream file(*config.out, std::ios::binary);
                if (!file) throw std::runtime_error("cannot open output file '" + *config.out + "'");
                file << csv.str();
            } else {
                out << csv.str();
            }
            int status = kExitOk;
            for (const SweepRow& r : rows)
                if (!row_ordered(r)) {
                    err << "ordering violated at p = " << fmt(r.p) << "\n";
                    status = kExitViolation;
                }
            return status;
        }
        case Command::Certify: {
            const Certificate c = certify(config);
            std::string body;
            for (const auto& line : c.lines) body += line + "\n";
            body += c.ok ? "certified\n" : "chain violated\n";
            write_report(config, out, body);
            return c.ok ? kExitOk : kExitViolation;
        }
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << "\n";
        return kExitCompute;
    }
    return kExitCompute;
}

int main(int argc, char** argv) {
    CLI::App app{"Bounds and approximations for the principal eigenvalue of the weighted one-dimensional p-Laplacian"};
    std::string command, config_path, p_range, boundary, u, v, D, out;
    double p = 0.0, rel_tol = 0.0;
    int grid = 0, grid_m = 0, n_max = 0, upper_n_max = 0;
    unsigned threads = 0;
    app.add_option("command", command, "bounds | iterate | shoot | figure | certify");
    app.add_option("--config", config_path, "JSON configuration file; flags override it");
    auto* p_opt = app.add_option("--p", p, "Exponent p > 1");
    auto* range_opt = app.add_option("--p-range", p_range, "LO:HI:STEP grid of exponents (figure)");
    auto* case_opt = app.add_option("--case", boundary, "nd (Neumann at 0, Dirichlet at D) or dn");
    auto* u_opt = app.add_option("--u", u, "Weight u: number, const:C, exp:R, pow:E or an expression in x");
    auto* v_opt = app.add_option("--v", v, "Weight v, same syntax as --u");
    auto* d_opt = app.add_option("--D", D, "Right endpoint: a positive real or inf");
    auto* out_opt = app.add_option("--out", out, "Write the report or CSV to this path");
    auto* tol_opt = app.add_option("--rel-tol", rel_tol, "Relative quadrature tolerance");
    auto* grid_opt = app.add_option("--grid", grid, "Mesh cells of the iterations");
    auto* m_opt = app.add_option("--grid-m", grid_m, "Coarse grid size of the family search");
    auto* n_opt = app.add_option("--n-max", n_max, "Maximum number of iterations");
    auto* un_opt = app.add_option("--upper-n-max", upper_n_max, "Steps of the family sequences");
    auto* t_opt = app.add_option("--threads", threads, "Worker threads for figure sweeps (0 = all cores)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    RunConfig config;
    bool command_set = false;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            config = parse_config(ss.str());
            command_set = json::parse(ss.str(), nullptr, false, true).contains("command");
        }
        if (!command.empty()) {
            config.command = parse_command(command);
            command_set = true;
        }
        if (!command_set) throw ConfigError("no command given (bounds, iterate, shoot, figure or certify)");
        if (p_opt->count()) config.p = p;
        if (range_opt->count()) config.p_range = parse_p_range(p_range);
        try {
            if (case_opt->count()) config.boundary = parse_boundary(boundary);
            if (u_opt->count()) config.u = WeightFn::parse(u);
            if (v_opt->count()) config.v = WeightFn::parse(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (d_opt->count()) config.D = parse_length(D);
        if (out_opt->count()) config.out = out;
        if (tol_opt->count()) config.rel_tol = rel_tol;
        if (grid_opt->count()) config.grid = grid;
        if (m_opt->count()) config.grid_m = grid_m;
        if (n_opt->count()) config.n_max = n_max;
        if (un_opt->count()) config.upper_n_max = upper_n_max;
        if (t_opt->count()) config.threads = threads;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return run(config, std::cout, std::cerr);
}

} // namespace mixeig::cli
