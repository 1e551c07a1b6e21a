#include "mixeig/bounds.hpp"
#include "mixeig/cli.hpp"
#include "mixeig/exact.hpp"
#include "mixeig/iterate.hpp"
#include "mixeig/operators.hpp"
#include "mixeig/shoot.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace mixeig;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

Problem unit(double p, Boundary b = Boundary::ND) {
    ProblemSpec s;
    s.p = p;
    s.boundary = b;
    return Problem(s);
}

Problem exponential_half_line(Boundary b = Boundary::ND) {
    ProblemSpec s;
    s.u = WeightFn::exponential(-1.0);
    s.v = WeightFn::exponential(1.0);
    s.D = std::numeric_limits<double>::infinity();
    s.boundary = b;
    return Problem(s);
}

/// Collects failed checks of one criterion.
struct Check {
    std::vector<std::string> failures;

    void operator()(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

constexpr double kSlack = 1.0 + 1e-6;

void chain(Check& check, const Problem& pr, const std::string& name) {
    const BoundsReport r = compute_bounds(pr);
    const double lambda = solve_eigenvalue(pr).lambda;
    const double k = pr.exponent().k_p();
    const double p = pr.exponent().p();
    check(1.0 / (k * r.sigma_p) <= kSlack / r.delta1, name + ": (k sigma)^-1 <= 1/delta1");
    check(1.0 / r.delta1 <= kSlack * lambda, name + ": 1/delta1 <= lambda");
    check(lambda <= kSlack / r.delta1_prime, name + ": lambda <= 1/delta1'");
    check(1.0 / r.delta1_prime <= kSlack / r.sigma_p, name + ": 1/delta1' <= 1/sigma");
    check(lambda <= kSlack / r.bar_delta1, name + ": lambda <= 1/bar delta1");
    check(r.sigma_p <= kSlack * r.bar_delta1, name + ": sigma <= bar delta1");
    check(r.bar_delta1 <= kSlack * p * r.sigma_p, name + ": bar delta1 <= p sigma");
}

void criterion_1(Check& check) {
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lambda = solve_eigenvalue(unit(p)).lambda;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check(rel_err(lambda, exact_lambda(p)) <= 1e-6, "p=" + num(p) + " lambda " + num(lambda));
        check(secs < 5.0, "p=" + num(p) + " took " + num(secs) + " s");
    }
}

void criterion_2(Check& check) {
    for (double p : {1.2, 2.0, 4.0, 8.0}) {
        const double ps = p / (p - 1.0);
        const double expected = std::pow(std::pow(1.0 / p, 1.0 / p) * std::pow(1.0 / ps, 1.0 / ps), p);
        const double got = sigma_p(unit(p));
        check(rel_err(got, expected) <= 1e-8, "p=" + num(p) + " sigma " + num(got) + " vs " + num(expected));
    }
}

void criterion_3(Check& check) {
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const double expected = std::pow(std::pow(p, 1.0 / p - 2.0) * std::pow(p * p - 1.0, 1.0 - 1.0 / p), p);
        const double iterated = rayleigh_bar_delta(unit(p), 1);
        const double bound = compute_bounds(unit(p)).bar_delta1;
        check(rel_err(iterated, expected) <= 1e-5, "p=" + num(p) + " rayleigh_bar_delta " + num(iterated));
        check(rel_err(bound, expected) <= 1e-5, "p=" + num(p) + " bar_delta1 " + num(bound));
    }
}

void criterion_4(Check& check) {
    for (double p : {1.5, 2.0, 3.0}) chain(check, unit(p), "unit p=" + num(p));
    chain(check, exponential_half_line(), "exponential half line");
}

void criterion_5(Check& check) {
    for (double p : {1.5, 3.0}) {
        const Problem pr = unit(p);
        IterateConfig cfg;
        cfg.stop_rel = 0.0;
        const IterationState low = iterate_lower(pr, 4, cfg);
        check(low.history.size() == 4, "p=" + num(p) + " four lower steps");
        for (std::size_t i = 1; i < low.history.size(); ++i)
            check(low.history[i].second <= low.history[i - 1].second * kSlack, "p=" + num(p) + " delta_n descending");
        const UpperSequence up = iterate_upper(pr, 3);
        for (std::size_t i = 1; i < up.delta_prime.size(); ++i)
            check(up.delta_prime[i - 1].value <= up.delta_prime[i].value * kSlack, "p=" + num(p) + " delta'_n ascending");
        check(up.delta_prime[0].value <= up.bar_delta[1].value * kSlack, "p=" + num(p) + " bar delta2 >= delta1'");
    }
    const Problem pr = unit(2.0);
    const double lambda = solve_eigenvalue(pr).lambda;
    const IterationState st = iterate_lower(pr, 20);
    check(rel_err(1.0 / st.delta_n, lambda) <= 1e-4, "p=2 1/delta_" + std::to_string(st.n) + " = " + num(1.0 / st.delta_n));
}

void criterion_6(Check& check) {
    const double b2 = bar_delta1(unit(2.0)), d2 = delta1_prime(unit(2.0));
    check(rel_err(b2, d2) <= 1e-6, "p=2 bar delta1 " + num(b2) + " vs delta1' " + num(d2));
    check(bar_delta1(unit(1.5)) <= delta1_prime(unit(1.5)), "p=1.5 bar delta1 <= delta1'");
    check(bar_delta1(unit(3.0)) >= delta1_prime(unit(3.0)), "p=3 bar delta1 >= delta1'");
}

void criterion_7(Check& check) {
    ProblemSpec s;
    s.D = std::numeric_limits<double>::infinity();
    const Problem pr(s);
    check(std::isinf(sigma_p(pr)), "sigma_p is not infinite");
    const auto [lo, hi] = basic_bounds(pr);
    check(lo == 0.0 && hi == 0.0, "basic bounds " + num(lo) + ", " + num(hi));
    double prev = std::numeric_limits<double>::infinity();
    for (double T : {10.0, 20.0, 40.0}) {
        const double lambda = solve_eigenvalue(pr.with_truncation(T)).lambda;
        check(lambda < prev, "T=" + num(T) + " lambda " + num(lambda) + " not decreasing");
        prev = lambda;
    }
    check(prev < 2e-3, "lambda(40) = " + num(prev));
}

void criterion_8(Check& check) {
    for (double p : {2.0, 3.0}) {
        const double nd = solve_eigenvalue(unit(p)).lambda, dn = solve_eigenvalue(unit(p, Boundary::DN)).lambda;
        check(rel_err(dn, nd) <= 1e-8, "p=" + num(p) + " DN " + num(dn) + " vs ND " + num(nd));
    }
    for (double p : {1.5, 2.0, 3.0}) chain(check, unit(p, Boundary::DN), "DN unit p=" + num(p));
    chain(check, exponential_half_line(Boundary::DN), "DN exponential half line");
}

void criterion_9(Check& check) {
    const Problem pr = unit(2.0);
    const ShootResult s = solve_eigenvalue(pr);
    const OperatorEvaluator eval(pr, s.g);
    const auto xs = s.g.grid();
    std::vector<double> hv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) hv[i] = s.g.values()[i] > 0.0 ? s.dg.values()[i] / s.g.values()[i] : 0.0;
    const GridFunction h(std::vector<double>(xs.begin(), xs.end()), hv);
    double worst_II = 0.0, worst_R = 0.0;
    constexpr int kPoints = 4096;
    for (int i = 1; i < kPoints; ++i) {
        const double x = static_cast<double>(i) / kPoints;
        worst_II = std::max(worst_II, std::abs(s.lambda * eval.II(x) - 1.0));
        if (x >= 0.05 && x <= 0.95) worst_R = std::max(worst_R, std::abs(op_R(pr, h, x) - s.lambda) / s.lambda);
    }
    check(worst_II <= 5e-3, "max |lambda II - 1| = " + num(worst_II));
    check(worst_R <= 5e-3, "max |R - lambda| / lambda = " + num(worst_R));
}

void criterion_10(Check& check) {
    cli::RunConfig c;
    c.command = cli::Command::Figure;
    c.p_range = cli::parse_p_range("1.1:8:0.1");
    const auto rows = cli::sweep(c);
    std::ostringstream csv;
    cli::write_csv(csv, rows);
    check(rows.size() == 70, "rows: " + std::to_string(rows.size()));

    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    check(line == cli::kCsvHeader, "CSV header");
    std::size_t parsed = 0;
    while (std::getline(in, line)) {
        std::vector<double> col;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) col.push_back(std::stod(field));
        ++parsed;
        if (col.size() != 9) {
            check(false, "malformed row: " + line);
            continue;
        }
        cli::SweepRow r{col[0], col[1], col[2], col[3], col[4], col[5], col[6], col[7], col[8]};
        check(cli::row_ordered(r), "ordering at p=" + num(r.p));
        check(rel_err(r.lambda_root, exact_values(r.p).lambda_root) <= 1e-6, "lambda column at p=" + num(r.p));
        check(rel_err(*r.exact_lambda_root, exact_values(r.p).lambda_root) <= 1e-12, "exact column at p=" + num(r.p));
    }
    check(parsed == 70, "CSV data lines: " + std::to_string(parsed));
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"closed-form eigenvalue reproduction", criterion_1},
        {"sigma_p closed form", criterion_2},
        {"bar delta_1 closed form", criterion_3},
        {"inequality chain", criterion_4},
        {"monotone sequences", criterion_5},
        {"p = 2 coincidence and ordering flip", criterion_6},
        {"positivity criterion", criterion_7},
        {"DN mirror and symmetry", criterion_8},
        {"eigenfunction operator fixed points", criterion_9},
        {"figure reproduction", criterion_10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(check);
        } catch (const std::exception& e) {
            check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = check.failures.empty();
        failed += !ok;
        std::printf("%s criterion %zu: %s (%.1f s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
        for (const auto& f : check.failures) std::printf("    %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
