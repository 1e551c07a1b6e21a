#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixeig/bounds.hpp"
#include "mixeig/shoot.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace mixeig;
using oracle::rel_err;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Problem unit(double p, Boundary b = Boundary::ND) {
    ProblemSpec s;
    s.p = p;
    s.boundary = b;
    return Problem(s);
}

Problem exponential_half_line() {
    ProblemSpec s;
    s.u = WeightFn::exponential(-1.0);
    s.v = WeightFn::exponential(1.0);
    s.D = kInf;
    return Problem(s);
}

/// Golden-section maximum of f on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-9) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

} // namespace

TEST_CASE("sigma_p closed form on the unit interval") {
    for (double p : {1.2, 1.5, 2.0, 3.0, 4.0, 8.0}) {
        CHECK(rel_err(sigma_p(unit(p)), oracle::sigma_unit(p)) < 1e-8);
        CHECK(rel_err(sigma_p(unit(p, Boundary::DN)), oracle::sigma_unit(p)) < 1e-8);
    }
    const Extremum e = sigma_p_truncated(unit(2.0));
    CHECK(e.x == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rel_err(e.value, 0.25) < 1e-12);
}

TEST_CASE("sigma_p for exponential weights against a dense scan") {
    const Problem pr = exponential_half_line();
    double scan = 0.0;
    for (int i = 1; i < 200000; ++i) {
        const double x = 20.0 * i / 200000.0;
        scan = std::max(scan, (1.0 - std::exp(-x)) * std::exp(-x));
    }
    CHECK(rel_err(sigma_p(pr), scan) < 1e-8);
    CHECK(rel_err(sigma_p(pr), 0.25) < 1e-8);
    CHECK(sigma_p_truncated(pr).x == doctest::Approx(std::log(2.0)).epsilon(1e-5));
    const auto [lo, hi] = basic_bounds(pr);
    CHECK(rel_err(lo, 1.0) < 1e-8);
    CHECK(rel_err(hi, 4.0) < 1e-8);
}

TEST_CASE("basic bounds and the positivity criterion") {
    const auto [lo, hi] = basic_bounds(unit(2.0));
    CHECK(rel_err(lo, 1.0) < 1e-10);
    CHECK(rel_err(hi, 4.0) < 1e-10);
    CHECK(basic_bounds(kInf, Exponent(2.0)) == std::pair<double, double>{0.0, 0.0});
    ProblemSpec s;
    s.D = kInf;
    const Problem flat(s);
    CHECK(sigma_p(flat) == kInf);
    CHECK(basic_bounds(flat) == std::pair<double, double>{0.0, 0.0});
    const BoundsReport r = compute_bounds(flat);
    CHECK_FALSE(r.positivity);
    CHECK(r.lower_best == 0.0);
    CHECK(r.upper_best == 0.0);
    CHECK(delta1(flat) == kInf);
    // DN on the half line with u = e^{-x}: mu(x, inf) nu_hat(0, x) = e^{-x} x is bounded, so lambda > 0.
    ProblemSpec d;
    d.D = kInf;
    d.boundary = Boundary::DN;
    d.u = WeightFn::exponential(-1.0);
    CHECK(rel_err(sigma_p(Problem(d)), std::exp(-1.0)) < 1e-7);
}

TEST_CASE("delta1 matches the reduced unit-interval expression at p = 3") {
    const double p = 3.0, ps = 1.5, q = p + 1.0 / p - 1.0;
    auto inner = [&](double x) {
        const double I = oracle::midpoint([&](double z) { return std::pow(1.0 - std::pow(z, q), ps - 1.0); }, 0.0, 1.0 - x, 200000);
        return std::pow(1.0 - x, -1.0 / ps) * I;
    };
    const double root = std::pow(q, -1.0 / p) * std::pow(golden_max(inner, 0.05, 0.5), 1.0 / ps);
    CHECK(rel_err(delta1(unit(p)), std::pow(root, p)) < 1e-6);
}

TEST_CASE("bar_delta1 closed form and sandwich") {
    for (double p : {1.5, 2.0, 3.0, 8.0}) {
        const double b = bar_delta1(unit(p));
        CHECK(rel_err(b, oracle::bar_delta1_unit(p)) < 1e-6);
        CHECK(b >= oracle::sigma_unit(p));
        CHECK(b <= p * oracle::sigma_unit(p));
    }
    CHECK(rel_err(bar_delta1(unit(2.0)), 0.375) < 1e-9);
}

TEST_CASE("ordering of the improved estimates across p = 2") {
    CHECK(rel_err(bar_delta1(unit(2.0)), delta1_prime(unit(2.0))) < 1e-6);
    CHECK(bar_delta1(unit(1.5)) <= delta1_prime(unit(1.5)));
    CHECK(bar_delta1(unit(3.0)) >= delta1_prime(unit(3.0)));
}

TEST_CASE("full chain with the shooting eigenvalue") {
    for (Boundary b : {Boundary::ND, Boundary::DN})
        for (double p : {1.5, 2.0, 3.0}) {
            const Problem pr = unit(p, b);
            const BoundsReport r = compute_bounds(pr);
            const double lambda = solve_eigenvalue(pr).lambda;
            const double k = pr.exponent().k_p();
            const double slack = 1.0 + 1e-6;
            CHECK(r.positivity);
            CHECK(1.0 / (k * r.sigma_p) <= slack / r.delta1);
            CHECK(1.0 / r.delta1 <= slack * lambda);
            CHECK(lambda <= slack / r.delta1_prime);
            CHECK(1.0 / r.delta1_prime <= slack / r.sigma_p);
            CHECK(lambda <= slack / r.bar_delta1);
            CHECK(r.lower_best <= lambda * slack);
            CHECK(r.upper_best * slack >= lambda);
        }
}

TEST_CASE("ND and DN agree on symmetric weights") {
    for (double p : {1.5, 3.0}) {
        const BoundsReport a = compute_bounds(unit(p));
        const BoundsReport b = compute_bounds(unit(p, Boundary::DN));
        CHECK(rel_err(a.sigma_p, b.sigma_p) < 1e-8);
        CHECK(rel_err(a.delta1, b.delta1) < 1e-8);
        CHECK(rel_err(a.delta1_prime, b.delta1_prime) < 1e-8);
        CHECK(rel_err(a.bar_delta1, b.bar_delta1) < 1e-8);
    }
}

TEST_CASE("exponential half line improved bracket") {
    const BoundsReport r = compute_bounds(exponential_half_line());
    const double lambda = M_PI * M_PI / 4.0;
    CHECK(r.lower_best <= lambda);
    CHECK(r.upper_best >= lambda);
    CHECK(r.lower_best > 2.3);
    CHECK(r.upper_best < 2.7);
    CHECK(r.describe().find("sigma_p") != std::string::npos);
}

TEST_CASE("report text") {
    const std::string text = compute_bounds(unit(2.0)).describe();
    CHECK(text.find("sigma_p        = 0.25") != std::string::npos);
    CHECK(text.find("basic bounds   = [1, 4]") != std::string::npos);
}
