#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixeig/operators.hpp"
#include "mixeig/shoot.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace mixeig;
using oracle::rel_err;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Problem unit(double p = 2.0, Boundary b = Boundary::ND) {
    ProblemSpec s;
    s.p = p;
    s.boundary = b;
    return Problem(s);
}

GridFunction sample(double (*f)(double), int n = 257, double T = 1.0) { return GridFunction::sample(f, uniform_grid(T, n)); }

} // namespace

TEST_CASE("class membership") {
    const Problem nd = unit();
    const Problem dn = unit(2.0, Boundary::DN);
    auto one_minus_x = sample([](double x) { return 1.0 - x; });
    auto identity = sample([](double x) { return x; });
    CHECK(validate_class(nd, one_minus_x, {FunctionClass::F_I, Boundary::ND}).ok);
    const ClassReport bad = validate_class(nd, identity, {FunctionClass::F_I, Boundary::ND});
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.violations.empty());
    CHECK(validate_class(dn, identity, {FunctionClass::F_I, Boundary::DN}).ok);
    CHECK(validate_class(nd, one_minus_x, {FunctionClass::F_II, Boundary::ND}).ok);
    // Too coarse a grid and a mismatched case are rejected.
    CHECK_FALSE(validate_class(nd, sample([](double x) { return 1.0 - x; }, 16), {FunctionClass::F_I, Boundary::ND}).ok);
    CHECK_FALSE(validate_class(nd, one_minus_x, {FunctionClass::F_I, Boundary::DN}).ok);
    // H for ND: h(0) = 0 and h < 0.
    CHECK(validate_class(nd, sample([](double x) { return -x; }), {FunctionClass::H, Boundary::ND}).ok);
    CHECK_FALSE(validate_class(nd, sample([](double x) { return x; }), {FunctionClass::H, Boundary::ND}).ok);
    // H for DN: h > 0 with a divergent integral at 0.
    auto inv = GridFunction::sample([](double x) { return x > 0.0 ? 1.0 / x : 1e12; }, clustered_grid(1.0, 256));
    CHECK(validate_class(dn, inv, {FunctionClass::H, Boundary::DN}).ok);
    CHECK_FALSE(validate_class(dn, sample([](double x) { return 1.0 + x; }), {FunctionClass::H, Boundary::DN}).ok);
    CHECK(parse_function_class("Ftilde_II") == FunctionClass::Ftilde_II);
    CHECK(to_string(FunctionClass::Htilde) == "Htilde");
}

TEST_CASE("single integral form") {
    const Problem nd = unit();
    const Problem dn = unit(2.0, Boundary::DN);
    // ND: -(1 / (v f')) int_0^x f du with f = 1 - x.
    CHECK(rel_err(op_I(nd, sample([](double x) { return 1.0 - x; }), 0.5), 0.375) < 1e-12);
    CHECK(rel_err(op_I(dn, sample([](double x) { return x; }), 0.5), 0.375) < 1e-12);
    for (double x : {0.1, 0.37, 0.9}) {
        const double ref = oracle::midpoint([](double t) { return 1.0 - t; }, 0.0, x, 100000);
        CHECK(rel_err(op_I(nd, sample([](double x) { return 1.0 - x; }), x), ref) < 1e-9);
    }
    // Flat segment: 1/0 convention.
    auto flat = GridFunction(uniform_grid(1.0, 101), std::vector<double>(101, 1.0));
    CHECK(op_I(nd, flat, 0.5) == kInf);
    CHECK_THROWS_AS(op_I(nd, flat, 0.0), std::domain_error);
    CHECK_THROWS_AS(op_I(nd, flat, 1.5), std::domain_error);
}

TEST_CASE("double integral form") {
    const Problem nd = unit();
    const auto f = sample([](double x) { return 1.0 - x; }, 1025);
    // Inner s - s^2/2, outer int_x^1 (s - s^2/2) ds, divided by 1 - x.
    auto ref = [](double x) {
        const double outer = oracle::midpoint([](double s) { return s - s * s / 2.0; }, x, 1.0, 200000);
        return outer / (1.0 - x);
    };
    for (double x : {1e-9, 0.25, 0.5, 0.8}) CHECK(rel_err(op_II(nd, f, x), ref(x)) < 1e-9);
    CHECK(rel_err(op_II(nd, f, 1e-12), 1.0 / 3.0) < 1e-9);
    // f = 0 gives +inf.
    auto cut = GridFunction::sample([](double x) { return std::max(0.0, 0.5 - x); }, with_node(uniform_grid(1.0, 257), 0.5));
    CHECK(op_II(nd, cut, 0.75) == kInf);
    // Scale invariance.
    auto scaled = GridFunction::sample([](double x) { return 1e6 * (1.0 - x); }, uniform_grid(1.0, 1025));
    CHECK(rel_err(op_II(nd, scaled, 0.3), op_II(nd, f, 0.3)) < 1e-12);
}

TEST_CASE("differential form") {
    const Problem nd = unit();
    // h = -x: R = -(h^2 + h') = 1 - x^2 at p = 2.
    CHECK(op_R(nd, sample([](double x) { return -x; }), 0.5) == doctest::Approx(0.75).epsilon(1e-12));
    // p = 3, h = -x: R = -|h| (2 (h^2 + h')) = 2x (1 - x^2).
    CHECK(op_R(unit(3.0), sample([](double x) { return -x; }), 0.5) == doctest::Approx(0.75).epsilon(1e-12));
    // DN, h = 1/x from g = x: R = 0.
    const Problem dn = unit(2.0, Boundary::DN);
    auto inv = GridFunction::sample([](double x) { return x > 0.0 ? 1.0 / x : 1e6; }, clustered_grid(1.0, 4096));
    for (double x : {0.3, 0.5, 0.7}) CHECK(std::abs(op_R(dn, inv, x)) < 1e-4);
    // h = 0 on the half line with nu_hat divergent: R = 0.
    ProblemSpec s;
    s.D = kInf;
    const Problem half(s);
    auto zero = GridFunction(uniform_grid(half.truncation(), 101), std::vector<double>(101, 0.0));
    CHECK(op_R(half, zero, 3.0) == 0.0);
    // u = 0 is a domain error.
    ProblemSpec z;
    z.u = WeightFn::expression("max(x - 0.5, 0)");
    CHECK_THROWS_AS(op_R(Problem(z), sample([](double x) { return -x; }), 0.25), std::domain_error);
}

TEST_CASE("phi_p") {
    CHECK(phi_p(0.0, 1.5) == 0.0);
    CHECK(phi_p(-2.0, 3.0) == doctest::Approx(-4.0));
    CHECK(phi_p(4.0, 1.5) == doctest::Approx(2.0));
    CHECK(phi_p(1e-310, 1.2) == 0.0);
}

TEST_CASE("bounds from test functions") {
    const Problem nd = unit();
    const double lambda = M_PI * M_PI / 4.0;
    const auto f = sample([](double x) { return 1.0 - x; }, 1025);

    const DirectedBound lower_i = bound_from_test_function(nd, f, {FunctionClass::F_I, Boundary::ND});
    CHECK(lower_i.direction == Direction::Lower);
    // sup_x int_0^x (1 - t) dt = 1/2.
    CHECK(rel_err(lower_i.value, 2.0) < 1e-6);
    const DirectedBound lower_ii = bound_from_test_function(nd, f, {FunctionClass::F_II, Boundary::ND});
    CHECK(lower_ii.value <= lambda);
    // II is dominated by I.
    CHECK(lower_ii.operator_extremum <= lower_i.operator_extremum * (1.0 + 1e-9));

    // f = nu_hat(x v x0, x1) 1_[0, x1): inf over x < x1 of I is mu(0, x0) nu_hat(x0, x1)^(p-1).
    std::vector<double> grid = with_node(with_node(uniform_grid(1.0, 513), 0.25), 0.75);
    auto fam = GridFunction::sample([](double x) { return x < 0.75 ? 0.75 - std::max(x, 0.25) : 0.0; }, grid);
    const DirectedBound upper = bound_from_test_function(nd, fam, {FunctionClass::Ftilde_I, Boundary::ND});
    CHECK(upper.direction == Direction::Upper);
    CHECK(rel_err(upper.operator_extremum, 0.125) < 1e-9);
    CHECK(rel_err(upper.value, 8.0) < 1e-9);
    CHECK(upper.value >= lambda);
    CHECK(lower_i.value <= upper.value);

    CHECK_THROWS_AS(bound_from_test_function(nd, sample([](double x) { return x; }), {FunctionClass::F_I, Boundary::ND}),
                    ClassViolation);
}

TEST_CASE("eigenfunction is a fixed point of II and R") {
    const Problem nd = unit();
    const ShootResult s = solve_eigenvalue(nd);
    const double lambda = s.lambda;
    const OperatorEvaluator eval(nd, s.g);
    double worst = 0.0;
    const auto xs = s.g.grid();
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) worst = std::max(worst, std::abs(lambda * eval.II(xs[i]) - 1.0));
    CHECK(worst <= 5e-3);

    std::vector<double> hv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) hv[i] = s.g.values()[i] > 0.0 ? s.dg.values()[i] / s.g.values()[i] : 0.0;
    const GridFunction h(std::vector<double>(xs.begin(), xs.end()), hv);
    for (double x : {0.05, 0.3, 0.6, 0.95}) CHECK(std::abs(op_R(nd, h, x) - lambda) / lambda <= 5e-3);

    // Both directions collapse to lambda.
    const DirectedBound low = bound_from_test_function(nd, s.g, {FunctionClass::F_II, Boundary::ND}, Window{0.01, 0.99});
    CHECK(std::abs(low.value - lambda) / lambda < 5e-3);
}
