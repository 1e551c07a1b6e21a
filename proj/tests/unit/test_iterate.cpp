#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixeig/bounds.hpp"
#include "mixeig/exact.hpp"
#include "mixeig/iterate.hpp"
#include "mixeig/mesh.hpp"
#include "mixeig/operators.hpp"
#include "mixeig/shoot.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace mixeig;
using oracle::rel_err;

namespace {

Problem unit(double p, Boundary b = Boundary::ND) {
    ProblemSpec s;
    s.p = p;
    s.boundary = b;
    return Problem(s);
}

} // namespace

TEST_CASE("quadrature mesh integrates polynomials exactly") {
    const QuadratureMesh mesh(clustered_grid(2.0, 7, 3), 8);
    CHECK(mesh.size() == mesh.cells() * 8);
    std::vector<double> g;
    for (double x : mesh.points()) g.push_back(7.0 * std::pow(x, 6) - 3.0 * x + 1.0);
    auto F = [](double x) { return std::pow(x, 7) - 1.5 * x * x + x; };
    CHECK(rel_err(mesh.total(g), F(2.0)) < 1e-13);
    const auto fw = mesh.forward(g);
    const auto bw = mesh.backward(g);
    for (std::size_t i = 0; i < mesh.size(); i += 5) {
        const double x = mesh.points()[i];
        CHECK(std::abs(fw.points[i] - F(x)) < 1e-12);
        CHECK(std::abs(bw.points[i] - (F(2.0) - F(x))) < 1e-12);
    }
    for (std::size_t k = 0; k < mesh.nodes().size(); ++k) CHECK(std::abs(fw.nodes[k] - F(mesh.nodes()[k])) < 1e-12);
    for (double x : {0.0, 0.123, 1.0, 1.77, 2.0}) {
        CHECK(std::abs(mesh.forward_at(g, fw, x) - F(x)) < 1e-12);
        CHECK(std::abs(mesh.backward_at(g, bw, x) - (F(2.0) - F(x))) < 1e-12);
    }
    CHECK(mesh.cell_of(0.0) == 0);
    CHECK(mesh.cell_of(2.0) == mesh.cells() - 1);
    CHECK_THROWS(QuadratureMesh({0.0, 1.0}, 0));
    CHECK_THROWS(QuadratureMesh({1.0, 0.0}, 8));
}

TEST_CASE("descending iteration") {
    IterateConfig bad;
    bad.cells = 1;
    CHECK_THROWS(bad.validate());

    for (double p : {1.5, 2.0, 3.0}) {
        const Problem pr = unit(p);
        const BoundsReport b = compute_bounds(pr);
        CHECK(rel_err(iterate_lower(pr, 1).delta_n, b.delta1) < 1e-8);
        const IterationState st = iterate_lower(pr, 12);
        const double lambda = solve_eigenvalue(pr).lambda;
        for (std::size_t i = 1; i < st.history.size(); ++i) {
            CHECK(st.history[i].first == st.history[i - 1].first + 1);
            CHECK(st.history[i].second <= st.history[i - 1].second * (1.0 + 1e-12));
        }
        for (const auto& [n, d] : st.history) CHECK(1.0 / d <= lambda * (1.0 + 1e-8));
        CHECK(st.f_n(0.0) == doctest::Approx(1.0));
        CHECK(st.describe().find("delta") != std::string::npos);
    }
    const IterationState st = iterate_lower(unit(2.0), 20);
    CHECK(st.n <= 20);
    CHECK(rel_err(1.0 / st.delta_n, M_PI * M_PI / 4.0) < 1e-4);
    CHECK(rel_err(1.0 / iterate_lower(unit(2.0), 2).delta_n, 1.0 / iterate_lower(unit(2.0, Boundary::DN), 2).delta_n) < 1e-8);
}

TEST_CASE("mesh refinement changes delta_2 only slightly") {
    IterateConfig fine;
    fine.cells = 1024;
    const Problem pr = unit(3.0);
    CHECK(rel_err(iterate_lower(pr, 2).delta_n, iterate_lower(pr, 2, fine).delta_n) < 1e-4);
}

TEST_CASE("first family member") {
    const Problem pr = unit(2.0);
    const TwoPointFamily m = family_member(pr, 0.25, 0.75, 1);
    CHECK(m.x0 == 0.25);
    CHECK(m.x1 == 0.75);
    const double head = m.f(0.0);
    CHECK(head > 0.0);
    for (double x : {0.0, 0.1, 0.25, 0.4, 0.6, 0.75, 0.9, 1.0})
        CHECK(m.f(x) / head == doctest::Approx((0.75 - std::clamp(x, 0.25, 0.75)) / 0.5).epsilon(1e-6));
    CHECK_THROWS(family_member(pr, 0.8, 0.5, 1));
}

TEST_CASE("operator II ignores the scale of the test function") {
    const Problem pr = unit(3.0);
    const TwoPointFamily m = family_member(pr, 0.2, 0.9, 2);
    for (double c : {1e-6, 1e6}) {
        std::vector<double> scaled(m.f.values().begin(), m.f.values().end());
        for (double& y : scaled) y *= c;
        const GridFunction f(std::vector<double>(m.f.grid().begin(), m.f.grid().end()), scaled);
        for (double x : {0.3, 0.5, 0.85}) CHECK(rel_err(op_II(pr, f, x), op_II(pr, m.f, x)) < 1e-10);
    }
}

TEST_CASE("ascending family sequences") {
    for (double p : {1.5, 2.0, 3.0}) {
        for (Boundary bc : {Boundary::ND, Boundary::DN}) {
            const Problem pr = unit(p, bc);
            const BoundsReport b = compute_bounds(pr);
            const UpperSequence up = iterate_upper(pr, 3);
            const double lambda = solve_eigenvalue(pr).lambda;
            REQUIRE(up.delta_prime.size() == 3);
            REQUIRE(up.bar_delta.size() == 3);
            if (bc == Boundary::ND) CHECK(rel_err(up.delta_prime[0].value, b.delta1_prime) < 1e-4);
            CHECK(rel_err(up.bar_delta[0].value, exact_bar_delta1(p)) < 1e-5);
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(up.delta_prime[i].n == static_cast<int>(i) + 1);
                if (i > 0) CHECK(up.delta_prime[i].value >= up.delta_prime[i - 1].value * (1.0 - 1e-9));
                CHECK(1.0 / up.delta_prime[i].value >= lambda * (1.0 - 1e-6));
                CHECK(1.0 / up.bar_delta[i].value >= lambda * (1.0 - 1e-6));
                CHECK(up.bar_delta[i].x0 <= up.bar_delta[i].x1);
            }
            if (p != 2.0) CHECK(up.bar_delta[1].value >= up.delta_prime[0].value * (1.0 - 1e-9));
            CHECK(up.describe().find("bar") != std::string::npos);
        }
    }
    // Unit interval, p = 2.
    const UpperSequence up = iterate_upper(unit(2.0), 3);
    CHECK(1.0 / up.delta_prime[1].value == doctest::Approx(2.4721).epsilon(1e-4));
    CHECK(1.0 / up.bar_delta[1].value == doctest::Approx(2.46757).epsilon(1e-5));
    CHECK(1.0 / up.bar_delta[2].value == doctest::Approx(2.4674013).epsilon(1e-7));
    CHECK(rel_err(rayleigh_bar_delta(unit(2.0), 2), up.bar_delta[1].value) < 1e-9);
}

TEST_CASE("family values at one pair") {
    const FamilyValues fv = family_values(unit(2.0), 0.0, 1.0, 3);
    REQUIRE(fv.inf_II.size() == 3);
    REQUIRE(fv.rayleigh.size() == 3);
    // x0 = 0, x1 = 1, n = 1: f = 1 - x with R = 1/3.
    CHECK(fv.rayleigh[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    for (std::size_t i = 0; i < 3; ++i) CHECK(fv.inf_II[i] <= fv.rayleigh[i] * (1.0 + 1e-9));
}

TEST_CASE("no iteration when lambda vanishes") {
    ProblemSpec s;
    s.D = std::numeric_limits<double>::infinity();
    const Problem pr(s);
    CHECK_THROWS_AS(iterate_lower(pr, 3), IterationError);
    CHECK_THROWS_AS(iterate_upper(pr, 2), IterationError);
}
