#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixeig/exact.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace mixeig;
using oracle::rel_err;

TEST_CASE("closed forms at p = 2 and p = 3") {
    CHECK(rel_err(exact_lambda(2.0), M_PI * M_PI / 4.0) < 1e-15);
    CHECK(rel_err(exact_sigma(2.0), 0.25) < 1e-15);
    CHECK(rel_err(exact_bar_delta1(2.0), 0.375) < 1e-15);
    // [2 pi 2^(1/3) / (3 sqrt 3)]^3
    CHECK(rel_err(exact_lambda(3.0), std::pow(2.0 * M_PI * std::cbrt(2.0) / (3.0 * std::sqrt(3.0)), 3.0)) < 1e-14);
    CHECK(exact_lambda(3.0) == doctest::Approx(3.5360952).epsilon(1e-7));
}

TEST_CASE("roots and limits") {
    for (double p : {1.1, 1.5, 2.5, 7.0}) {
        const ExactValue e = exact_values(p);
        CHECK(e.p == p);
        CHECK(rel_err(std::pow(e.lambda_root, p), exact_lambda(p)) < 1e-13);
        CHECK(rel_err(std::pow(e.sigma_root, p), exact_sigma(p)) < 1e-13);
        CHECK(rel_err(std::pow(e.bar_delta1_root, p), exact_bar_delta1(p)) < 1e-13);
        CHECK(e.lambda_root > 0.0);
    }
    auto root = [](double p) { return (M_PI / p) / std::sin(M_PI / p) * std::pow(p - 1.0, 1.0 / p); };
    CHECK(rel_err(exact_values(50.0).lambda_root, root(50.0)) < 1e-13);
    CHECK(exact_values(50.0).lambda_root == doctest::Approx(1.0817).epsilon(1e-4));
    double prev = exact_values(50.0).lambda_root;
    for (double p : {100.0, 400.0, 2000.0}) {
        const double r = exact_values(p).lambda_root;
        CHECK(r < prev);
        CHECK(r > 1.0);
        prev = r;
    }
    CHECK(prev - 1.0 < 0.005);
    CHECK_THROWS_AS(exact_lambda(1.0), std::domain_error);
    CHECK_THROWS_AS(exact_sigma(0.5), std::domain_error);
    CHECK_THROWS_AS(exact_bar_delta1(-2.0), std::domain_error);
}

TEST_CASE("chain among the closed forms") {
    for (double p : {1.5, 2.0, 3.0, 8.0}) {
        const double s = exact_sigma(p), b = exact_bar_delta1(p), l = exact_lambda(p);
        const double ps = p / (p - 1.0), k = p * std::pow(ps, p - 1.0);
        CHECK(s <= b);
        CHECK(b <= p * s);
        CHECK(1.0 / (k * s) <= l);
        CHECK(l <= 1.0 / b);
        CHECK(1.0 / b <= 1.0 / s);
    }
    CHECK(1.0 / (2.0 * 2.0 * exact_sigma(2.0)) == doctest::Approx(1.0));
}
