#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperbound/errors.hpp"
#include "hyperbound/params.hpp"

using namespace hyperbound;

TEST_CASE("elementary symmetric polynomials") {
    CHECK(elem_sym({1, 2, 3}) == std::vector<double>{1, 6, 11, 6});
    CHECK(elem_sym({}) == std::vector<double>{1});
    CHECK(elem_sym({2, 2}) == std::vector<double>{1, 4, 4});
    const auto e = elem_sym({1, 2});
    CHECK(elem_sym_at(e, 3) == 0.0);
    CHECK(elem_sym_at(e, -1) == 0.0);
}

TEST_CASE("elem_sym matches polynomial expansion") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 6;
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        // coefficients of prod (x + a_i), lowest degree first
        std::vector<double> poly{1.0};
        for (double a : v) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k] += a * poly[k];
                next[k + 1] += poly[k];
            }
            poly = next;
        }
        const auto e = elem_sym(ParamVec(v));
        for (int k = 0; k <= n; ++k) CHECK(e[n - k] == doctest::Approx(poly[k]).epsilon(1e-12));
    }
}

TEST_CASE("rising factorial") {
    CHECK(rising_factorial(2.0, 3) == 24.0);
    CHECK(rising_factorial(7.3, 0) == 1.0);
    CHECK(rising_factorial(0.5, 2) == doctest::Approx(0.75));
    CHECK(rising_factorial(-2.0, 5) == 0.0);
    const auto big = log_rising_factorial(1.5, 400);
    CHECK(big.sign == 1);
    CHECK(big.log_abs == doctest::Approx(std::lgamma(401.5) - std::lgamma(1.5)).epsilon(1e-13));
    const auto neg = log_rising_factorial(-2.5, 3);  // (-2.5)(-1.5)(-0.5)
    CHECK(neg.sign == -1);
    CHECK(neg.value() == doctest::Approx(-1.875));
}

TEST_CASE("series coefficients") {
    CHECK(coeff_f({1, 2}, {2, 4}, 1) == doctest::Approx(0.25));
    CHECK(coeff_f({1.3, 7}, {2.2}, 0) == 1.0);
    CHECK(coeff_f({1}, {1, 2}, 2) == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_AS((void)coeff_f({1}, {-1}, 3), PoleError);
}

TEST_CASE("coefficient ratio telescopes") {
    const ParamVec A{0.7, 2.3, 5.1}, B{1.9, 0.4};
    for (unsigned n = 0; n <= 50; ++n) {
        const auto f0 = log_coeff_f(A, B, n), f1 = log_coeff_f(A, B, n + 1);
        CHECK(f1.log_abs - f0.log_abs == doctest::Approx(std::log(coeff_ratio(A, B, n))).epsilon(1e-12));
    }
}

TEST_CASE("parametric excess") {
    CHECK(parametric_excess({1, 2, 3}, {2, 3, 4}) == 3.0);
    CHECK(parametric_excess({1.5, 2}, {1.5, 2}) == 0.0);
    CHECK(parametric_excess({0.5}, {1.5, 1}) == 2.0);
}

TEST_CASE("weak supermajorization") {
    auto r = check_weak_supermajorization({1, 3}, {2, 2});
    CHECK(r.weak_supermajorized);
    CHECK(r.majorized);
    r = check_weak_supermajorization({1.5, 2.5}, {1.5, 2.5});
    CHECK(r.weak_supermajorized);
    r = check_weak_supermajorization({2, 2}, {1, 3});
    CHECK_FALSE(r.weak_supermajorized);
    REQUIRE(r.witness);
    CHECK(*r.witness == 1);
    CHECK_THROWS_AS((void)check_weak_supermajorization({1}, {1, 2}), DimensionMismatch);
    CHECK_THROWS_AS((void)check_weak_supermajorization({0, 1}, {1, 2}), NonPositiveParameter);
}

TEST_CASE("v(t) nonnegativity") {
    auto v = v_nonneg_check({1, 3}, {2, 2});
    CHECK(v.nonneg);
    CHECK(v.v_min == doctest::Approx(0.0));
    v = v_nonneg_check({1.2, 4}, {1.2, 4});
    CHECK(v.nonneg);
    CHECK(v.v_min == 0.0);
    v = v_nonneg_check({2, 2}, {1, 3});
    CHECK_FALSE(v.nonneg);
    CHECK(v.v_min < 0.0);
    CHECK_THROWS_AS((void)v_nonneg_check({1}, {1, 2}), DimensionMismatch);
}

TEST_CASE("property: majorization implications and psi necessity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 6.0);
    int weak = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % 4;
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        const ParamVec A(a), B(b);
        const auto m = check_weak_supermajorization(A, B);
        const auto v = v_nonneg_check(A, B, 512);
        if (m.majorized) CHECK(m.weak_supermajorized);
        if (m.weak_supermajorized) {
            ++weak;
            CHECK(v.v_min >= -1e-12);
        }
        if (parametric_excess(A, B) < 0.0) CHECK_FALSE(v.nonneg);
    }
    CHECK(weak > 20);
}

TEST_CASE("condition report") {
    auto r = condition_report({1, 2}, {2, 4});
    CHECK(r.symmetric_chain.verdict == Verdict::holds);
    CHECK(r.symmetric_geq1.verdict == Verdict::holds);
    r = condition_report({1}, {1, 2});
    CHECK(r.coeff_dominance.verdict == Verdict::holds);
    CHECK(r.v_nonneg.verdict == Verdict::not_applicable);
    r = condition_report({1, 3}, {2, 2});
    CHECK(r.q2_exact.verdict == Verdict::holds);
    REQUIRE(r.q2_agrees_with_v);
    CHECK(*r.q2_agrees_with_v);
    CHECK(r.coeff_dominance.verdict == Verdict::not_applicable);
}

TEST_CASE("property: condition report invariants") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int q = 1 + trial % 4;
        const int p = trial % 3 == 0 ? q : std::max(0, q - 1 - trial % 2);
        std::vector<double> a(p), b(q);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        const auto r = condition_report(ParamVec(a), ParamVec(b));
        if (r.majorized.holds()) {
            CHECK(r.weak_supermajorized.holds());
            CHECK(std::abs(r.psi) <= 1e-9);
        }
        if (r.weak_supermajorized.holds()) {
            REQUIRE(r.v_min);
            CHECK(*r.v_min >= -1e-12);
        }
        if (r.symmetric_chain.holds()) CHECK(r.symmetric_geq1.holds());
        if (r.q2_agrees_with_v) CHECK(*r.q2_agrees_with_v);
    }
}

TEST_CASE("bessel rate constants") {
    auto r = bessel_rates({1}, {1, 2});
    CHECK(r.c == doctest::Approx(2.0));
    CHECK(r.d == doctest::Approx(2.0));
    CHECK(r.d_positive);
    r = bessel_rates({1}, {0.5, 1});
    CHECK(r.c == doctest::Approx(0.5));
    CHECK(r.d == doctest::Approx(0.5));
    r = bessel_rates({2}, {1, 1});
    CHECK(r.c == doctest::Approx(0.5));
    CHECK(r.d == doctest::Approx(0.0));
    CHECK_FALSE(r.d_positive);
    CHECK_THROWS_AS((void)bessel_rates({1, 2}, {1, 2}), ShapeError);
    CHECK_THROWS_AS((void)bessel_rates({-1}, {1, 2}), NonPositiveParameter);
}

TEST_CASE("property: d <= c and c > 0 for positive rows") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 8.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int q = 1 + trial % 5;
        std::vector<double> a(q - 1), b(q);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        const auto r = bessel_rates(ParamVec(a), ParamVec(b));
        CHECK(r.d <= r.c);
        CHECK(r.c > 0.0);
    }
}
