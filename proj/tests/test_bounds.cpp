#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperbound/bounds.hpp"
#include "hyperbound/errors.hpp"
#include "random_specs.hpp"

using namespace hyperbound;
using hyperbound::testing::dominated_spec;
using hyperbound::testing::sample_spec;
using hyperbound::testing::uniform;

namespace {

// agrees with a value printed to 7 significant digits
bool digits7(double got, double want) {
    const double unit = std::pow(10.0, std::floor(std::log10(std::abs(want))) - 6.0);
    return std::abs(got - want) <= 0.5 * unit * (1.0 + 1e-9);
}

}  // namespace

TEST_CASE("Luke bounds examples") {
    auto c = luke_bounds({1}, {2}, 1.0, false);
    CHECK(digits7(*c.lower, 1.6487213));
    CHECK(digits7(*c.upper, 1.8591409));
    CHECK(c.lower_certified);
    CHECK(c.upper_certified);
    CHECK(c.reference->value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(c.sandwich_holds(1e-12));

    c = luke_bounds({1}, {2}, 0.0, false);
    CHECK(*c.lower == 1.0);
    CHECK(*c.upper == 1.0);

    // f1 = 1/2, f2 = 1/3
    c = luke_bounds({1}, {2}, 1.0, true);
    CHECK(*c.lower == doctest::Approx(1.7108005307910069).epsilon(1e-14));
    CHECK(*c.upper == doctest::Approx(1.7394272761530151).epsilon(1e-14));
    CHECK(c.sandwich_holds(1e-12));
}

TEST_CASE("Luke bounds keep advisory values when the chain fails") {
    const auto c = luke_bounds({2}, {1}, 1.0, false);
    CHECK(c.hypothesis("symmetric_chain")->status == Verdict::fails);
    CHECK_FALSE(c.lower_certified);
    CHECK_FALSE(c.upper_certified);
    REQUIRE(c.lower.has_value());
    CHECK(*c.lower == doctest::Approx(std::exp(2.0)));
    CHECK_THROWS_AS((void)luke_bounds({1}, {2}, -1.0, false), DomainError);
    CHECK_THROWS_AS((void)luke_bounds({1, 2}, {2}, 1.0, false), ShapeError);
}

TEST_CASE("Stieltjes bounds examples") {
    auto c = stieltjes_bounds(1.0, {1}, {2}, 0.5, false, StieltjesSign::positive_arg);
    CHECK(digits7(*c.lower, 1.3333333));
    CHECK(digits7(*c.upper, 1.5));
    CHECK(c.reference->value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));

    c = stieltjes_bounds(1.0, {1}, {2}, 0.0, false, StieltjesSign::positive_arg);
    CHECK(*c.lower == 1.0);
    CHECK(*c.upper == 1.0);

    c = stieltjes_bounds(1.0, {1}, {2}, 1.0, false, StieltjesSign::negative_arg);
    CHECK(digits7(*c.lower, 0.6666667));
    CHECK(digits7(*c.upper, 0.75));
    CHECK(c.reference->value == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(c.sandwich_holds(1e-12));

    c = stieltjes_bounds(1.5, {1, 2}, {2, 4}, 0.6, true, StieltjesSign::positive_arg);
    CHECK(*c.lower == doctest::Approx(1.318321274138823).epsilon(1e-13));
    CHECK(*c.upper == doctest::Approx(1.4302847075210474).epsilon(1e-13));
    CHECK(c.reference->value == doctest::Approx(1.3320157639607664).epsilon(1e-12));

    CHECK_THROWS_AS((void)stieltjes_bounds(1.0, {1}, {2}, 1.0, false, StieltjesSign::positive_arg), DomainError);
    CHECK_THROWS_AS((void)stieltjes_bounds(1.0, {1}, {2}, 1.0, true, StieltjesSign::negative_arg), DomainError);
    CHECK_THROWS_AS((void)stieltjes_bounds(0.0, {1}, {2}, 0.5, false, StieltjesSign::positive_arg), DomainError);
    CHECK(parse_stieltjes_sign("negative") == StieltjesSign::negative_arg);
    CHECK_THROWS_AS((void)parse_stieltjes_sign("both"), UsageError);
}

TEST_CASE("Jensen bounds examples") {
    auto c = jensen_bounds({1}, {2}, 1.0);
    CHECK(digits7(*c.lower, 0.6065307));
    CHECK(digits7(*c.upper, 0.6839397));
    CHECK(c.reference->value == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    c = jensen_bounds({1}, {2}, 0.0);
    CHECK(*c.lower == 1.0);
    CHECK(*c.upper == 1.0);
    c = jensen_bounds({1}, {2}, -1.0);
    CHECK(digits7(*c.lower, 1.6487213));
    CHECK(digits7(*c.upper, 1.8591409));
    CHECK(c.reference->value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(c.sandwich_holds(1e-12));
}

TEST_CASE("upper bounds for p < q") {
    auto c = upper_bounds_p_lt_q({1}, {1, 2}, 1.0);
    const double i1_2 = 1.5906368546373291;
    CHECK(digits7(c.envelope("one_minus_f1_plus_f1_exp")->value, 1.8591409));
    CHECK(digits7(c.envelope("exp_f1x")->value, 1.6487213));
    CHECK(c.hypothesis("ratio_decreasing")->status == Verdict::holds);
    CHECK(c.hypothesis("coeff_dominance")->status == Verdict::holds);
    CHECK(*c.upper == c.envelope("exp_f1x")->value);
    CHECK(c.reference->value == doctest::Approx(i1_2).epsilon(1e-14));
    CHECK(c.sandwich_holds(1e-12));
    c = upper_bounds_p_lt_q({1}, {1, 2}, 0.0);
    CHECK(c.envelope("exp_f1x")->value == 1.0);
    CHECK(c.envelope("one_minus_f1_plus_f1_exp")->value == 1.0);
    CHECK_FALSE(c.lower.has_value());
    CHECK_THROWS_AS((void)upper_bounds_p_lt_q({1, 2}, {1, 2}, 1.0), ShapeError);
}

TEST_CASE("Bessel-type and 0F1 bounds") {
    // values of the closed-form envelopes, computed at 30 digits
    auto c = bessel_bounds({1}, {1, 2}, 1.0);
    CHECK(*c.lower == doctest::Approx(1.5714115813666065).epsilon(1e-14));
    CHECK(*c.upper == doctest::Approx(1.5913508737791439).epsilon(1e-14));
    CHECK(c.reference->value == doctest::Approx(1.5906368546373291).epsilon(1e-14));
    CHECK(c.sandwich_holds(1e-12));

    c = bessel_bounds({1}, {1, 2}, 0.0);
    CHECK(*c.lower == 1.0);
    CHECK(*c.upper == 1.0);

    c = bessel_bounds({2}, {1, 1}, 1.0);
    CHECK(c.hypothesis("d_positive")->status == Verdict::fails);
    CHECK_FALSE(c.upper.has_value());
    CHECK(*c.lower == doctest::Approx(2.9779823032679525).epsilon(1e-13));
    CHECK(c.sandwich_holds(1e-12));
    CHECK_THROWS_AS((void)bessel_bounds({1, 2}, {1, 2}, 1.0), ShapeError);
    CHECK_THROWS_AS((void)bessel_bounds({-1}, {1, 2}, 1.0), NonPositiveParameter);

    auto f = f01_bounds(2.0, 1.0);
    CHECK(*f.lower == doctest::Approx(1.5714115813666065).epsilon(1e-14));
    CHECK(*f.upper == doctest::Approx(1.5913508737791439).epsilon(1e-14));
    f = f01_bounds(2.0, 0.0);
    CHECK(*f.lower == 1.0);
    CHECK(*f.upper == 1.0);
    f = f01_bounds(1.5, 0.25);
    CHECK(*f.lower <= std::sinh(1.0));
    CHECK(*f.upper >= std::sinh(1.0));
    CHECK(*f.upper == doctest::Approx(1.1752412995132134).epsilon(1e-14));
    CHECK(log_f01_upper(1.0, 2.0) == doctest::Approx(std::sqrt(12.0) - 2.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)f01_bounds(0.0, 1.0), DomainError);
}

TEST_CASE("property: sandwiches hold on random admissible specs") {
    std::mt19937_64 rng(41);
    const auto chain = [](const ParamVec& A, const ParamVec& B) { return symmetric_ratio_chain(A, B).holds(); };
    const auto geq1 = [](const ParamVec& A, const ParamVec& B) { return symmetric_ratios_geq1(A, B).holds(); };
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t q = 1 + trial % 4;
        const auto s = trial % 2 ? sample_spec(rng, q, q, 0.2, 8.0, chain) : dominated_spec(rng, q, 0.2, 8.0);
        const auto u = sample_spec(rng, q, q, 0.2, 8.0, geq1);
        const double sigma = uniform(rng, 0.2, 3.0);
        for (int i = 0; i < 8; ++i) {
            const double x = 6.0 * i / 7.0;
            const double y = 0.95 * i / 7.0;
            CHECK(luke_bounds(s.A, s.B, x, false).sandwich_holds(1e-9));
            CHECK(luke_bounds(s.A, s.B, x, true).sandwich_holds(1e-9));
            CHECK(luke_bounds(u.A, u.B, x, true).sandwich_holds(1e-9));
            CHECK(stieltjes_bounds(sigma, s.A, s.B, y, false, StieltjesSign::positive_arg).sandwich_holds(1e-9));
            CHECK(stieltjes_bounds(sigma, s.A, s.B, y, true, StieltjesSign::positive_arg).sandwich_holds(1e-9));
        }
    }
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t q = 1 + trial % 3;
        const auto s = dominated_spec(rng, q, 0.2, 8.0);
        const double sigma = uniform(rng, 0.2, 3.0);
        for (int i = 0; i < 8; ++i) {
            const double x = -3.0 + 9.0 * i / 7.0;
            const auto j = jensen_bounds(s.A, s.B, x);
            CHECK(j.lower_certified);
            CHECK(j.sandwich_holds(1e-9));
            if (x >= 0.0) {
                CHECK(stieltjes_bounds(sigma, s.A, s.B, x, false, StieltjesSign::negative_arg).sandwich_holds(1e-9));
            }
        }
    }
}

TEST_CASE("property: refined Luke bounds are tighter than the plain ones") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = dominated_spec(rng, 1 + trial % 3, 0.2, 8.0);
        for (double x : {0.0, 0.3, 1.0, 4.0, 10.0}) {
            const auto plain = luke_bounds(s.A, s.B, x, false, {false});
            const auto refined = luke_bounds(s.A, s.B, x, true, {false});
            CHECK(*refined.lower >= *plain.lower * (1 - 1e-14));
            CHECK(*refined.upper <= *plain.upper * (1 + 1e-14));
        }
    }
}

TEST_CASE("property: coefficient lemmas") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t q = 1 + trial % 4;
        const auto s = dominated_spec(rng, q, 0.2, 8.0);
        CHECK(check_coeff_lemma(CoeffLemma::decreasing, s.A, s.B).holds);
        CHECK(check_coeff_lemma(CoeffLemma::power_lower, s.A, s.B).holds);
        const auto b = sample_spec(rng, q, q + 1, 0.2, 8.0, [](const ParamVec&, const ParamVec&) { return true; });
        CHECK(check_coeff_lemma(CoeffLemma::bessel_lower, b.A, b.B).holds);
        if (bessel_rates(b.A, b.B).d_positive) CHECK(check_coeff_lemma(CoeffLemma::bessel_upper, b.A, b.B).holds);
    }
    // a violated lemma is reported, with its location
    const auto r = check_coeff_lemma(CoeffLemma::decreasing, {3}, {1}, 10);
    CHECK_FALSE(r.holds);
    CHECK(r.argmin == 1);
    CHECK_THROWS_AS((void)check_coeff_lemma(CoeffLemma::bessel_upper, {2}, {1, 1}), DomainError);
}

TEST_CASE("property: Bessel-type sandwich on random positive specs") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t q = 1 + trial % 4;
        const auto s = sample_spec(rng, q - 1, q, 0.2, 8.0, [](const ParamVec&, const ParamVec&) { return true; });
        for (double x : {0.0, 0.5, 3.0, 20.0, 150.0}) {
            const auto c = bessel_bounds(s.A, s.B, x);
            CHECK(c.sandwich_holds(1e-9));
            const auto u = upper_bounds_p_lt_q(s.A, s.B, x);
            CHECK(u.sandwich_holds(1e-9));
        }
        const double cc = uniform(rng, 0.05, 6.0);
        for (double x : {0.0, 0.01, 1.0, 40.0, 900.0}) CHECK(f01_bounds(cc, x).sandwich_holds(1e-12));
    }
}
