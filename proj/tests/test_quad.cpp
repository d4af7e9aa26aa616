#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyperbound/errors.hpp"
#include "hyperbound/quad.hpp"

using namespace hyperbound;

TEST_CASE("unit interval rule") {
    const double ln2 = std::log(2.0);
    struct Case {
        std::function<double(double)> f;
        std::array<double, 2> exps;
        double expect;
    };
    const Case cases[] = {
        {[](double t) { return t; }, {0.0, 0.0}, 0.5},
        {[](double t) { return 1.0 / std::sqrt(t); }, {-0.5, 0.0}, 2.0},
    };
    for (const auto& c : cases) {
        QuadratureConfig cfg;
        cfg.endpoint_exponents = c.exps;
        const auto r = integrate_01(c.f, cfg);
        CHECK(r.value == doctest::Approx(c.expect).epsilon(1e-12));
        // the reported error covers the true error at least tenfold
        CHECK(r.abs_err >= 10.0 * std::abs(r.value - c.expect));
        CHECK(r.terms_used > 0);
    }
}

TEST_CASE("log singularity at 0 with inverse square root at 1") {
    QuadratureConfig cfg;
    cfg.endpoint_exponents = {0.0, -0.5};
    const double expect = 4.0 - 4.0 * std::log(2.0);
    const auto r = integrate_01_split([](double t, double c) { return -std::log(t) / std::sqrt(c); }, cfg);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.abs_err >= 10.0 * std::abs(r.value - expect));
    // Without the complement the last ulp below 1 is lost.
    const auto plain = integrate_01([](double t) { return -std::log(t) / std::sqrt(1.0 - t); }, cfg);
    CHECK(plain.value == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("split integrand resolves the right endpoint") {
    QuadratureConfig cfg;
    cfg.endpoint_exponents = {0.0, -0.9};
    const auto r = integrate_01_split([](double, double c) { return std::pow(c, -0.9); }, cfg);
    CHECK(r.value == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("half line rule") {
    struct Case {
        std::function<double(double)> f;
        double expect;
    };
    const Case cases[] = {
        {[](double t) { return std::exp(-t); }, 1.0},
        {[](double t) { return t * std::exp(-t); }, 1.0},
        {[](double t) { return std::exp(-t * t); }, std::sqrt(std::numbers::pi) / 2.0},
    };
    for (const auto& c : cases) {
        const auto r = integrate_0inf(c.f, 1.0);
        CHECK(r.value == doctest::Approx(c.expect).epsilon(1e-12));
        CHECK(r.abs_err >= 10.0 * std::abs(r.value - c.expect));
    }
    QuadratureConfig cfg;
    cfg.endpoint_exponents = {0.0, -3.0};
    CHECK(integrate_0inf([](double t) { return 1.0 / ((1.0 + t) * (1.0 + t) * (1.0 + t)); }, 1.0, cfg).value ==
          doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("level doubling is Cauchy on smooth integrands") {
    auto f = [](double t) { return std::exp(t) * std::cos(3.0 * t); };
    double prev_diff = INFINITY;
    double prev = 0.0;
    for (int levels = 1; levels <= 6; ++levels) {
        double est = 0.0;
        const auto range = tanh_sinh_range({});
        for (int l = 0; l <= levels; ++l) {
            for (const auto& n : tanh_sinh_level(l, range.lo, range.hi)) est += n.weight * f(n.x);
        }
        est *= level_step(levels);
        if (levels > 1) {
            const double diff = std::abs(est - prev);
            CHECK(diff <= prev_diff + 1e-15);
            prev_diff = diff;
        }
        prev = est;
    }
}

TEST_CASE("quadrature failures") {
    QuadratureConfig cfg;
    cfg.max_levels = 3;
    cfg.rel_tol = 1e-15;
    cfg.abs_tol = 1e-300;
    CHECK_THROWS_AS((void)integrate_01([](double t) { return std::sin(200.0 * t); }, cfg), NoConvergence);
    cfg.max_levels = 13;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    CHECK_THROWS_AS((void)integrate_0inf([](double t) { return std::exp(-t); }, -1.0), DomainError);
}
