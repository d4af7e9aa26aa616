#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hyperbound/errors.hpp"
#include "hyperbound/monotone.hpp"
#include "random_specs.hpp"

using namespace hyperbound;
using hyperbound::testing::dominated_spec;
using hyperbound::testing::random_row;
using hyperbound::testing::uniform;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v;
    for (double t : linspace(std::log(a), std::log(b), n)) v.push_back(std::exp(t));
    return v;
}

// (-1)^n d^n/dx^n of (1 - e^{-x})/x = int_0^1 t^n e^{-xt} dt.
double kummer_moment(double x, int n) {
    double acc = 0.0;
    const int m = 4000;
    for (int i = 0; i < m; ++i) {
        const double t = (i + 0.5) / m;
        acc += std::pow(t, n) * std::exp(-x * t);
    }
    return acc / m;
}

}  // namespace

TEST_CASE("default cm grid") {
    const auto g = default_cm_grid();
    CHECK(g.size() == 64);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 20.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("cm of (1 - e^{-x})/x") {
    const HyperSpec s{{1.0}, {2.0}};
    const auto grid = logspace(0.1, 10.0, 40);
    const auto rep = cm_check(s, 6, grid);
    CHECK(rep.pass);
    CHECK(rep.min_margin > 0.0);
    CHECK(rep.hypotheses_hold());
    CHECK(rep.n_max == 6);
    CHECK(rep.argmin_order == 6);

    for (double x : {0.1, 1.0, 7.0}) {
        double prev = INFINITY;
        for (int n = 0; n <= 6; ++n) {
            const auto d = cm_derivative(s, x, n);
            CHECK(d.value == doctest::Approx(kummer_moment(x, n)).epsilon(1e-6));
            CHECK(d.value <= prev);
            prev = d.value;
        }
    }
    // Closed form of the first derivative.
    const double x = 2.5;
    const double exact = (1.0 - std::exp(-x) - x * std::exp(-x)) / (x * x);
    CHECK(cm_derivative(s, x, 1).value == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("cm with A = B gives e^{-x} at every order") {
    const HyperSpec s{{1.5, 2.0}, {1.5, 2.0}};
    for (double x : {0.01, 0.7, 5.0, 20.0}) {
        for (int n = 0; n <= 6; ++n) {
            CHECK(cm_derivative(s, x, n).value == doctest::Approx(std::exp(-x)).epsilon(1e-12));
        }
    }
    CHECK(cm_check(s, 6, default_cm_grid()).pass);
}

TEST_CASE("cm records failed hypotheses and detects sign changes") {
    // 1F1(2; 1; -x) = (1 - x) e^{-x} changes sign.
    const HyperSpec s{{2.0}, {1.0}};
    const auto rep = cm_check(s, 2, logspace(0.1, 5.0, 30));
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_margin < 0.0);
    CHECK_FALSE(rep.hypotheses_hold());

    const auto shape = cm_check(HyperSpec{{1.0}, {2.0, 3.0}}, 2, {1.0});
    CHECK_FALSE(shape.hypotheses_hold());
}

TEST_CASE("cm for (q+1)Fq picks sigma") {
    const HyperSpec s{{1.0, 0.5}, {1.5}};
    const auto rep = cm_check(s, 6, default_cm_grid());
    CHECK(rep.pass);
    CHECK(rep.hypotheses_hold());
    CHECK(rep.failures.empty());
}

TEST_CASE("cm argument checks") {
    const HyperSpec s{{1.0}, {2.0}};
    CHECK_THROWS_AS((void)cm_check(s, 9, {1.0}), DomainError);
    CHECK_THROWS_AS((void)cm_check(s, 2, {0.0}), DomainError);
    CHECK_THROWS_AS((void)cm_derivative(s, 1.0, -1), DomainError);
}

TEST_CASE("composite x^{-1} 2F1(1,1;2;-1/x) is log(1 + 1/x)") {
    const StieltjesTriple g{1.0, {1.0}, {2.0}};
    for (double x : logspace(0.01, 100.0, 37)) {
        const double exact = std::log1p(1.0 / x);
        CHECK(composite_value(g, x).value == doctest::Approx(exact).epsilon(1e-10));
        // (-1) d/dx log(1 + 1/x) = 1/(x (1 + x))
        CHECK(composite_derivative(g, x, 1).value == doctest::Approx(1.0 / (x * (1.0 + x))).epsilon(1e-10));
    }
    const auto rep = cm_check(g, 6, default_cm_grid());
    CHECK(rep.pass);
    CHECK(rep.min_margin > 0.0);
    CHECK(rep.hypotheses_hold());
    const auto fd = cm_check(g, 4, default_cm_grid(), {}, DerivativeMethod::finite_difference);
    CHECK(fd.pass);
    CHECK(fd.min_margin > 0.0);
    CHECK_THROWS_AS((void)cm_check(g, 5, {1.0}, {}, DerivativeMethod::finite_difference), DomainError);
}

TEST_CASE("composite with A = B is 1/(1 + x)") {
    const StieltjesTriple g{1.0, {2.0}, {2.0}};
    for (double x : {0.05, 1.0, 30.0}) {
        CHECK(composite_value(g, x).value == doctest::Approx(1.0 / (1.0 + x)).epsilon(1e-14));
        CHECK(composite_derivative(g, x, 3).value ==
              doctest::Approx(6.0 / std::pow(1.0 + x, 4)).epsilon(1e-13));
    }
}

TEST_CASE("property: analytic and finite-difference derivatives agree") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        const auto ab = dominated_spec(rng, 1 + trial % 2, 0.3, 3.0);
        const StieltjesTriple g{uniform(rng, 0.2, 2.0), ab.A, ab.B};
        for (double x : {1.0, 2.0, 6.0, 15.0}) {
            for (int n = 0; n <= 3; ++n) {
                const double a = composite_derivative(g, x, n).value;
                const double f = composite_derivative_fd(g, x, n);
                INFO("trial " << trial << " x " << x << " n " << n);
                CHECK(f == doctest::Approx(a).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("log-complete monotonicity") {
    const auto grid = default_cm_grid();
    const auto rep = log_cm_check(1.0, {1.0}, {2.0}, grid);
    CHECK(rep.pass);
    CHECK(rep.n_max == 4);
    CHECK(rep.hypotheses_hold());

    // With A = B the composite is 1/(1 + x); h = 1/(1 + x) and the margins are (x/(1+x))^{k+1}.
    const auto id = log_cm_check(1.0, {2.0}, {2.0}, grid);
    CHECK(id.pass);
    const double x0 = grid.front();
    CHECK(id.min_margin == doctest::Approx(std::pow(x0 / (1.0 + x0), 5)).epsilon(1e-8));
    CHECK(id.argmin == x0);

    const auto wide = log_cm_check(1.5, {1.0}, {2.0}, grid);
    CHECK_FALSE(wide.hypotheses_hold());
}

TEST_CASE("property: log-cm on random admissible triples") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ab = dominated_spec(rng, 1 + trial % 3, 0.3, 4.0);
        const auto rep = log_cm_check(uniform(rng, 0.1, 1.0), ab.A, ab.B, logspace(0.05, 20.0, 16));
        INFO("trial " << trial);
        CHECK(rep.hypotheses_hold());
        CHECK(rep.pass);
    }
}

TEST_CASE("ratio monotonicity examples") {
    const SplitSpec s{{}, {}, {1.0}, {2.0}};
    const auto rep = ratio_monotone_check(s, 1.0, linspace(-0.9, 5.0, 60));
    CHECK(rep.pass);
    CHECK(rep.hypotheses_hold());
    CHECK(rep.note.empty());
    CHECK(rep.min_margin > 0.0);

    const auto flat = ratio_monotone_check(s, 0.0, linspace(-0.9, 5.0, 20));
    CHECK(flat.min_margin == 0.0);
    CHECK(flat.pass);

    // Both series equal 1 at the origin.
    const PfqEvaluator num(HyperSpec{{2.0}, {3.0}}), den(HyperSpec{{1.0}, {2.0}});
    CHECK(num(0.0).result.value / den(0.0).result.value == 1.0);
}

TEST_CASE("clause domains") {
    // p <= q with no extending clause: (-inf, 0].
    const auto d1 = clause_domain({{}, {1.0}, {1.0}, {2.0}});
    CHECK(d1.base_holds);
    CHECK(d1.hi == 0.0);
    // p = q + 1, A1' = () and B1 = (): (-1, inf).
    const auto d2 = clause_domain({{1.0}, {}, {1.0}, {2.0}});
    CHECK(d2.lo == -1.0);
    CHECK(std::isinf(d2.hi));
    // p = q + 1 with a failing A1' clause: (-1, 0].
    const auto d3 = clause_domain({{2.0, 3.0}, {1.0}, {1.0}, {2.0}});
    CHECK(d3.base_holds);
    CHECK(d3.hi == 0.0);
    CHECK(d3.lo == -1.0);

    const SplitSpec s{{2.0, 3.0}, {1.0}, {1.0}, {2.0}};
    const auto rep = ratio_monotone_check(s, 0.5, linspace(-1.0, 2.0, 31));
    CHECK(rep.pass);
    CHECK(rep.note.find("skipped") != std::string::npos);
}

TEST_CASE("ratio scan hypotheses") {
    const SplitSpec bad{{}, {}, {2.0}, {1.0}};
    CHECK_THROWS_AS((void)ratio_monotone_check(bad, 1.0, {-1.0, 0.0}), SpecViolation);
    const SplitSpec bad2{{}, {}, {1.0, 2.0}, {0.5, 3.0}};
    const auto rep = ratio_monotone_check(bad2, 1.0, {-1.0, -0.5, 0.0});
    CHECK_FALSE(rep.hypotheses_hold());
    ScanOptions strict;
    strict.require_hypotheses = true;
    CHECK_THROWS_AS((void)ratio_monotone_check(bad2, 1.0, {-1.0, 0.0}, strict), HypothesisFailed);
    CHECK_THROWS_AS((void)ratio_monotone_check(SplitSpec{{}, {}, {1.0}, {2.0}}, -1.0, {0.0}), DomainError);
}

TEST_CASE("log-convexity examples") {
    const SplitSpec s{{}, {}, {1.0}, {2.0}};
    const std::vector<double> mus{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto rep = logconvex_check(s, mus, 1.0);
    CHECK(rep.pass);
    CHECK(rep.min_margin == doctest::Approx(0.051882928379453712).epsilon(1e-9));
    CHECK(rep.argmin == 1.5);
    CHECK(rep.hypotheses_hold());

    const auto zero = logconvex_check(s, mus, 0.0);
    CHECK(zero.min_margin == 0.0);
    CHECK(zero.pass);

    const SplitSpec full{{}, {}, {1.0, 2.0}, {2.0, 3.0}};
    const auto f = logconvex_check(full, mus, 2.0);
    CHECK(f.pass);
    CHECK(f.min_margin == doctest::Approx(0.086428546174295673).epsilon(1e-9));

    CHECK_THROWS_AS((void)logconvex_check(s, {0.0, 1.0}, 1.0), DomainError);
    const auto outside = logconvex_check(SplitSpec{{}, {1.0}, {1.0}, {2.0}}, mus, 1.0);
    CHECK_FALSE(outside.hypotheses_hold());
}

TEST_CASE("log-convexity in mu fails for positive arguments") {
    // mu -> log 1F1(1+mu; 2+mu; 2) is strictly concave although x = -2 lies in
    // the whole-line clause domain.
    const SplitSpec s{{}, {}, {1.0}, {2.0}};
    const auto rep = logconvex_check(s, {0.0, 0.5, 1.0, 1.5, 2.0}, -2.0);
    CHECK(rep.hypotheses_hold());
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_margin == doctest::Approx(-0.23243295498066683).epsilon(1e-9));
    CHECK(rep.argmin == 0.5);
    ScanOptions strict;
    strict.require_hypotheses = true;
    CHECK_NOTHROW((void)logconvex_check(s, {0.0, 1.0, 2.0}, -2.0, strict));
}

TEST_CASE("ratio monotonicity fails on the whole line for a p = q clause") {
    // B1 weakly supermajorized by A1, yet the ratio turns upwards after x = 7.5;
    // mpmath at 60 digits: r(7) = 0.9434810820294739, r(8) = 0.94361428496145397,
    // r(15) = 0.94824114063968777.
    const SplitSpec s{{0.3474311630375177}, {0.48579043012941209}, {1.2768095765249818, 2.5843339196069892},
                      {1.5384673563105269, 3.0}};
    const double mu = 0.22335798392561929;
    const auto dom = clause_domain(s);
    CHECK(dom.base_holds);
    CHECK(std::isinf(dom.hi));
    const auto rep = ratio_monotone_check(s, mu, {7.0, 8.0, 15.0});
    CHECK(rep.hypotheses_hold());
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_margin == doctest::Approx(0.94361428496145397 - 0.94824114063968777).epsilon(1e-7));
    CHECK(rep.argmin == 8.0);
}

TEST_CASE("property: ratio and log-convexity on random admissible splits") {
    std::mt19937_64 rng(17);
    const auto mus = linspace(0.0, 3.0, 7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t q2 = 1 + trial % 2;
        const auto m = dominated_spec(rng, q2, 0.3, 3.0);
        const std::size_t shape = trial % 4;
        const std::size_t p1 = shape == 2 ? 2 : (shape == 3 ? 0 : shape);
        const std::size_t q1 = shape == 2 ? 1 : (shape == 3 ? 1 : shape);
        const SplitSpec s{random_row(rng, p1, 0.3, 3.0), random_row(rng, q1, 0.3, 3.0), m.A, m.B};
        const auto dom = clause_domain(s);
        REQUIRE(dom.base_holds);
        const double lo = std::isfinite(dom.lo) ? -0.99 : -4.0;
        const double hi = std::isfinite(dom.hi) ? 0.0 : 8.0;
        const auto grid = linspace(lo, hi, 25);
        const double mu = uniform(rng, 0.1, 2.0);
        const auto r = ratio_monotone_check(s, mu, grid);
        INFO("trial " << trial);
        CHECK(r.pass);
        CHECK(r.failures.empty());
        if (std::isinf(dom.hi)) {
            const auto c = logconvex_check(s, mus, uniform(rng, 0.1, hi));
            CHECK(c.pass);
            CHECK(c.hypotheses_hold());
        }
    }
}
