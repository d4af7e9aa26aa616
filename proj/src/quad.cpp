#include "hyperbound/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hyperbound/errors.hpp"

namespace hyperbound {

namespace {

constexpr double half_pi = std::numbers::pi / 2.0;
constexpr double eps = std::numeric_limits<double>::epsilon();
// Transformed variable never leaves [-max_s, max_s]: e^{-2 s} stays a normal double.
constexpr double max_s = 350.0;

// Distance to an endpoint where the dropped piece of t^e is below tol.
double endpoint_reach(double exponent, double tol) {
    if (exponent <= -1.0) return 1e-300;
    const double reach = std::pow(tol * (exponent + 1.0), 1.0 / (exponent + 1.0));
    return std::clamp(reach, 1e-300, 1e-3);
}

double s_to_u(double s) { return std::asinh(s / half_pi); }

}  // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
    if (max_levels < 1 || max_levels > 12) throw DomainError("max_levels must lie in [1, 12]");
}

double level_step(int level) noexcept { return std::ldexp(1.0, -level); }

URange tanh_sinh_range(const QuadratureConfig& cfg) {
    const double tol = 1e-2 * std::min(cfg.abs_tol, cfg.rel_tol);
    // x ~ e^{-2 s} near 0 and 1 - x ~ e^{-2 s} near 1.
    const double s0 = std::min(max_s, -0.5 * std::log(endpoint_reach(cfg.endpoint_exponents[0], tol)));
    const double s1 = std::min(max_s, -0.5 * std::log(endpoint_reach(cfg.endpoint_exponents[1], tol)));
    return {-s_to_u(s0), s_to_u(s1)};
}

URange exp_sinh_range(const QuadratureConfig& cfg) {
    const double tol = 1e-2 * std::min(cfg.abs_tol, cfg.rel_tol);
    const double lo = std::log(endpoint_reach(cfg.endpoint_exponents[0], tol));
    double hi;
    const double e = cfg.endpoint_exponents[1];
    if (e < -1.0) {
        // Algebraic decay x^e: tail x^{e+1}/|e+1| below tol.
        hi = std::min(690.0, std::log(tol * (-1.0 - e)) / (e + 1.0));
    } else {
        hi = std::log(60.0);  // e^{-x} with x/scale up to 60
    }
    return {s_to_u(lo), s_to_u(hi)};
}

std::vector<QuadNode> tanh_sinh_level(int level, double u_lo, double u_hi) {
    std::vector<QuadNode> nodes;
    const double h = level_step(level);
    const long k_lo = static_cast<long>(std::ceil(u_lo / h));
    const long k_hi = static_cast<long>(std::floor(u_hi / h));
    for (long k = k_lo; k <= k_hi; ++k) {
        if (level > 0 && k % 2 == 0) continue;
        const double u = static_cast<double>(k) * h;
        const double s = half_pi * std::sinh(u);
        const double e = std::exp(-2.0 * std::abs(s));
        // small = distance to the nearer endpoint, computed without cancellation
        const double small = e / (1.0 + e);
        const double large = 1.0 / (1.0 + e);
        const double x = s >= 0.0 ? large : small;
        const double xc = s >= 0.0 ? small : large;
        // dx/du = (pi/2) cosh u * sech^2 s / 2 = (pi/2) cosh u * x (1 - x) * 2
        const double w = half_pi * std::cosh(u) * 2.0 * small * large;
        if (w == 0.0 || x == 0.0 || xc == 0.0) continue;
        nodes.push_back({x, xc, w});
    }
    return nodes;
}

std::vector<QuadNode> exp_sinh_level(int level, double u_lo, double u_hi, double scale) {
    std::vector<QuadNode> nodes;
    const double h = level_step(level);
    const long k_lo = static_cast<long>(std::ceil(u_lo / h));
    const long k_hi = static_cast<long>(std::floor(u_hi / h));
    for (long k = k_lo; k <= k_hi; ++k) {
        if (level > 0 && k % 2 == 0) continue;
        const double u = static_cast<double>(k) * h;
        const double x = scale * std::exp(half_pi * std::sinh(u));
        const double w = x * half_pi * std::cosh(u);
        if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(w)) continue;
        nodes.push_back({x, std::numeric_limits<double>::quiet_NaN(), w});
    }
    return nodes;
}

namespace {

template <class Eval>
EvalResult level_doubling(const QuadratureConfig& cfg, const Eval& eval_level) {
    cfg.validate();
    double raw = 0.0;      // sum of w f over all nodes so far
    double raw_abs = 0.0;  // sum of |w f|
    std::size_t count = 0;
    double prev = 0.0;
    for (int level = 0; level <= cfg.max_levels; ++level) {
        const auto [s, s_abs, n] = eval_level(level);
        raw += s;
        raw_abs += s_abs;
        count += n;
        const double est = raw * level_step(level);
        if (!std::isfinite(est)) throw NoConvergence("integrand produced a non-finite value");
        if (level >= 3) {
            const double diff = std::abs(est - prev);
            if (diff <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(est))) {
                const double rounding = 10.0 * eps * raw_abs * level_step(level) *
                                        std::sqrt(static_cast<double>(count));
                return {est, std::max(diff, rounding), count};
            }
        }
        prev = est;
    }
    std::ostringstream msg;
    msg << "quadrature did not settle within " << cfg.max_levels << " levels (estimate " << prev << ")";
    throw NoConvergence(msg.str());
}

struct LevelSum {
    double sum;
    double sum_abs;
    std::size_t nodes;
};

}  // namespace

EvalResult integrate_01_split(const std::function<double(double, double)>& f, const QuadratureConfig& cfg) {
    const URange r = tanh_sinh_range(cfg);
    return level_doubling(cfg, [&](int level) {
        LevelSum ls{0.0, 0.0, 0};
        for (const auto& nd : tanh_sinh_level(level, r.lo, r.hi)) {
            const double v = nd.weight * f(nd.x, nd.xc);
            ls.sum += v;
            ls.sum_abs += std::abs(v);
            ++ls.nodes;
        }
        return ls;
    });
}

EvalResult integrate_01(const std::function<double(double)>& f, const QuadratureConfig& cfg) {
    // Nodes closer to 1 than the spacing of doubles collapse onto t = 1.
    return integrate_01_split([&](double t, double c) { return t == 1.0 && c > 0.0 ? 0.0 : f(t); }, cfg);
}

EvalResult integrate_0inf(const std::function<double(double)>& f, double decay_scale, const QuadratureConfig& cfg) {
    if (!(decay_scale > 0.0) || !std::isfinite(decay_scale)) throw DomainError("decay scale must be positive");
    const URange r = exp_sinh_range(cfg);
    return level_doubling(cfg, [&](int level) {
        LevelSum ls{0.0, 0.0, 0};
        for (const auto& nd : exp_sinh_level(level, r.lo, r.hi, decay_scale)) {
            const double v = nd.weight * f(nd.x);
            ls.sum += v;
            ls.sum_abs += std::abs(v);
            ++ls.nodes;
        }
        return ls;
    });
}

}  // namespace hyperbound
