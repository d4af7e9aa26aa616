#include "hyperbound/gkernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hyperbound/detail/gamma_real.hpp"
#include "hyperbound/detail/grid.hpp"
#include "hyperbound/errors.hpp"
#include "hyperbound/quad.hpp"
#include "hyperbound/series.hpp"

namespace hyperbound {

using cplx = std::complex<double>;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double half_log_two_pi = 0.91893853320467274178;

// Bernoulli numbers B_{2k} / (2k (2k - 1)), k = 1..8.
constexpr std::array<double, 8> stirling_coeffs = {
    1.0 / 12.0,        -1.0 / 360.0,     1.0 / 1260.0,         -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0,         -3617.0 / 122400.0,
};

// Re z >= 10: the Stirling remainder after eight terms is below 1e-17.
cplx log_gamma_stirling(cplx z) {
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    for (auto it = stirling_coeffs.rbegin(); it != stirling_coeffs.rend(); ++it) series = series * inv2 + *it;
    return (z - 0.5) * std::log(z) - z + half_log_two_pi + series * inv;
}

}  // namespace

cplx log_gamma_complex(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("log-gamma of a non-finite value");
    if (z.imag() == 0.0 && detail::is_nonpositive_integer(z.real())) {
        std::ostringstream msg;
        msg << "Gamma has a pole at " << z.real();
        throw PoleError(msg.str());
    }
    constexpr double shift_to = 10.0;
    if (z.real() >= shift_to) return log_gamma_stirling(z);
    // log Gamma(z) = log Gamma(z + n) - sum_{k<n} log(z + k) holds on the principal branch.
    const double needed = std::ceil(shift_to - z.real());
    if (needed > 1e6) throw DomainError("log-gamma argument too far left of the origin");
    const auto n = static_cast<long>(needed);
    cplx logs = 0.0;
    for (long k = 0; k < n; ++k) logs += std::log(z + static_cast<double>(k));
    return log_gamma_stirling(z + static_cast<double>(n)) - logs;
}

std::string_view to_string(KernelKind k) noexcept {
    switch (k) {
        case KernelKind::balanced: return "balanced";
        case KernelKind::laplace: return "laplace";
        case KernelKind::zero: return "zero";
    }
    return "unknown";
}

std::string_view to_string(KernelMethod m) noexcept {
    switch (m) {
        case KernelMethod::automatic: return "auto";
        case KernelMethod::residue: return "residue";
        case KernelMethod::mellin_barnes: return "mellin_barnes";
        case KernelMethod::closed_form: return "closed_form";
    }
    return "unknown";
}

KernelMethod parse_kernel_method(std::string_view name) {
    if (name == "auto" || name == "automatic") return KernelMethod::automatic;
    if (name == "residue") return KernelMethod::residue;
    if (name == "mellin_barnes" || name == "mb") return KernelMethod::mellin_barnes;
    if (name == "closed_form") return KernelMethod::closed_form;
    throw UsageError("unknown kernel method '" + std::string(name) + "'");
}

KernelKind KernelSpec::kind() const noexcept {
    if (bottom.size() == top.size()) return KernelKind::balanced;
    return bottom.size() > top.size() ? KernelKind::laplace : KernelKind::zero;
}

double KernelSpec::psi() const noexcept { return top.sum() - bottom.sum(); }

long KernelSpec::mu() const noexcept {
    return static_cast<long>(bottom.size()) - static_cast<long>(top.size());
}

void KernelSpec::validate() const {
    if (bottom.empty()) throw DomainError("kernel needs at least one bottom parameter");
}

namespace {

// Bottom entries closer than this to an integer spacing are treated as congruent.
constexpr double congruence_threshold = 1e-6;
constexpr std::size_t endpoint_terms = 400;

double distance_to_integer(double x) { return std::abs(x - std::nearbyint(x)); }

std::vector<std::vector<std::size_t>> congruence_groups(const ParamVec& a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance_to_integer(a[i] - a[j]) < congruence_threshold) parent[find(i)] = find(j);
        }
    }
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& g : groups) {
        if (g.size() >= 2) {
            std::sort(g.begin(), g.end(), [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });
            out.push_back(std::move(g));
        }
    }
    return out;
}

// Sum over the pole sequences s = -a_j - k of the Mellin integrand; bottom
// entries must be pairwise incongruent.
EvalResult residue_plain(const std::vector<double>& a, const std::vector<double>& b, long mu, double t) {
    const double log_t = std::log(t);
    const double x = (mu % 2 == 0) ? t : -t;
    double sum = 0.0, comp = 0.0, abs_sum = 0.0, err = 0.0;
    std::size_t terms = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double log_c = 0.0;
        int sign = 1;
        bool vanishes = false;
        std::vector<double> upper, lower;
        upper.reserve(b.size());
        lower.reserve(a.size());
        // rounding of a[i] - a[j] is amplified by its distance to the nearest
        // integer, through Gamma(a[i] - a[j]) or the lower series parameter
        double pole_cond = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == j) continue;
            pole_cond += (std::abs(a[i]) + std::abs(a[j]) + 1.0) /
                         std::max(distance_to_integer(a[i] - a[j]), eps);
            const auto lg = detail::log_gamma_signed(a[i] - a[j]);
            log_c += lg.log_abs;
            sign *= lg.sign;
            lower.push_back(1.0 + a[j] - a[i]);
        }
        for (double bi : b) {
            if (detail::is_nonpositive_integer(bi - a[j])) {
                vanishes = true;
                break;
            }
            const auto lg = detail::log_gamma_signed(bi - a[j]);
            log_c -= lg.log_abs;
            sign *= lg.sign;
            upper.push_back(1.0 + a[j] - bi);
        }
        if (vanishes) continue;
        const auto f = eval_pfq(HyperSpec{ParamVec(std::move(upper)), ParamVec(std::move(lower))}, x);
        const double log_mag = log_c + a[j] * log_t;
        const double mag = std::exp(log_mag);
        const double v = sign * mag * f.value;
        if (!std::isfinite(v)) throw NonConvergence("residue term overflow");
        const double s = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - s) + v : (v - s) + sum;
        sum = s;
        abs_sum += std::abs(v);
        err += mag * f.abs_err + std::abs(v) * eps * (8.0 + std::abs(log_mag) + 2.0 * pole_cond);
        terms += f.terms_used;
    }
    const double value = sum + comp;
    return {value, err + eps * abs_sum, terms};
}

// Balances the eps^{1-m} rounding growth of a size-m split against the
// (eps ln t)^4 remainder left after extrapolation.
double perturbation_step(std::size_t group_size, double t) {
    const double L = 1.0 + std::abs(std::log(t));
    const double m = static_cast<double>(group_size);
    return std::clamp(std::pow(1e-16 / std::pow(L, 4.0), 1.0 / (m + 3.0)), 2e-5, 1e-2);
}

}  // namespace

GKernel::GKernel(KernelSpec spec) : spec_(std::move(spec)), kind_(spec_.kind()) {
    spec_.validate();
    groups_ = congruence_groups(spec_.bottom);
    if (kind_ != KernelKind::balanced) return;

    // Expansion about t = 1, built by adjoining one (bottom, top) pair at a time.
    // h holds h_n / n!; after the last pair the kernel is
    // t^alpha sum_n h_n (1-t)^{psi-1+n} / Gamma(psi+n).
    auto a = spec_.bottom.sorted();
    auto b = spec_.top.sorted();
    std::vector<double> av(a.begin(), a.end()), bv(b.begin(), b.end());
    std::reverse(av.begin(), av.end());
    std::reverse(bv.begin(), bv.end());
    const std::size_t N = endpoint_terms;
    std::vector<double> h(N, 0.0), h_abs(N, 0.0);
    h[0] = 1.0;
    h_abs[0] = 1.0;
    double alpha = av[0];
    double psi_run = bv[0] - av[0];
    for (std::size_t q = 1; q < av.size(); ++q) {
        const double u = bv[q] - alpha;
        std::vector<double> nh(N, 0.0), nh_abs(N, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            if (h[k] == 0.0 && h_abs[k] == 0.0) continue;
            double w = 1.0;
            for (std::size_t n = k; n < N; ++n) {
                nh[n] += h[k] * w;
                nh_abs[n] += h_abs[k] * std::abs(w);
                const double nd = static_cast<double>(n), kd = static_cast<double>(k);
                w *= (psi_run + nd) * (u + nd - kd) / ((nd + 1.0) * (nd + 1.0 - kd));
                if (w == 0.0) break;
            }
        }
        h = std::move(nh);
        h_abs = std::move(nh_abs);
        alpha = av[q];
        psi_run += bv[q] - av[q];
    }
    endpoint_alpha_ = alpha;
    endpoint_coeffs_.resize(2 * N);
    // psi a rounding error away from a pole of Gamma would leave a spurious
    // (1-t)^{psi-1} term with coefficient of order psi.
    double psi = spec_.psi();
    if (std::abs(psi - std::nearbyint(psi)) < 1e-12 && std::nearbyint(psi) <= 0.0) psi = std::nearbyint(psi);
    endpoint_psi_ = psi;
    const double lanes = static_cast<double>(av.size() + 1);
    for (std::size_t n = 0; n < N; ++n) {
        // r_n = n! / Gamma(psi + n)
        double r = 0.0;
        if (!detail::is_nonpositive_integer(psi + static_cast<double>(n))) {
            const auto lg = detail::log_gamma_signed(psi + static_cast<double>(n));
            r = lg.sign * std::exp(std::lgamma(static_cast<double>(n) + 1.0) - lg.log_abs);
        }
        endpoint_coeffs_[2 * n] = h[n] * r;
        endpoint_coeffs_[2 * n + 1] = std::abs(h_abs[n] * r) * eps * lanes * (static_cast<double>(n) + 4.0);
    }
}

bool GKernel::has_closed_form() const noexcept {
    if (kind_ == KernelKind::zero) return true;
    if (kind_ == KernelKind::balanced) return spec_.bottom.size() == 1;
    return spec_.bottom.size() == 1 && spec_.top.empty();
}

EvalResult GKernel::closed_form(double t) const {
    if (!(t > 0.0)) throw DomainError("kernel argument must be positive");
    if (kind_ == KernelKind::zero) return {0.0, 0.0, 0};
    if (!has_closed_form()) throw DomainError("no closed form for this kernel");
    const double a = spec_.bottom[0];
    if (kind_ == KernelKind::laplace) {
        const double v = std::exp(a * std::log(t) - t);
        return {v, 4.0 * eps * v * (1.0 + std::abs(a * std::log(t)) + t), 1};
    }
    if (t >= 1.0) return {0.0, 0.0, 0};
    const double b = spec_.top[0];
    const double r = detail::rgamma(b - a);
    if (r == 0.0) return {0.0, 0.0, 1};
    const double lg = a * std::log(t) + (b - a - 1.0) * std::log1p(-t);
    const double v = r * std::exp(lg);
    return {v, 8.0 * eps * std::abs(v) * (1.0 + std::abs(lg)), 1};
}

std::optional<EvalResult> GKernel::endpoint_expansion(double t, double one_minus_t) const {
    if (kind_ != KernelKind::balanced) return std::nullopt;
    if (!(t > 0.0) || !(one_minus_t > 0.0)) return std::nullopt;
    const double w = one_minus_t;
    const std::size_t N = endpoint_coeffs_.size() / 2;
    double sum = 0.0, comp = 0.0, abs_sum = 0.0, err = 0.0, wp = 1.0;
    int small_run = 0;
    bool converged = false;
    std::size_t n = 0;
    for (; n < N; ++n) {
        const double term = endpoint_coeffs_[2 * n] * wp;
        const double s = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
        sum = s;
        abs_sum += std::abs(term);
        err += endpoint_coeffs_[2 * n + 1] * wp;
        small_run = std::abs(term) <= 1e-17 * std::abs(sum + comp) ? small_run + 1 : 0;
        wp *= w;
        if ((n >= 8 && small_run >= 4) || wp == 0.0) {
            converged = true;
            ++n;
            break;
        }
    }
    if (!converged) return std::nullopt;
    const double log_pref = endpoint_alpha_ * std::log(t) + (endpoint_psi_ - 1.0) * std::log(w);
    const double pref = std::exp(log_pref);
    const double value = pref * (sum + comp);
    if (!std::isfinite(value)) return std::nullopt;
    const double abs_err = pref * (err + 4.0 * eps * abs_sum) + 4.0 * eps * std::abs(value) * (1.0 + std::abs(log_pref));
    return EvalResult{value, abs_err, n};
}

EvalResult GKernel::residue(double t) const {
    if (!(t > 0.0)) throw DomainError("kernel argument must be positive");
    if (kind_ == KernelKind::zero) return {0.0, 0.0, 0};
    if (kind_ == KernelKind::balanced && t >= 1.0) return {0.0, 0.0, 0};
    const std::vector<double> b(spec_.top.begin(), spec_.top.end());
    const long mu = spec_.mu();
    if (groups_.empty()) {
        return residue_plain(std::vector<double>(spec_.bottom.begin(), spec_.bottom.end()), b, mu, t);
    }

    // Congruent entries: split each group symmetrically, average +eps and -eps,
    // then cancel the eps^2 term with a second step 2 eps.
    std::size_t largest = 0;
    for (const auto& g : groups_) largest = std::max(largest, g.size());
    const double step = perturbation_step(largest, t);
    auto evaluate = [&](double e) {
        std::vector<double> a(spec_.bottom.begin(), spec_.bottom.end());
        for (const auto& g : groups_) {
            const double mid = 0.5 * static_cast<double>(g.size() - 1);
            for (std::size_t k = 0; k < g.size(); ++k) a[g[k]] += e * (static_cast<double>(k) - mid);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                if (distance_to_integer(a[i] - a[j]) < 0.5 * std::abs(e)) {
                    throw DegenerateParameters("bottom parameters remain congruent after perturbation");
                }
            }
        }
        return residue_plain(a, b, mu, t);
    };
    // The perturbed arguments sit within eps of Gamma poles, which costs
    // accuracy the per-term bounds do not see; a second step size exposes it.
    auto richardson = [&](double h) {
        const auto p1 = evaluate(h), m1 = evaluate(-h);
        const auto p2 = evaluate(2.0 * h), m2 = evaluate(-2.0 * h);
        const double s1 = 0.5 * (p1.value + m1.value);
        const double s2 = 0.5 * (p2.value + m2.value);
        const double value = (4.0 * s1 - s2) / 3.0;
        const double rounding = (4.0 * 0.5 * (p1.abs_err + m1.abs_err) + 0.5 * (p2.abs_err + m2.abs_err)) / 3.0;
        const double log_scale = std::max(1.0, std::log(t) * std::log(t));
        const double truncation = std::abs(s1 - value) * h * h * 10.0 * log_scale;
        return EvalResult{value, rounding + truncation,
                          p1.terms_used + m1.terms_used + p2.terms_used + m2.terms_used};
    };
    const auto r1 = richardson(step);
    const auto r2 = richardson(1.6 * step);
    return {r1.value, r1.abs_err + 2.0 * std::abs(r1.value - r2.value), r1.terms_used + r2.terms_used};
}

namespace {

double mellin_log_abs_real(const ParamVec& bottom, const ParamVec& top, double c) {
    double v = 0.0;
    for (double a : bottom) v += detail::lgamma_abs(a + c);
    for (double b : top) v -= detail::lgamma_abs(b + c);
    return v;
}

// Limit of a slowly converging sequence by Wynn's epsilon algorithm; returns
// the latest even-column entry and its change from the previous one.
std::pair<double, double> wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
    double best = s.back(), best_prev = s.size() > 1 ? s[s.size() - 2] : s.back();
    for (std::size_t col = 1; cur.size() > 1; ++col) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double d = cur[i + 1] - cur[i];
            if (d == 0.0) return {cur[i + 1], 0.0};
            next[i] = prev[i + 1] + 1.0 / d;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0 && cur.size() >= 2) {
            best = cur.back();
            best_prev = cur[cur.size() - 2];
        }
    }
    return {best, std::abs(best - best_prev)};
}

// Integral over [0, inf) of an oscillating integrand with algebraic decay:
// adaptive Gauss-Kronrod on panels of the asymptotic half-period, Wynn-accelerated.
template <class F>
EvalResult alternating_panels(const F& f, double width, int budget) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    const int max_panels = std::max(8, budget / 31);
    std::vector<double> partial;
    double sum = 0.0, abs_sum = 0.0, quad_err = 0.0, last = 0.0;
    double last_change = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_panels; ++k) {
        // pieces no wider than the unit scale of the Gamma ratios near Im s = 0
        const int pieces = std::max(1, static_cast<int>(std::ceil(width / 2.0)));
        for (int i = 0; i < pieces; ++i) {
            double piece_err = 0.0, piece_abs = 0.0;
            const double a = (k + static_cast<double>(i) / pieces) * width;
            const double b = (k + static_cast<double>(i + 1) / pieces) * width;
            sum += Rule::integrate(f, a, b, 4, 1e-13, &piece_err, &piece_abs);
            abs_sum += piece_abs;
            quad_err += piece_err;
        }
        partial.push_back(sum);
        if (partial.size() >= 6) {
            const auto [est, change] = wynn_epsilon(partial);
            const double tol = 1e-13 * std::max(std::abs(est), 1e-300);
            if (change <= tol && last_change <= tol) {
                return {est, change + quad_err + 1e-15 * abs_sum, static_cast<std::size_t>(31 * (k + 1))};
            }
            last = est;
            last_change = change;
        }
    }
    std::ostringstream msg;
    msg << "contour integral did not settle within " << max_panels << " panels (estimate " << last << ")";
    throw NoConvergence(msg.str());
}

bool near_pole(const ParamVec& top, double c) {
    for (double b : top) {
        const double z = b + c;
        if (z <= 0.5 && distance_to_integer(z) < 1e-3) return true;
    }
    return false;
}

}  // namespace

ContourSpec GKernel::default_contour(double t) const {
    ContourSpec c;
    const double lo = -spec_.bottom.min();
    if (kind_ == KernelKind::laplace) {
        // Saddle of |M(c)| t^{-c} along the real axis.
        const double log_t = std::log(t);
        auto phi = [&](double x) { return mellin_log_abs_real(spec_.bottom, spec_.top, x) - x * log_t; };
        const double mu = static_cast<double>(spec_.mu());
        double left = lo + 1e-3;
        double right = lo + 2.0 + 2.0 * std::pow(t, 1.0 / mu);
        while (phi(right) < phi(right - 0.5) && right < 1e6) right *= 2.0;
        constexpr double golden = 0.6180339887498949;
        double x1 = right - golden * (right - left), x2 = left + golden * (right - left);
        double f1 = phi(x1), f2 = phi(x2);
        for (int it = 0; it < 100 && right - left > 1e-9 * (1.0 + std::abs(right)); ++it) {
            if (f1 < f2) {
                right = x2;
                x2 = x1;
                f2 = f1;
                x1 = right - golden * (right - left);
                f1 = phi(x1);
            } else {
                left = x1;
                x1 = x2;
                f1 = f2;
                x2 = left + golden * (right - left);
                f2 = phi(x2);
            }
        }
        c.re_offset = std::max(0.5 * (left + right), lo + 0.1);
    } else {
        c.re_offset = lo + 1.0;
    }
    while (near_pole(spec_.top, c.re_offset)) c.re_offset += 0.01;
    return c;
}

EvalResult GKernel::mellin_barnes(double t) const { return mellin_barnes(t, default_contour(t)); }

EvalResult GKernel::mellin_barnes(double t, const ContourSpec& contour) const {
    if (!(t > 0.0)) throw DomainError("kernel argument must be positive");
    if (kind_ == KernelKind::zero) return {0.0, 0.0, 0};
    const double psi = spec_.psi();
    if (kind_ == KernelKind::balanced) {
        if (!(psi > 1.0)) throw ContourDivergence("vertical contour needs psi > 1 for absolute convergence");
        if (t >= 1.0) return {0.0, 0.0, 0};
    }
    const double c0 = contour.re_offset;
    if (!(c0 > -spec_.bottom.min())) throw DomainError("contour must lie right of every bottom pole");
    if (contour.nodes < 32) throw DomainError("contour needs at least 32 nodes");

    const double log_t = std::log(t);
    auto log_mellin = [&](cplx s) {
        cplx v = 0.0;
        for (double a : spec_.bottom) v += log_gamma_complex(a + s);
        for (double b : spec_.top) v -= log_gamma_complex(b + s);
        return v;
    };
    const double norm = log_mellin(cplx(c0, 0.0)).real();
    auto integrand = [&](double y) {
        const cplx e = log_mellin(cplx(c0, y)) - cplx(0.0, y * log_t) - norm;
        if (e.real() < -745.0) return 0.0;
        return std::exp(e.real()) * std::cos(e.imag());
    };

    QuadratureConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-14;
    cfg.max_levels = std::clamp(static_cast<int>(std::ceil(std::log2(contour.nodes / 6.0))), 3, 12);
    EvalResult integral;
    if (std::isinf(contour.height) && kind_ == KernelKind::balanced) {
        integral = alternating_panels(integrand, std::numbers::pi / std::abs(log_t), contour.nodes);
    } else if (std::isinf(contour.height)) {
        const double h = 1e-3 * (1.0 + std::abs(c0));
        const double curv = (mellin_log_abs_real(spec_.bottom, spec_.top, c0 + h) -
                             2.0 * mellin_log_abs_real(spec_.bottom, spec_.top, c0) +
                             mellin_log_abs_real(spec_.bottom, spec_.top, c0 - h)) / (h * h);
        const double scale = curv > 0.0 ? std::max(1.0, 1.0 / std::sqrt(curv)) : 1.0;
        integral = integrate_0inf(integrand, scale, cfg);
    } else {
        const double H = contour.height;
        integral = integrate_01([&](double u) { return H * integrand(H * u); }, cfg);
    }
    const double log_pref = norm - c0 * log_t;
    const double pref = std::exp(log_pref) / std::numbers::pi;
    const double value = pref * integral.value;
    const double err = pref * (integral.abs_err + 1e-13) + 8.0 * eps * std::abs(value) * (1.0 + std::abs(log_pref));
    return {value, err, integral.terms_used};
}

EvalResult GKernel::eval_split(double t, double one_minus_t) const {
    if (!(t > 0.0)) throw DomainError("kernel argument must be positive");
    if (kind_ == KernelKind::zero) return {0.0, 0.0, 0};
    if (kind_ == KernelKind::balanced) {
        // t may round to 1 while one_minus_t still resolves the distance
        if (t > 1.0 || !(one_minus_t > 0.0)) return {0.0, 0.0, 0};
        if (has_closed_form()) {
            const double a = spec_.bottom[0], b = spec_.top[0];
            const double r = detail::rgamma(b - a);
            if (r == 0.0) return {0.0, 0.0, 1};
            const double lg = a * std::log(t) + (b - a - 1.0) * std::log(one_minus_t);
            const double v = r * std::exp(lg);
            return {v, 8.0 * eps * std::abs(v) * (1.0 + std::abs(lg)), 1};
        }
        if (t >= 0.5 || (degenerate() && t >= 0.15)) {
            if (auto e = endpoint_expansion(t, one_minus_t)) return *e;
        }
        return residue(t);
    }
    if (has_closed_form()) return closed_form(t);
    const double reach = std::pow(t, 1.0 / static_cast<double>(spec_.mu()));
    if (reach > 4.0) return mellin_barnes(t);
    const auto r = residue(t);
    if (r.abs_err <= 1e-10 * std::abs(r.value)) return r;
    // cancellation in the residue sum; the contour integral keeps relative accuracy
    try {
        const auto m = mellin_barnes(t);
        return m.abs_err < r.abs_err ? m : r;
    } catch (const NoConvergence&) {
        return r;
    }
}

EvalResult GKernel::operator()(double t, KernelMethod method) const {
    switch (method) {
        case KernelMethod::automatic: return eval_split(t, 1.0 - t);
        case KernelMethod::residue: return residue(t);
        case KernelMethod::mellin_barnes: return mellin_barnes(t);
        case KernelMethod::closed_form: return closed_form(t);
    }
    throw DomainError("unknown kernel method");
}

EvalResult kernel_eval(const KernelSpec& spec, double t, KernelMethod method) {
    return GKernel(spec)(t, method);
}

KernelAsymptotics kernel_asymptotics(const KernelSpec& spec) {
    spec.validate();
    KernelAsymptotics out;
    const auto& a = spec.bottom;
    const auto& b = spec.top;
    // Order of the pole of the Mellin transform at s = -x.
    auto pole_order = [&](double x) {
        int order = 0;
        for (double ai : a) {
            const double d = x - ai;
            if (d > -1e-12 && distance_to_integer(d) < 1e-12) ++order;
        }
        for (double bj : b) {
            const double d = x - bj;
            if (d > -1e-12 && distance_to_integer(d) < 1e-12) --order;
        }
        return order;
    };
    const double spread = std::max(a.max(), b.empty() ? a.max() : b.max()) - a.min();
    const int reach = static_cast<int>(std::ceil(spread)) + 2;
    std::vector<double> candidates;
    for (double ai : a) {
        for (int k = 0; k <= reach; ++k) candidates.push_back(ai + k);
    }
    std::sort(candidates.begin(), candidates.end());
    out.zero_exponent = std::numeric_limits<double>::infinity();
    for (double x : candidates) {
        const int order = pole_order(x);
        if (order > 0) {
            out.zero_exponent = x;
            out.zero_log_power = order - 1;
            break;
        }
    }
    if (spec.kind() == KernelKind::laplace) {
        const long mu = spec.mu();
        const double m = static_cast<double>(mu);
        out.inf_mu = mu;
        out.inf_alpha = b.sum() - a.sum() + (m + 1.0) / 2.0;
        out.inf_constant = std::pow(2.0 * std::numbers::pi, (m - 1.0) / 2.0) / std::sqrt(m);
    } else if (spec.kind() == KernelKind::balanced) {
        out.one_exponent = spec.psi() - 1.0;
    }
    return out;
}

MonotoneReport kernel_nonneg_scan(const KernelSpec& spec, int points) {
    if (spec.kind() != KernelKind::balanced) throw DomainError("positivity scan needs a balanced kernel");
    if (points < 8) throw DomainError("positivity scan needs at least 8 points");
    const GKernel g(spec);
    MonotoneReport rep;
    rep.kind = ScanKind::kernel_nonneg;
    rep.grid = "composite (0,1), " + std::to_string(points) + " points";
    rep.min_margin = std::numeric_limits<double>::infinity();
    double err_at_min = 0.0;
    for (const auto& p : detail::composite_unit_grid(points, 1e-10)) {
        try {
            const auto r = g.eval_split(p.t, p.tc);
            if (r.value < rep.min_margin) {
                rep.min_margin = r.value;
                rep.argmin = p.t;
                err_at_min = r.abs_err;
            }
        } catch (const Error& e) {
            rep.failures.push_back({p.t, e.what()});
        }
    }
    rep.tolerance = 1e-12 + err_at_min;
    const auto v = v_nonneg_check(spec.bottom, spec.top);
    rep.note = v.nonneg ? "v(t) >= 0 holds for these rows" : "v(t) >= 0 fails for these rows: " + v.reason;
    rep.finalize();
    return rep;
}

}  // namespace hyperbound
