#include "hyperbound/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hyperbound/detail/grid.hpp"
#include "hyperbound/errors.hpp"
#include "hyperbound/detail/gamma_real.hpp"

namespace hyperbound {

namespace {

void require_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DomainError("parameter vector entries must be finite");
        }
    }
}

// a >= b up to a relative slack that absorbs rounding in the symmetric sums.
bool geq_slack(double a, double b) {
    return a >= b - 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

ParamVec::ParamVec(std::initializer_list<double> values) : values_(values) {
    require_finite(values_);
}

ParamVec::ParamVec(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_);
}

ParamVec ParamVec::sorted() const {
    auto v = values_;
    std::sort(v.begin(), v.end());
    return ParamVec(std::move(v));
}

ParamVec ParamVec::shifted(double alpha) const {
    auto v = values_;
    for (double& x : v) x += alpha;
    return ParamVec(std::move(v));
}

ParamVec ParamVec::with(double extra) const {
    auto v = values_;
    v.push_back(extra);
    return ParamVec(std::move(v));
}

ParamVec ParamVec::concat(const ParamVec& other) const {
    auto v = values_;
    v.insert(v.end(), other.values_.begin(), other.values_.end());
    return ParamVec(std::move(v));
}

ParamVec ParamVec::without_max() const {
    if (values_.empty()) return {};
    auto v = values_;
    v.erase(std::max_element(v.begin(), v.end()));
    return ParamVec(std::move(v));
}

double ParamVec::sum() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

double ParamVec::min() const {
    if (values_.empty()) throw ShapeError("min of an empty parameter vector");
    return *std::min_element(values_.begin(), values_.end());
}

double ParamVec::max() const {
    if (values_.empty()) throw ShapeError("max of an empty parameter vector");
    return *std::max_element(values_.begin(), values_.end());
}

bool ParamVec::all_positive() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x > 0.0; });
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::not_applicable: return "not_applicable";
    }
    return "not_applicable";
}

double SignedLog::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

std::vector<double> elem_sym(const ParamVec& values) {
    std::vector<double> e(values.size() + 1, 0.0);
    e[0] = 1.0;
    std::size_t n = 0;
    for (double a : values) {
        ++n;
        for (std::size_t k = n; k >= 1; --k) e[k] += a * e[k - 1];
    }
    return e;
}

double elem_sym_at(const std::vector<double>& e, long k) noexcept {
    if (k < 0 || k >= static_cast<long>(e.size())) return 0.0;
    return e[static_cast<std::size_t>(k)];
}

SignedLog log_rising_factorial(double a, unsigned n) {
    SignedLog out{0.0, 1};
    if (n == 0) return out;
    // Factors a + k <= 0 are taken one at a time; the positive tail goes through lgamma.
    unsigned k = 0;
    constexpr unsigned direct_limit = 64;
    for (; k < n && (a + k <= 0.0 || n <= direct_limit); ++k) {
        const double f = a + k;
        if (f == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
        if (f < 0.0) out.sign = -out.sign;
        out.log_abs += std::log(std::abs(f));
    }
    if (k < n) {
        out.log_abs += detail::lgamma_abs(a + n) - detail::lgamma_abs(a + k);
    }
    return out;
}

double rising_factorial(double a, unsigned n) {
    if (n <= 32) {
        double p = 1.0;
        for (unsigned k = 0; k < n; ++k) p *= a + k;
        return p;
    }
    return log_rising_factorial(a, n).value();
}

SignedLog log_coeff_f(const ParamVec& A, const ParamVec& B, unsigned n) {
    SignedLog out{0.0, 1};
    for (double b : B) {
        const auto lb = log_rising_factorial(b, n);
        if (lb.sign == 0) {
            std::ostringstream msg;
            msg << "lower parameter " << b << " gives (b)_" << n << " = 0";
            throw PoleError(msg.str());
        }
        out.log_abs -= lb.log_abs;
        out.sign *= lb.sign;
    }
    for (double a : A) {
        const auto la = log_rising_factorial(a, n);
        if (la.sign == 0) return {-std::numeric_limits<double>::infinity(), 0};
        out.log_abs += la.log_abs;
        out.sign *= la.sign;
    }
    return out;
}

double coeff_f(const ParamVec& A, const ParamVec& B, unsigned n) {
    return log_coeff_f(A, B, n).value();
}

double coeff_ratio(const ParamVec& A, const ParamVec& B, double x) {
    double r = 1.0;
    for (double a : A) r *= a + x;
    for (double b : B) {
        if (b + x == 0.0) throw PoleError("R(x) has a pole at the given x");
        r /= b + x;
    }
    return r;
}

double parametric_excess(const ParamVec& A, const ParamVec& B) noexcept {
    return B.sum() - A.sum();
}

MajorizationResult check_weak_supermajorization(const ParamVec& A, const ParamVec& B, double tol) {
    if (A.size() != B.size()) throw DimensionMismatch("weak supermajorization needs |A| = |B|");
    if (!A.all_positive() || !B.all_positive()) {
        throw NonPositiveParameter("weak supermajorization is defined for positive vectors");
    }
    const auto a = A.sorted();
    const auto b = B.sorted();
    MajorizationResult out;
    out.weak_supermajorized = true;
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sa += a[k];
        sb += b[k];
        if (sa > sb + tol * std::max(1.0, std::abs(sb))) {
            out.weak_supermajorized = false;
            out.witness = k + 1;
            break;
        }
    }
    out.majorized = out.weak_supermajorized &&
                    std::abs(parametric_excess(A, B)) <= tol * std::max(1.0, B.sum());
    return out;
}

VCheck v_nonneg_check(const ParamVec& A, const ParamVec& B, int grid_size, double tol) {
    if (A.size() != B.size()) throw DimensionMismatch("v(t) needs |A| = |B|");
    VCheck out;
    out.psi = parametric_excess(A, B);
    const auto a = A.sorted();
    const auto b = B.sorted();

    // v(1) = 0 identically; the minimum starts there.
    out.v_min = 0.0;
    out.t_at_min = 1.0;
    for (const auto& p : detail::composite_unit_grid(grid_size)) {
        double v = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            v += std::exp(b[j] * p.log_t) * std::expm1((a[j] - b[j]) * p.log_t);
        }
        if (v < out.v_min) {
            out.v_min = v;
            out.t_at_min = p.t;
        }
    }
    out.nonneg = out.v_min >= -tol;
    if (!out.nonneg) {
        out.reason = "negative value on grid";
        return out;
    }

    // v'(1) = -psi, so psi < 0 forces v < 0 just below t = 1.
    if (out.psi < 0.0) {
        out.nonneg = false;
        out.reason = "psi < 0 gives v'(1) > 0";
        return out;
    }

    // Near t = 0 the smallest uncancelled exponent decides the sign of v.
    std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    while (i < ra.size() && j < rb.size()) {
        if (ra[i] == rb[j]) {
            ++i;
            ++j;
        } else if (ra[i] < rb[j]) {
            break;
        } else {
            out.nonneg = false;
            out.reason = "leading exponent at t -> 0 belongs to B";
            return out;
        }
    }
    return out;
}

Predicate symmetric_ratio_chain(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    if (A.size() != B.size()) {
        p.note = "needs |A| = |B|";
        return p;
    }
    p.verdict = Verdict::holds;
    const auto ea = elem_sym(A), eb = elem_sym(B);
    const std::size_t q = A.size();
    for (std::size_t k = 1; k <= q; ++k) {
        if (ea[k] < 0.0 || eb[k] < 0.0) {
            p.verdict = Verdict::fails;
            p.witness = k;
            p.note = "negative elementary symmetric polynomial";
            return p;
        }
        if (ea[k] == 0.0) {
            p.verdict = Verdict::fails;
            p.witness = k;
            p.note = "e_k(A) = 0";
            return p;
        }
    }
    if (q >= 1 && !geq_slack(eb[1], ea[1])) {
        p.verdict = Verdict::fails;
        p.witness = 1;
        p.note = "e_1(B)/e_1(A) < 1";
        return p;
    }
    for (std::size_t k = 1; k < q; ++k) {
        // e_{k+1}(B)/e_{k+1}(A) >= e_k(B)/e_k(A), cross-multiplied (denominators > 0).
        if (!geq_slack(eb[k + 1] * ea[k], eb[k] * ea[k + 1])) {
            p.verdict = Verdict::fails;
            p.witness = k + 1;
            p.note = "ratio chain decreases";
            return p;
        }
    }
    return p;
}

Predicate symmetric_ratios_geq1(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    if (A.size() != B.size()) {
        p.note = "needs |A| = |B|";
        return p;
    }
    p.verdict = Verdict::holds;
    const auto ea = elem_sym(A), eb = elem_sym(B);
    for (std::size_t k = 1; k < ea.size(); ++k) {
        if (ea[k] < 0.0 || !geq_slack(eb[k], ea[k])) {
            p.verdict = Verdict::fails;
            p.witness = k;
            return p;
        }
    }
    return p;
}

Predicate coeff_dominance(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    const long pp = static_cast<long>(A.size()), q = static_cast<long>(B.size());
    if (pp >= q) {
        p.note = "needs p < q";
        return p;
    }
    p.verdict = Verdict::holds;
    const auto ea = elem_sym(A), eb = elem_sym(B);
    for (long i = 0; i <= pp; ++i) {
        if (!geq_slack(elem_sym_at(eb, q - i), elem_sym_at(ea, pp - i))) {
            p.verdict = Verdict::fails;
            p.witness = static_cast<std::size_t>(i + 1);
            return p;
        }
    }
    return p;
}

Predicate ratio_decreasing_chain(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    const long pp = static_cast<long>(A.size()), q = static_cast<long>(B.size());
    if (pp >= q) {
        p.note = "needs p < q";
        return p;
    }
    p.verdict = Verdict::holds;
    const auto ea = elem_sym(A), eb = elem_sym(B);
    for (long i = 1; i <= pp; ++i) {
        if (!(ea[static_cast<std::size_t>(i)] > 0.0)) {
            p.verdict = Verdict::fails;
            p.witness = static_cast<std::size_t>(i);
            p.note = "e_i(A) must be positive";
            return p;
        }
    }
    // s_i = e_{q-p+i}(B) / e_i(A); need s_p <= s_{p-1} <= ... <= s_0.
    for (long i = pp; i >= 1; --i) {
        const double lhs = elem_sym_at(eb, q - pp + i) * ea[static_cast<std::size_t>(i - 1)];
        const double rhs = elem_sym_at(eb, q - pp + i - 1) * ea[static_cast<std::size_t>(i)];
        if (!geq_slack(rhs, lhs)) {
            p.verdict = Verdict::fails;
            p.witness = static_cast<std::size_t>(pp - i + 1);
            return p;
        }
    }
    return p;
}

Predicate q2_exact_criterion(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    if (A.size() != 2 || B.size() != 2) {
        p.note = "needs |A| = |B| = 2";
        return p;
    }
    const bool mins = A.min() <= B.min();
    const bool excess = parametric_excess(A, B) >= 0.0;
    p.verdict = (mins && excess) ? Verdict::holds : Verdict::fails;
    if (!mins) p.witness = 1;
    else if (!excess) p.witness = 2;
    return p;
}

Predicate kernel_positivity(const ParamVec& A, const ParamVec& B) {
    Predicate p;
    if (A.size() != B.size()) {
        p.note = "needs |A| = |B|";
        return p;
    }
    const auto v = v_nonneg_check(A, B);
    p.verdict = v.nonneg ? Verdict::holds : Verdict::fails;
    p.note = v.nonneg ? "v(t) >= 0 on (0,1]" : v.reason;
    return p;
}

ConditionReport condition_report(const ParamVec& A, const ParamVec& B) {
    ConditionReport r;
    r.psi = parametric_excess(A, B);

    if (A.size() == B.size()) {
        if (A.all_positive() && B.all_positive()) {
            const auto m = check_weak_supermajorization(A, B);
            r.weak_supermajorized.verdict = m.weak_supermajorized ? Verdict::holds : Verdict::fails;
            r.weak_supermajorized.witness = m.witness;
            r.majorized.verdict = m.majorized ? Verdict::holds : Verdict::fails;
        } else {
            r.weak_supermajorized.note = "needs positive entries";
            r.majorized.note = "needs positive entries";
        }
        const auto v = v_nonneg_check(A, B);
        r.v_min = v.v_min;
        r.v_nonneg.verdict = v.nonneg ? Verdict::holds : Verdict::fails;
        r.v_nonneg.note = v.reason;
    } else {
        r.weak_supermajorized.note = "needs |A| = |B|";
        r.majorized.note = "needs |A| = |B|";
        r.v_nonneg.note = "needs |A| = |B|";
    }
    r.symmetric_chain = symmetric_ratio_chain(A, B);
    r.symmetric_geq1 = symmetric_ratios_geq1(A, B);
    r.coeff_dominance = coeff_dominance(A, B);
    r.ratio_decreasing = ratio_decreasing_chain(A, B);
    r.q2_exact = q2_exact_criterion(A, B);
    if (r.q2_exact.verdict != Verdict::not_applicable) {
        r.q2_agrees_with_v = (r.q2_exact.verdict == r.v_nonneg.verdict);
    }
    return r;
}

BesselRates bessel_rates(const ParamVec& A, const ParamVec& B) {
    if (B.empty() || A.size() + 1 != B.size()) {
        throw ShapeError("rate constants need |A| = |B| - 1");
    }
    if (!A.all_positive() || !B.all_positive()) {
        throw NonPositiveParameter("rate constants need positive parameters");
    }
    const auto ea = elem_sym(A), eb = elem_sym(B);
    const long q = static_cast<long>(B.size());
    BesselRates r;
    r.c = -std::numeric_limits<double>::infinity();
    r.d = std::numeric_limits<double>::infinity();
    for (long i = 1; i <= q; ++i) {
        const double ratio = (elem_sym_at(eb, i) - elem_sym_at(ea, i)) / elem_sym_at(ea, i - 1);
        r.c = std::max(r.c, ratio);
        r.d = std::min(r.d, ratio);
    }
    r.d_positive = r.d > 0.0;
    return r;
}

bool has_nonpositive_integer(const ParamVec& values) noexcept {
    return std::any_of(values.begin(), values.end(),
                       [](double x) { return x <= 0.0 && x == std::nearbyint(x); });
}

}  // namespace hyperbound
