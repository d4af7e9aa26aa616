#include "hyperbound/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hyperbound/detail/double_double.hpp"
#include "hyperbound/detail/gamma_real.hpp"
#include "hyperbound/errors.hpp"

namespace hyperbound {

using detail::DoubleDouble;

void HyperSpec::validate() const {
    if (p() > q() + 1) {
        std::ostringstream msg;
        msg << "pFq needs p <= q + 1 (got p = " << p() << ", q = " << q() << ")";
        throw DomainError(msg.str());
    }
    for (double b : B) {
        if (detail::is_nonpositive_integer(b)) {
            std::ostringstream msg;
            msg << "lower parameter " << b << " is a nonpositive integer";
            throw DomainError(msg.str());
        }
    }
}

double HyperSpec::radius() const noexcept {
    return p() <= q() ? std::numeric_limits<double>::infinity() : 1.0;
}

namespace {

constexpr std::size_t max_terms = 400000;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double dd_eps = 1.3e-32;

using Float50 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>>;
using Float110 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<110>>;
constexpr double float50_eps = 1e-49;
constexpr double float110_eps = 1e-109;

template <class Num>
double to_double(const Num& v) {
    if constexpr (std::is_same_v<Num, double>) return v;
    else if constexpr (std::is_same_v<Num, DoubleDouble>) return v.to_double();
    else return v.template convert_to<double>();
}

// a + k without rounding beyond the working precision.
template <class Num>
Num shifted(double a, std::size_t k) {
    if constexpr (std::is_same_v<Num, double>) return a + static_cast<double>(k);
    else if constexpr (std::is_same_v<Num, DoubleDouble>) return detail::two_sum(a, static_cast<double>(k));
    else return Num(a) + Num(k);
}

// Index beyond which no factor (a + k) or (b + k) can still change sign.
double settled_index(const HyperSpec& spec) {
    double m = 0.0;
    for (double a : spec.A) m = std::max(m, -a);
    for (double b : spec.B) m = std::max(m, -b);
    return std::ceil(m) + 2.0;
}

// Polynomial case: an upper parameter in -N0 truncates the series.
std::optional<std::size_t> terminating_degree(const ParamVec& A) {
    std::optional<std::size_t> deg;
    for (double a : A) {
        if (detail::is_nonpositive_integer(a)) {
            const auto m = static_cast<std::size_t>(-a);
            deg = deg ? std::min(*deg, m) : m;
        }
    }
    return deg;
}

struct SumState {
    double sum = 0.0;
    double max_term = 0.0;
    double weighted = 0.0;  // sum |t_k| sqrt((k+1)(p+q+2)): accumulated recurrence rounding
    double tail = 0.0;
    std::size_t terms = 0;

    [[nodiscard]] double rounding(double unit) const {
        return unit * (weighted + max_term * std::sqrt(static_cast<double>(terms)));
    }
};

// Generic summation loop; Num is double or DoubleDouble.
template <class Num>
SumState sum_series(const HyperSpec& spec, double x, double tol, std::optional<std::size_t> degree) {
    const double limit_ratio = spec.p() == spec.q() + 1 ? std::abs(x) : 0.0;
    const double settle = settled_index(spec);
    const std::size_t ops_per_term = spec.p() + spec.q() + 2;

    Num term(1.0);
    Num sum(0.0);
    double comp = 0.0;  // Neumaier compensation, double path only
    SumState st;
    int monotone_run = 0;
    double prev_ratio = -1.0;

    for (std::size_t k = 0;; ++k) {
        const double tk = to_double(term);
        if (!std::isfinite(tk)) throw NonConvergence("series terms overflow");
        st.max_term = std::max(st.max_term, std::abs(tk));
        st.weighted += std::abs(tk) * std::sqrt(static_cast<double>((k + 1) * ops_per_term));
        if constexpr (std::is_same_v<Num, double>) {
            const double t = sum + term;
            comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        } else {
            sum += term;
        }
        st.terms = k + 1;

        if (degree && k >= *degree) {
            st.tail = 0.0;
            break;
        }

        // Next term via the ratio (a+k).../(b+k)...(k+1).
        Num num(x), den(static_cast<double>(k + 1));
        for (double a : spec.A) num *= shifted<Num>(a, k);
        for (double b : spec.B) den *= shifted<Num>(b, k);
        term = term * num / den;

        const double next = std::abs(to_double(term));
        const double ratio = tk != 0.0 ? next / std::abs(tk) : 0.0;
        if (next == 0.0) {
            st.tail = 0.0;
            break;
        }
        if (prev_ratio >= 0.0 && static_cast<double>(k) >= settle) {
            const bool mono = (ratio <= prev_ratio) || (ratio <= limit_ratio && ratio >= prev_ratio);
            monotone_run = mono ? monotone_run + 1 : 0;
        }
        prev_ratio = ratio;

        const double current = [&] {
            if constexpr (std::is_same_v<Num, double>) return std::abs(sum + comp);
            else return std::abs(to_double(sum));
        }();
        if (monotone_run >= 5 && ratio < 1.0) {
            // Ratios from here on stay below max(ratio, |x|) for p = q + 1, below ratio otherwise.
            const double r_sup = std::max(ratio, limit_ratio);
            if (r_sup < 1.0) {
                const double tail = next / (1.0 - r_sup);
                if (tail <= tol * current || tail < std::numeric_limits<double>::min()) {
                    st.tail = tail;
                    break;
                }
            }
        }
        if (k + 1 >= max_terms) throw NonConvergence("series did not converge within the term budget");
    }

    if constexpr (std::is_same_v<Num, double>) st.sum = sum + comp;
    else st.sum = to_double(sum);
    return st;
}

}  // namespace

EvalResult eval_pfq(const HyperSpec& spec, double x, double tol) {
    spec.validate();
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!std::isfinite(x)) throw DomainError("argument must be finite");
    const bool gauss = spec.p() == spec.q() + 1;
    const auto degree = terminating_degree(spec.A);
    if (gauss && std::abs(x) >= 1.0 && !degree) {
        throw DomainError("series for p = q + 1 diverges for |x| >= 1");
    }
    if (x == 0.0) return {1.0, 0.0, 1};

    // Precision ladder: double, double-double, then 50 and 110 decimal digits.
    auto st = sum_series<double>(spec, x, tol, degree);
    double round = st.rounding(eps);
    const double budget = std::max(tol, 1e-12);
    auto escalate = [&](auto tag, double unit) {
        using Num = typename decltype(tag)::type;
        st = sum_series<Num>(spec, x, tol, degree);
        round = st.rounding(unit) + eps * std::abs(st.sum);
        return round <= budget * std::abs(st.sum);
    };
    if (round > tol * std::abs(st.sum) &&
        !escalate(std::type_identity<DoubleDouble>{}, dd_eps) &&
        !escalate(std::type_identity<Float50>{}, float50_eps) &&
        !escalate(std::type_identity<Float110>{}, float110_eps)) {
        std::ostringstream msg;
        msg << "cancellation of " << st.max_term / std::max(std::abs(st.sum), 1e-300)
            << " exceeds the extended-precision budget";
        throw NonConvergence(msg.str());
    }
    return {st.sum, st.tail + round, st.terms};
}

EvalResult derivative_pfq(const HyperSpec& spec, double x, unsigned n, double tol) {
    if (n == 0) return eval_pfq(spec, x, tol);
    spec.validate();
    const double f = coeff_f(spec.A, spec.B, n);
    if (f == 0.0) return {0.0, 0.0, 1};
    const HyperSpec shifted{spec.A.shifted(n), spec.B.shifted(n)};
    auto r = eval_pfq(shifted, x, tol);
    r.value *= f;
    r.abs_err *= std::abs(f);
    return r;
}

double cos_n(int n, double z) {
    if (n < 1) throw DomainError("generalized cosine needs n >= 1");
    if (!std::isfinite(z)) throw DomainError("argument must be finite");
    if (z == 0.0) return 1.0;
    DoubleDouble zn(1.0);
    for (int i = 0; i < n; ++i) zn *= DoubleDouble(z);
    const DoubleDouble step = -zn;
    DoubleDouble term(1.0), sum(0.0);
    double max_term = 0.0;
    for (long j = 0;; ++j) {
        sum += term;
        max_term = std::max(max_term, std::abs(term.to_double()));
        DoubleDouble den(1.0);
        for (long i = 1; i <= n; ++i) den *= DoubleDouble(static_cast<double>(n * j + i));
        term = term * step / den;
        const double t = std::abs(term.to_double());
        if (!std::isfinite(t)) throw NonConvergence("generalized cosine overflow");
        if (static_cast<double>(n * (j + 1)) > std::abs(z) &&
            t <= 1e-34 * std::max(max_term, std::abs(sum.to_double()))) {
            break;
        }
        if (j > 100000) throw NonConvergence("generalized cosine did not converge");
    }
    return sum.to_double();
}

}  // namespace hyperbound
