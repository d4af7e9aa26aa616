#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperbound/eval_result.hpp"
#include "hyperbound/params.hpp"
#include "hyperbound/report.hpp"

namespace hyperbound {

enum class BoundSide { lower, upper };

[[nodiscard]] std::string_view to_string(BoundSide s) noexcept;

/// One elementary envelope together with the hypotheses it rests on.
struct Envelope {
    std::string name;
    BoundSide side = BoundSide::lower;
    double value = 0.0;
    std::vector<std::string> needs;
    /// Every hypothesis in needs holds.
    bool certified = false;
};

/// Outcome of one bound family at one point. Envelope values are returned even
/// when their hypotheses fail; such values are advisory.
struct BoundCertificate {
    std::string family;
    double x = 0.0;
    std::vector<HypothesisEntry> hypotheses;
    std::vector<Envelope> envelopes;
    /// Tightest certified envelope on each side, or the tightest advisory one
    /// when none is certified.
    std::optional<double> lower;
    std::optional<double> upper;
    bool lower_certified = false;
    bool upper_certified = false;
    /// Named scalars the envelopes are built from (f1, f2, c, d, ...).
    std::vector<std::pair<std::string, double>> constants;
    std::optional<EvalResult> reference;
    std::string reference_method;

    [[nodiscard]] bool all_hypotheses_hold() const noexcept;
    [[nodiscard]] const HypothesisEntry* hypothesis(std::string_view name) const noexcept;
    [[nodiscard]] const Envelope* envelope(std::string_view name) const noexcept;
    /// Every certified envelope is on the right side of the reference, allowing
    /// tol * max(1, |reference|) of slack. True when there is no reference.
    [[nodiscard]] bool sandwich_holds(double tol) const;
};

struct BoundOptions {
    /// Evaluate the function itself at the same point.
    bool with_reference = true;
    double reference_tol = 1e-14;
};

enum class StieltjesSign { positive_arg, negative_arg };

[[nodiscard]] std::string_view to_string(StieltjesSign s) noexcept;
[[nodiscard]] StieltjesSign parse_stieltjes_sign(std::string_view name);

/// qFq(A;B;x), x >= 0. Plain: [exp(f1 x), 1 - f1 + f1 e^x]; refined:
/// [1 + (f1^2/f2)(exp(f2 x/f1) - 1), 1 - f2 + (f1 - f2) x + f2 e^x]. Lower
/// envelopes need the symmetric ratio chain, upper ones only ratios >= 1.
[[nodiscard]] BoundCertificate luke_bounds(const ParamVec& A, const ParamVec& B, double x, bool refined,
                                           const BoundOptions& opts = {});

/// (q+1)Fq(sigma, A; B; x) for 0 <= x < 1 (positive_arg, plain or refined), or
/// (q+1)Fq(sigma, A; B; -x) for x >= 0 (negative_arg, plain only).
[[nodiscard]] BoundCertificate stieltjes_bounds(double sigma, const ParamVec& A, const ParamVec& B, double x,
                                                bool refined, StieltjesSign sign, const BoundOptions& opts = {});

/// qFq(A;B;-x) for real x: [exp(-f1 x), 1 - f1 + f1 e^{-x}] under v(t) >= 0.
[[nodiscard]] BoundCertificate jensen_bounds(const ParamVec& A, const ParamVec& B, double x,
                                             const BoundOptions& opts = {});

/// pFq(A;B;x), p < q, x >= 0: upper envelopes 1 - f1 + f1 e^x and exp(f1 x),
/// each gated by its own coefficient condition.
[[nodiscard]] BoundCertificate upper_bounds_p_lt_q(const ParamVec& A, const ParamVec& B, double x,
                                                   const BoundOptions& opts = {});

/// (q-1)Fq(A;B;x), x >= 0, through 0F1(;c;x) <= (q-1)Fq <= 0F1(;d;x) with the
/// rate constants c and d of bessel_rates.
[[nodiscard]] BoundCertificate bessel_bounds(const ParamVec& A, const ParamVec& B, double x,
                                             const BoundOptions& opts = {});

/// 0F1(;c;x), c > 0, x >= 0, from the integrated Bessel ratio bounds.
[[nodiscard]] BoundCertificate f01_bounds(double c, double x, const BoundOptions& opts = {});

/// log of the lower and upper elementary envelopes of 0F1(;c;x).
[[nodiscard]] double log_f01_lower(double c, double x);
[[nodiscard]] double log_f01_upper(double c, double x);

enum class CoeffLemma {
    decreasing,    ///< f_{n+1} <= f_n for n >= 1 (ratios >= 1)
    power_lower,   ///< f_1^n <= f_n (symmetric ratio chain)
    bessel_lower,  ///< f_n >= 1/(c)_n
    bessel_upper,  ///< f_n (d)_n <= 1, d > 0
};

[[nodiscard]] std::string_view to_string(CoeffLemma l) noexcept;

struct CoeffLemmaReport {
    CoeffLemma lemma = CoeffLemma::decreasing;
    unsigned n_max = 0;
    /// Smallest log-space slack over n (>= 0 when the inequality holds).
    double min_log_slack = 0.0;
    unsigned argmin = 0;
    bool holds = false;
};

/// Checks the coefficient inequality behind a bound for n = 1..n_max in log
/// space, allowing a relative rounding slack that grows linearly with n.
[[nodiscard]] CoeffLemmaReport check_coeff_lemma(CoeffLemma lemma, const ParamVec& A, const ParamVec& B,
                                                 unsigned n_max = 100);

}  // namespace hyperbound
