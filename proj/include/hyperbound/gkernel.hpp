#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperbound/eval_result.hpp"
#include "hyperbound/params.hpp"
#include "hyperbound/report.hpp"

namespace hyperbound {

/// Principal branch of log Gamma(z). Throws PoleError at nonpositive integers.
[[nodiscard]] std::complex<double> log_gamma_complex(std::complex<double> z);

enum class KernelKind {
    balanced,  ///< as many bottom as top entries; supported on (0,1)
    laplace,   ///< more bottom than top entries; supported on (0,inf)
    zero,      ///< fewer bottom than top entries; identically zero
};

[[nodiscard]] std::string_view to_string(KernelKind k) noexcept;

/// Density G^{m,0}_{n,m}(t | top; bottom) with Mellin transform
/// prod Gamma(bottom + s) / prod Gamma(top + s). The kind follows from the row
/// lengths.
struct KernelSpec {
    ParamVec bottom;
    ParamVec top;

    [[nodiscard]] KernelKind kind() const noexcept;
    /// sum(top) - sum(bottom)
    [[nodiscard]] double psi() const noexcept;
    /// bottom.size() - top.size()
    [[nodiscard]] long mu() const noexcept;
    /// Throws DomainError on an empty bottom row.
    void validate() const;
};

/// Vertical Mellin-Barnes contour Re s = re_offset. height = infinity
/// integrates the whole line with an exp-sinh rule; a finite height truncates
/// at |Im s| = height and uses tanh-sinh. nodes caps the work per level.
struct ContourSpec {
    double re_offset = 0.0;
    double height = std::numeric_limits<double>::infinity();
    int nodes = 6144;
};

enum class KernelMethod { automatic, residue, mellin_barnes, closed_form };

[[nodiscard]] std::string_view to_string(KernelMethod m) noexcept;
[[nodiscard]] KernelMethod parse_kernel_method(std::string_view name);

/// Evaluator for one kernel. Construction precomputes the coefficients of the
/// expansion about t = 1 for balanced kernels, so repeated evaluation is cheap.
/// Immutable after construction and safe to share between threads.
class GKernel {
public:
    explicit GKernel(KernelSpec spec);

    [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }

    [[nodiscard]] EvalResult operator()(double t, KernelMethod method = KernelMethod::automatic) const;
    /// Balanced kernels: evaluation at t with 1 - t supplied separately, for
    /// points that crowd the right end of the support.
    [[nodiscard]] EvalResult eval_split(double t, double one_minus_t) const;

    [[nodiscard]] EvalResult residue(double t) const;
    [[nodiscard]] EvalResult mellin_barnes(double t) const;
    [[nodiscard]] EvalResult mellin_barnes(double t, const ContourSpec& contour) const;
    [[nodiscard]] EvalResult closed_form(double t) const;
    /// Expansion in powers of 1 - t; balanced kernels only. Empty when the
    /// stored coefficients do not reach the requested accuracy at this point.
    [[nodiscard]] std::optional<EvalResult> endpoint_expansion(double t, double one_minus_t) const;

    [[nodiscard]] bool has_closed_form() const noexcept;
    /// True when two bottom entries differ by (nearly) an integer.
    [[nodiscard]] bool degenerate() const noexcept { return !groups_.empty(); }
    [[nodiscard]] ContourSpec default_contour(double t) const;

private:
    KernelSpec spec_;
    KernelKind kind_;
    std::vector<double> endpoint_coeffs_;  // c_n of t^alpha (1-t)^{psi-1} sum c_n (1-t)^n
    double endpoint_alpha_ = 0.0;
    double endpoint_psi_ = 0.0;
    std::vector<std::vector<std::size_t>> groups_;  // bottom indices congruent modulo integers
};

/// One-shot evaluation; builds a GKernel internally.
[[nodiscard]] EvalResult kernel_eval(const KernelSpec& spec, double t,
                                     KernelMethod method = KernelMethod::automatic);

/// Leading behaviour at the ends of the support.
struct KernelAsymptotics {
    /// t -> 0: G ~ t^zero_exponent ln^{zero_log_power} t
    double zero_exponent = 0.0;
    int zero_log_power = 0;
    /// Laplace kind, t -> inf: G ~ C t^{(1 - inf_alpha)/mu} exp(-mu t^{1/mu}).
    std::optional<long> inf_mu;
    std::optional<double> inf_alpha;
    std::optional<double> inf_constant;
    /// Balanced kind, t -> 1: G ~ (1 - t)^{psi - 1} / Gamma(psi).
    std::optional<double> one_exponent;
};

[[nodiscard]] KernelAsymptotics kernel_asymptotics(const KernelSpec& spec);

/// Minimum of a balanced kernel over a composite grid of (0,1) with `points`
/// nodes. The note records whether v(t) >= 0 holds for the rows, in which case
/// a failing scan indicates a numerical defect.
[[nodiscard]] MonotoneReport kernel_nonneg_scan(const KernelSpec& spec, int points = 512);

}  // namespace hyperbound
