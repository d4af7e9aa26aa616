#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperbound/eval_result.hpp"
#include "hyperbound/gkernel.hpp"
#include "hyperbound/quad.hpp"
#include "hyperbound/series.hpp"

namespace hyperbound {

/// Partition of pFq(A1, A2; B1, B2; -z) into a hypergeometric kernel
/// p1Fq1(A1; B1; -zt) and a G-function measure built from (A2, B2).
struct SplitSpec {
    ParamVec A1;
    ParamVec B1;
    ParamVec A2;
    ParamVec B2;

    [[nodiscard]] double psi2() const noexcept { return B2.sum() - A2.sum(); }
    [[nodiscard]] HyperSpec target() const;
    /// Throws SpecViolation when the partition admits no representation.
    void validate() const;
};

/// Probability-normalised measure Gamma(top)/Gamma(bottom) G(t) dt/t, plus the
/// unit-weight atom at t = 1 when a balanced kernel has psi = 0. Quadrature
/// nodes and kernel values are computed once at construction.
class KernelMeasure {
public:
    /// log_growth(t) bounds log|f(t)| for the integrands to come; on (0,inf)
    /// it moves the point where the tail is cut off.
    explicit KernelMeasure(KernelSpec spec, QuadratureConfig cfg = {},
                           const std::function<double(double)>& log_growth = {});

    [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    /// Weight of the atom at t = 1 (0 unless balanced with psi = 0).
    [[nodiscard]] double atom() const noexcept { return atom_; }
    /// Mass of the continuous part; 1 - atom() up to quadrature error.
    [[nodiscard]] EvalResult mass() const;
    /// Integral of f(t, 1 - t) against the continuous part.
    [[nodiscard]] EvalResult integrate(const std::function<double(double, double)>& f) const;
    /// As integrate, for integrands known only to within their own abs_err.
    [[nodiscard]] EvalResult integrate_uncertain(const std::function<EvalResult(double, double)>& f) const;
    [[nodiscard]] std::size_t node_count() const noexcept;

private:
    struct Node {
        double t;
        double tc;
        double w;    // rule weight times normalised density
        double err;  // rule weight times kernel error bound
    };
    [[nodiscard]] std::vector<Node> build_level(int level) const;

    KernelSpec spec_;
    KernelKind kind_;
    QuadratureConfig cfg_;
    std::shared_ptr<const GKernel> kernel_;
    double norm_ = 1.0;
    double atom_ = 0.0;
    bool subtract_ = false;
    double u_lo_ = 0.0;
    double u_hi_ = 0.0;
    std::vector<std::vector<Node>> levels_;
};

enum class RepKind {
    stieltjes,
    general_split,
    laplace_q_plus_1,
    laplace_q_q,
    laplace_q_q_psi0,
    cosine_psi_gt_half,
    cosine_psi_eq_half,
    small_p,
};

[[nodiscard]] std::string_view to_string(RepKind k) noexcept;
[[nodiscard]] RepKind parse_rep_kind(std::string_view name);

/// One integral representation of target(-z) = atom * kernel(z) + int kernel(z t) dmu(t).
/// Immutable; evaluating at many z reuses the cached measure.
class IntegralRep {
public:
    [[nodiscard]] EvalResult operator()(double z) const;
    [[nodiscard]] const HyperSpec& target() const noexcept { return target_; }
    [[nodiscard]] RepKind kind() const noexcept { return kind_; }
    /// Representation holds for z > z_min(), or z >= z_min() when z_min_closed().
    [[nodiscard]] double z_min() const noexcept { return z_min_; }
    [[nodiscard]] bool z_min_closed() const noexcept { return z_min_closed_; }
    [[nodiscard]] const KernelMeasure& measure() const noexcept { return *measure_; }

private:
    friend IntegralRep make_stieltjes_rep(double, const ParamVec&, const ParamVec&, const QuadratureConfig&);
    friend IntegralRep make_split_rep(const SplitSpec&, const QuadratureConfig&);
    friend IntegralRep make_laplace_rep(const ParamVec&, const ParamVec&, RepKind, const QuadratureConfig&);
    friend IntegralRep make_cosine_rep(const ParamVec&, const ParamVec&, RepKind, const QuadratureConfig&);
    friend IntegralRep make_small_p_rep(const ParamVec&, const ParamVec&, const ParamVec&,
                                        const QuadratureConfig&);

    IntegralRep() = default;

    RepKind kind_ = RepKind::stieltjes;
    HyperSpec target_;
    std::shared_ptr<const KernelMeasure> measure_;
    /// kernel(y) with y = z t; returns value and error
    std::function<EvalResult(double)> kernel_;
    /// log of the kernel's growth at y = z t < 0, for the tail cut-off
    std::function<double(double)> log_growth_;
    double z_min_ = -std::numeric_limits<double>::infinity();
    bool z_min_closed_ = false;
    QuadratureConfig cfg_;
};

/// (q+1)F_q(sigma, A; B; -z) through the kernel (1 + z t)^{-sigma}; z > -1.
[[nodiscard]] IntegralRep make_stieltjes_rep(double sigma, const ParamVec& A, const ParamVec& B,
                                             const QuadratureConfig& cfg = {});
[[nodiscard]] IntegralRep make_split_rep(const SplitSpec& split, const QuadratureConfig& cfg = {});
/// kind is laplace_q_plus_1, laplace_q_q or laplace_q_q_psi0.
[[nodiscard]] IntegralRep make_laplace_rep(const ParamVec& A, const ParamVec& B, RepKind kind,
                                           const QuadratureConfig& cfg = {});
/// kind is cosine_psi_gt_half or cosine_psi_eq_half; |A| = |B| - 1.
[[nodiscard]] IntegralRep make_cosine_rep(const ParamVec& A, const ParamVec& B, RepKind kind,
                                          const QuadratureConfig& cfg = {});
/// p < q with artificial bottom parameters alphas, |alphas| = q - p.
[[nodiscard]] IntegralRep make_small_p_rep(const ParamVec& A, const ParamVec& B, const ParamVec& alphas,
                                           const QuadratureConfig& cfg = {});

[[nodiscard]] EvalResult stieltjes_rep_eval(double sigma, const ParamVec& A, const ParamVec& B, double z,
                                            const QuadratureConfig& cfg = {});
[[nodiscard]] EvalResult general_split_eval(const SplitSpec& split, double z, const QuadratureConfig& cfg = {});
[[nodiscard]] EvalResult laplace_rep_eval(const ParamVec& A, const ParamVec& B, double z, RepKind kind,
                                          const QuadratureConfig& cfg = {});
[[nodiscard]] EvalResult cosine_rep_eval(const ParamVec& A, const ParamVec& B, double z, RepKind kind,
                                         const QuadratureConfig& cfg = {});
[[nodiscard]] EvalResult small_p_rep_eval(const ParamVec& A, const ParamVec& B, const ParamVec& alphas, double z,
                                          const QuadratureConfig& cfg = {});

/// Everything needed to build one representation from the command line or a test.
struct RepDescriptor {
    RepKind kind = RepKind::stieltjes;
    double sigma = 1.0;
    ParamVec A;
    ParamVec B;
    SplitSpec split;
    ParamVec alphas;

    [[nodiscard]] IntegralRep build(const QuadratureConfig& cfg = {}) const;
};

struct RepPoint {
    double z = 0.0;
    double rep = 0.0;
    double series = 0.0;
    double budget = 0.0;  // rep.abs_err + series.abs_err
    double abs_diff = 0.0;
    double rel_diff = 0.0;
    std::optional<std::string> error;
};

struct RepReport {
    std::vector<RepPoint> points;
    double max_abs = 0.0;
    double max_rel = 0.0;
    /// Largest abs_diff / budget over the grid.
    double max_budget_ratio = 0.0;
    std::size_t failures = 0;
};

/// Representation against the power series on a grid of z (series at -z).
/// Points where either side fails are recorded, not thrown.
[[nodiscard]] RepReport rep_vs_series(const RepDescriptor& desc, const std::vector<double>& z_grid,
                                      const QuadratureConfig& cfg = {});

/// Value of pFq(A; B; x) by whichever route applies: the power series, or an
/// integral representation when x lies outside the disk of convergence or the
/// series cancels beyond the precision ladder.
struct RobustValue {
    EvalResult result;
    std::string method;
};
[[nodiscard]] RobustValue evaluate_pfq(const HyperSpec& spec, double x, double tol = default_series_tol);

/// evaluate_pfq for many arguments of one spec. The integral representation is
/// built on first use and kept, so a scan pays for its measure once. Not safe
/// to share between threads.
class PfqEvaluator {
public:
    explicit PfqEvaluator(HyperSpec spec, double tol = default_series_tol);

    [[nodiscard]] RobustValue operator()(double x) const;
    [[nodiscard]] const HyperSpec& spec() const noexcept { return spec_; }

private:
    void prepare_fallback() const;
    [[nodiscard]] RobustValue by_representation(double x, const std::string& why) const;

    HyperSpec spec_;
    double tol_;
    mutable bool fallback_ready_ = false;
    mutable std::optional<IntegralRep> rep_;
    mutable std::optional<double> closed_sigma_;
    mutable std::string method_;
    mutable std::string failure_;
};

}  // namespace hyperbound
