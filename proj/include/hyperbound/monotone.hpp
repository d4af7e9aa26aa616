#pragma once

#include <limits>
#include <vector>

#include "hyperbound/eval_result.hpp"
#include "hyperbound/params.hpp"
#include "hyperbound/report.hpp"
#include "hyperbound/representations.hpp"

namespace hyperbound {

inline constexpr int default_cm_order = 6;
inline constexpr int max_cm_order = 8;
inline constexpr int max_fd_order = 4;

struct ScanOptions {
    /// Absolute slack added to the propagated evaluation error.
    double tol = 1e-10;
    /// Throw HypothesisFailed instead of recording a failed hypothesis and
    /// scanning anyway (ratio and log-convexity scans only).
    bool require_hypotheses = false;
};

/// 64 log-spaced points on [0.01, 20].
[[nodiscard]] std::vector<double> default_cm_grid();

/// (-1)^n d^n/dx^n F(A; B; -x) = f_n F(A+n; B+n; -x).
[[nodiscard]] EvalResult cm_derivative(const HyperSpec& spec, double x, int n);

/// Complete monotonicity of x -> pFq(A; B; -x) on (0, inf) up to order n_max.
/// The margin at (x, n) is (-1)^n times the n-th derivative.
[[nodiscard]] MonotoneReport cm_check(const HyperSpec& spec, int n_max, const std::vector<double>& x_grid,
                                      const ScanOptions& opts = {});

/// g(x) = x^{-sigma} (q+1)Fq(sigma, A; B; -1/x) with |A| = |B|.
struct StieltjesTriple {
    double sigma = 1.0;
    ParamVec A;
    ParamVec B;
};

enum class DerivativeMethod { analytic, finite_difference };

[[nodiscard]] EvalResult composite_value(const StieltjesTriple& g, double x);
/// (-1)^n g^{(n)}(x) = (sigma)_n x^{-sigma-n} F(sigma+n, A; B; -1/x).
[[nodiscard]] EvalResult composite_derivative(const StieltjesTriple& g, double x, int n);
/// (-1)^n g^{(n)}(x) from a central stencil with h = max(1e-3 x, 1e-4), n <= 4.
[[nodiscard]] double composite_derivative_fd(const StieltjesTriple& g, double x, int n);

[[nodiscard]] MonotoneReport cm_check(const StieltjesTriple& g, int n_max, const std::vector<double>& x_grid,
                                      const ScanOptions& opts = {},
                                      DerivativeMethod method = DerivativeMethod::analytic);

/// Complete monotonicity of -(log g)' up to order 4. The margin at order k is
/// (-1)^k h^{(k)}(x) x^{k+1}/k! with h = -(log g)'.
[[nodiscard]] MonotoneReport log_cm_check(double sigma, const ParamVec& A, const ParamVec& B,
                                          const std::vector<double>& x_grid, const ScanOptions& opts = {});

/// Where a ratio or log-convexity statement is known to hold.
struct ClauseDomain {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool lo_open = true;
    std::vector<HypothesisEntry> hypotheses;
    /// Every hypothesis behind the base domain holds.
    bool base_holds = false;
};

/// Hypotheses and widest admissible x-interval for the split (A1, A2; B1, B2).
[[nodiscard]] ClauseDomain clause_domain(const SplitSpec& split);

/// r(x) = F(A1, A2+mu; B1, B2+mu; -x) / F(A1, A2; B1, B2; -x). Grid points
/// outside the clause domain are skipped; the margins are r(x_i) - r(x_{i+1})
/// over the sorted remaining points.
[[nodiscard]] MonotoneReport ratio_monotone_check(const SplitSpec& split, double mu,
                                                  const std::vector<double>& x_grid,
                                                  const ScanOptions& opts = {});

/// Second divided differences of mu -> log F(A1, A2+mu; B1, B2+mu; -x) over
/// the sorted mu_grid, scaled to estimate the second derivative.
[[nodiscard]] MonotoneReport logconvex_check(const SplitSpec& split, const std::vector<double>& mu_grid,
                                             double x, const ScanOptions& opts = {});

}  // namespace hyperbound
