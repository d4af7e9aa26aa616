#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hyperbound/eval_result.hpp"

namespace hyperbound {

/// Tolerances and endpoint hints for the double-exponential rules.
///
/// endpoint_exponents are the algebraic strengths e of the integrand near each
/// end (f ~ t^e near 0, f ~ (1-t)^e near 1). They only decide how far the node
/// set reaches towards the endpoint; 0 is a safe default for bounded integrands.
/// For half-line integrals the second entry is the algebraic decay exponent at
/// infinity, with 0 meaning "decays at least exponentially".
struct QuadratureConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    int max_levels = 10;
    std::array<double, 2> endpoint_exponents{0.0, 0.0};

    void validate() const;
};

/// One abscissa of a tanh-sinh or exp-sinh rule. For the unit interval xc
/// holds 1 - x without cancellation; weight already includes dx/du.
struct QuadNode {
    double x;
    double xc;
    double weight;
};

/// Nodes that are new at the given level (level 0: step 1; level l: odd
/// multiples of 2^-l). The level-l estimate is 2^-l times the sum over all
/// nodes of levels 0..l.
[[nodiscard]] std::vector<QuadNode> tanh_sinh_level(int level, double u_lo, double u_hi);
[[nodiscard]] std::vector<QuadNode> exp_sinh_level(int level, double u_lo, double u_hi, double scale);

[[nodiscard]] double level_step(int level) noexcept;

/// Range of the transformed variable u that reaches close enough to the
/// endpoints for the configured exponents and tolerance.
struct URange {
    double lo;
    double hi;
};
[[nodiscard]] URange tanh_sinh_range(const QuadratureConfig& cfg);
[[nodiscard]] URange exp_sinh_range(const QuadratureConfig& cfg);

/// Integral over (0,1) by tanh-sinh with level doubling. The error estimate is
/// the difference of the last two levels. Throws NoConvergence. An integrand
/// singular at 1 loses the part within one ulp of 1; use integrate_01_split.
[[nodiscard]] EvalResult integrate_01(const std::function<double(double)>& f,
                                      const QuadratureConfig& cfg = {});
/// Same, with the integrand receiving (t, 1 - t) so endpoint singularities at 1
/// can be evaluated without cancellation.
[[nodiscard]] EvalResult integrate_01_split(const std::function<double(double, double)>& f,
                                            const QuadratureConfig& cfg = {});

/// Integral over (0, inf) by the exp-sinh substitution t = scale * exp(pi/2 sinh u).
[[nodiscard]] EvalResult integrate_0inf(const std::function<double(double)>& f, double decay_scale,
                                        const QuadratureConfig& cfg = {});

}  // namespace hyperbound
