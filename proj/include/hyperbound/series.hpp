#pragma once

#include "hyperbound/eval_result.hpp"
#include "hyperbound/params.hpp"

namespace hyperbound {

/// Parameter rows of pFq(A; B; x).
struct HyperSpec {
    ParamVec A;
    ParamVec B;

    [[nodiscard]] std::size_t p() const noexcept { return A.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return B.size(); }
    /// Throws DomainError when p > q + 1 or a lower parameter is in -N0.
    void validate() const;
    /// Radius of convergence of the power series: infinity for p <= q, 1 for p = q + 1.
    [[nodiscard]] double radius() const noexcept;
};

inline constexpr double default_series_tol = 1e-14;

/// Sums the power series at real x. The sum is carried in double precision and
/// redone in double-double, then 50 and 110 decimal digits, while the largest
/// term is big enough, relative to the sum, that rounding would exceed tol.
/// Throws DomainError outside the disk of convergence and NonConvergence when
/// 110 digits cannot hold the cancellation.
[[nodiscard]] EvalResult eval_pfq(const HyperSpec& spec, double x, double tol = default_series_tol);

/// n-th derivative in x via d^n/dx^n pFq(A;B;x) = (A)_n/(B)_n pFq(A+n;B+n;x).
[[nodiscard]] EvalResult derivative_pfq(const HyperSpec& spec, double x, unsigned n,
                                        double tol = default_series_tol);

/// Generalized cosine sum_j (-1)^j z^{nj} / (nj)!, n >= 1.
[[nodiscard]] double cos_n(int n, double z);

}  // namespace hyperbound
