#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperbound {

/// Ordered sequence of finite real parameters (an upper or lower row of a
/// hypergeometric function). Construction rejects NaN and infinities.
class ParamVec {
public:
    ParamVec() = default;
    ParamVec(std::initializer_list<double> values);
    explicit ParamVec(std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

    /// Ascending copy; the original order is kept for display.
    [[nodiscard]] ParamVec sorted() const;
    [[nodiscard]] ParamVec shifted(double alpha) const;
    [[nodiscard]] ParamVec with(double extra) const;
    [[nodiscard]] ParamVec concat(const ParamVec& other) const;
    /// Copy with one occurrence of the largest element removed.
    [[nodiscard]] ParamVec without_max() const;

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] bool all_positive() const noexcept;

    friend bool operator==(const ParamVec&, const ParamVec&) = default;

private:
    std::vector<double> values_;
};

/// Three-state outcome of a hypothesis predicate. Predicates whose shape
/// requirements are not met report not_applicable rather than fails.
enum class Verdict { holds, fails, not_applicable };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct Predicate {
    Verdict verdict = Verdict::not_applicable;
    /// 1-based index of the first failing inequality, when there is one.
    std::optional<std::size_t> witness;
    std::string note;

    [[nodiscard]] bool holds() const noexcept { return verdict == Verdict::holds; }
};

/// log|x| together with the sign of x (0 when x == 0).
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;

    [[nodiscard]] double value() const;
};

/// e_0..e_n of the entries, by the product recurrence prod (1 + a_i y).
[[nodiscard]] std::vector<double> elem_sym(const ParamVec& values);
/// e_k with the convention e_k = 0 for k > n and k < 0.
[[nodiscard]] double elem_sym_at(const std::vector<double>& e, long k) noexcept;

[[nodiscard]] double rising_factorial(double a, unsigned n);
[[nodiscard]] SignedLog log_rising_factorial(double a, unsigned n);

/// f_n = (A)_n / (B)_n, the coefficient of x^n/n! in pFq(A;B;x).
[[nodiscard]] double coeff_f(const ParamVec& A, const ParamVec& B, unsigned n);
[[nodiscard]] SignedLog log_coeff_f(const ParamVec& A, const ParamVec& B, unsigned n);
/// R(x) = prod(a_i + x) / prod(b_j + x), so that f_{n+1} = R(n) f_n.
[[nodiscard]] double coeff_ratio(const ParamVec& A, const ParamVec& B, double x);

/// psi = sum(B) - sum(A).
[[nodiscard]] double parametric_excess(const ParamVec& A, const ParamVec& B) noexcept;

struct MajorizationResult {
    bool weak_supermajorized = false;
    std::optional<std::size_t> witness;  // first failing k (1-based)
    bool majorized = false;
};

/// Sorted partial-sum test sum_{i<=k} a_i <= sum_{i<=k} b_i for all k; majorized
/// additionally requires equal totals.
[[nodiscard]] MajorizationResult check_weak_supermajorization(const ParamVec& A, const ParamVec& B,
                                                              double tol = 1e-12);

struct VCheck {
    double v_min = 0.0;
    double t_at_min = 1.0;
    bool nonneg = false;
    double psi = 0.0;
    std::string reason;
};

/// Numerical decision of v(t) = sum (t^{a_j} - t^{b_j}) >= 0 on (0,1] over a
/// composite grid, combined with the exact necessary conditions at both ends.
[[nodiscard]] VCheck v_nonneg_check(const ParamVec& A, const ParamVec& B, int grid_size = 2048,
                                    double tol = 1e-12);

/// Ratios e_k(B)/e_k(A) ascending in k down to 1 and every e_k nonnegative.
[[nodiscard]] Predicate symmetric_ratio_chain(const ParamVec& A, const ParamVec& B);
/// e_k(B) >= e_k(A) >= 0 for every k.
[[nodiscard]] Predicate symmetric_ratios_geq1(const ParamVec& A, const ParamVec& B);
/// p < q: e_{q-i}(B) >= e_{p-i}(A) for i = 0..p.
[[nodiscard]] Predicate coeff_dominance(const ParamVec& A, const ParamVec& B);
/// p < q: e_{q-p+i}(B)/e_i(A) nonincreasing in i (makes R decreasing).
[[nodiscard]] Predicate ratio_decreasing_chain(const ParamVec& A, const ParamVec& B);
/// q = 2: min(a) <= min(b) and psi >= 0.
[[nodiscard]] Predicate q2_exact_criterion(const ParamVec& A, const ParamVec& B);
/// v(t) >= 0, falling back on weak supermajorization when the grid test is not
/// applicable. Used as the kernel positivity hypothesis.
[[nodiscard]] Predicate kernel_positivity(const ParamVec& A, const ParamVec& B);

struct ConditionReport {
    double psi = 0.0;
    Predicate weak_supermajorized;
    Predicate majorized;
    std::optional<double> v_min;
    Predicate v_nonneg;
    Predicate symmetric_chain;
    Predicate symmetric_geq1;
    Predicate coeff_dominance;
    Predicate ratio_decreasing;
    Predicate q2_exact;
    /// Set when q2_exact is applicable: whether it agrees with v_nonneg.
    std::optional<bool> q2_agrees_with_v;
};

[[nodiscard]] ConditionReport condition_report(const ParamVec& A, const ParamVec& B);

struct BesselRates {
    double c = 0.0;
    double d = 0.0;
    bool d_positive = false;
};

/// Extremal ratios (e_i(B) - e_i(A)) / e_{i-1}(A), i = 1..q, for |A| = q - 1.
[[nodiscard]] BesselRates bessel_rates(const ParamVec& A, const ParamVec& B);

/// True when some entry is a nonpositive integer.
[[nodiscard]] bool has_nonpositive_integer(const ParamVec& values) noexcept;

}  // namespace hyperbound
