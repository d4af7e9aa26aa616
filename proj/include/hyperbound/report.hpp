#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperbound/params.hpp"

namespace hyperbound {

/// A named hypothesis with its verdict, as recorded in certificates and scans.
struct HypothesisEntry {
    std::string name;
    Verdict status = Verdict::not_applicable;
    std::optional<std::size_t> witness;
    std::string note;
};

enum class ScanKind { cm, log_cm, ratio_decreasing, log_convex, kernel_nonneg };

[[nodiscard]] std::string_view to_string(ScanKind k) noexcept;

/// A grid point where evaluation failed; the scan keeps going.
struct ScanFailure {
    double x;
    std::string error;
};

/// Outcome of a sign scan on a finite grid. A pass means no counterexample was
/// found at the scanned resolution. pass == (min_margin >= -tolerance) and no
/// point failed to evaluate.
struct MonotoneReport {
    ScanKind kind = ScanKind::cm;
    std::string grid;
    std::optional<int> n_max;
    double min_margin = 0.0;
    /// Grid location (and derivative order, for cm scans) of min_margin.
    std::optional<double> argmin;
    std::optional<int> argmin_order;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<ScanFailure> failures;
    /// Hypotheses behind the scanned statement; a failed one makes the scan
    /// advisory. not_applicable marks an optional clause that does not apply.
    std::vector<HypothesisEntry> hypotheses;
    std::string note;

    [[nodiscard]] bool hypotheses_hold() const noexcept {
        for (const auto& h : hypotheses) {
            if (h.status == Verdict::fails) return false;
        }
        return true;
    }

    void finalize() { pass = failures.empty() && min_margin >= -tolerance; }
};

}  // namespace hyperbound
