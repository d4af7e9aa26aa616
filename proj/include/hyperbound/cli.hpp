#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hyperbound/params.hpp"

namespace hyperbound::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    /// Computed, but some hypothesis failed; the results are advisory.
    exit_hypothesis = 2,
    exit_numerical = 3,
    /// Computed with every hypothesis holding, yet an asserted property failed.
    exit_property = 4,
};

enum class OutputFormat { json, csv, text };

[[nodiscard]] OutputFormat parse_format(std::string_view name);

/// "start:stop:count" (linear) or "log:start:stop:count" (geometric), with
/// count >= 2 and start < stop.
[[nodiscard]] std::vector<double> parse_grid(std::string_view spec);

/// Comma-separated finite reals; the empty string is the empty row.
[[nodiscard]] ParamVec parse_params(std::string_view text);

/// Formats a double with 15 significant digits.
[[nodiscard]] std::string format_number(double v);

/// Runs one command line (args excludes the program name). Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperbound::cli
