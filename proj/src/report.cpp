#include "hyperbound/report.hpp"

namespace hyperbound {

std::string_view to_string(ScanKind k) noexcept {
    switch (k) {
        case ScanKind::cm: return "cm";
        case ScanKind::log_cm: return "log_cm";
        case ScanKind::ratio_decreasing: return "ratio_decreasing";
        case ScanKind::log_convex: return "log_convex";
        case ScanKind::kernel_nonneg: return "kernel_nonneg";
    }
    return "unknown";
}

}  // namespace hyperbound
