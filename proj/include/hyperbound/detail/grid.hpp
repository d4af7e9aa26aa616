#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace hyperbound::detail {

/// Point of (0,1) with its complement and logarithm, all without cancellation.
struct UnitPoint {
    double t;
    double tc;  // 1 - t
    double log_t;
};

/// Grid of (0,1) dense at both ends: geometric in t on [1e-12, 1e-2], uniform
/// in the interior, geometric in 1 - t on [1e-12, 1e-2].
inline std::vector<UnitPoint> composite_unit_grid(int n, double reach = 1e-12) {
    const int n_end = std::max(n / 4, 2);
    const int n_mid = std::max(n - 2 * n_end, 2);
    std::vector<UnitPoint> g;
    g.reserve(static_cast<std::size_t>(2 * n_end + n_mid));
    const double lo = std::log(reach), hi = std::log(1e-2);
    for (int i = 0; i < n_end; ++i) {
        const double lt = lo + (hi - lo) * i / (n_end - 1);
        const double t = std::exp(lt);
        g.push_back({t, 1.0 - t, lt});
    }
    for (int i = 1; i <= n_mid; ++i) {
        const double t = 1e-2 + (1.0 - 2e-2) * i / (n_mid + 1);
        g.push_back({t, 1.0 - t, std::log(t)});
    }
    for (int i = n_end - 1; i >= 0; --i) {
        const double c = std::exp(lo + (hi - lo) * i / (n_end - 1));
        g.push_back({1.0 - c, c, std::log1p(-c)});
    }
    return g;
}

}  // namespace hyperbound::detail
