#pragma once

#include <cmath>
#include <limits>

namespace hyperbound::detail {

inline bool is_nonpositive_integer(double x) noexcept {
    return x <= 0.0 && x == std::nearbyint(x);
}

/// log|Gamma(x)| with its sign; reentrant (lgamma_r keeps signgam out of it).
struct RealLogGamma {
    double log_abs;
    int sign;
};

inline RealLogGamma log_gamma_signed(double x) noexcept {
    int s = 1;
    const double l = ::lgamma_r(x, &s);
    return {l, s};
}

inline double lgamma_abs(double x) noexcept {
    int s = 1;
    return ::lgamma_r(x, &s);
}

/// 1/Gamma(x), an entire function: exactly 0 at the poles of Gamma.
inline double rgamma(double x) noexcept {
    if (is_nonpositive_integer(x)) return 0.0;
    if (std::abs(x) < 170.0) return 1.0 / std::tgamma(x);
    const auto lg = log_gamma_signed(x);
    return lg.sign * std::exp(-lg.log_abs);
}

}  // namespace hyperbound::detail
