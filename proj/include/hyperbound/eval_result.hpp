#pragma once

#include <cstddef>

namespace hyperbound {

/// A computed value with an estimate of its absolute error and the amount of
/// work spent (series terms or quadrature nodes).
struct EvalResult {
    double value = 0.0;
    double abs_err = 0.0;
    std::size_t terms_used = 1;
};

}  // namespace hyperbound
