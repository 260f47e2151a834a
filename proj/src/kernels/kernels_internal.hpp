#pragma once

#include <algorithm>
#include <cmath>

#include "fpattack/kernels.hpp"

namespace fpattack::kernels {

// Reference quantizer for one difference. Positive side maps (d-1, d]*u to
// d-1 above the first step, negative side mirrors with half-open [.,.)
// intervals, |a| <= dead_zone maps to 0, and both tails saturate.
inline double quantize_one(double a, const QuantizerParams& p) {
    const double u = p.step;
    const double top = static_cast<double>(p.max_level);
    double level;
    if (std::fabs(a) <= p.dead_zone) {
        level = 0.0;
    } else if (a > 0.0) {
        level = a <= u ? 1.0 : std::min(std::ceil(a / u) - 1.0, top);
    } else {
        level = a >= -u ? -1.0 : std::max(std::floor(a / u) + 1.0, -top);
    }
    return level * u;
}

}  // namespace fpattack::kernels
