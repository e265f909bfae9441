#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hompr/units.hpp"

namespace hompr {

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phase) {
    double r = std::remainder(phase, units::two_pi);
    if (r <= -units::pi) r += units::two_pi;
    return r;
}

/// Removes 2pi jumps by walking outward from `start` in both directions.
/// The sample at `start` keeps its value; every neighbour differs from the
/// previous one by the wrapped difference.
inline std::vector<double> unwrap_from(std::span<const double> phase, std::size_t start) {
    std::vector<double> out(phase.begin(), phase.end());
    if (out.empty()) return out;
    for (std::size_t i = start + 1; i < out.size(); ++i)
        out[i] = out[i - 1] + wrap_phase(phase[i] - phase[i - 1]);
    for (std::size_t i = start; i-- > 0;)
        out[i] = out[i + 1] + wrap_phase(phase[i] - phase[i + 1]);
    return out;
}

} // namespace hompr
