#pragma once

// Monotone cubic Hermite interpolation for bringing instrument-grid traces
// onto the conjugate delay grid.
//
// Node slopes come from five-point (fourth-order) Lagrange derivatives and
// are then limited Hyman-style: on monotone stretches a slope is clipped to
// [0, 3 min(|s_left|, |s_right|)] with the sign of the data, which keeps
// every monotone interval monotone. At local extrema the slope is left as
// estimated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/grid.hpp"
#include "hompr/stencil.hpp"

namespace hompr {

class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        detail::require(x_.size() == y_.size(), "interpolation abscissae and values differ in length");
        detail::require(x_.size() >= 4, "monotone cubic interpolation needs at least 4 points");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            detail::require(std::isfinite(x_[i]) && std::isfinite(y_[i]), "interpolation input contains NaN or Inf");
            if (i > 0) detail::require(x_[i] > x_[i - 1], "interpolation abscissae must be strictly increasing");
        }
        build_slopes();
    }

    double front() const noexcept { return x_.front(); }
    double back() const noexcept { return x_.back(); }

    /// Evaluates inside [front(), back()]; values outside are extrapolated
    /// from the end intervals, so callers decide what to do there.
    double operator()(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t k = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        k = std::min(k, x_.size() - 2);
        const double h = x_[k + 1] - x_[k];
        const double s = (t - x_[k]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[k] + (s3 - 2 * s2 + s) * h * d_[k] + (-2 * s3 + 3 * s2) * y_[k + 1] +
               (s3 - s2) * h * d_[k + 1];
    }

private:
    void build_slopes() {
        const std::size_t n = x_.size();
        std::vector<double> secant(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        d_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            // Five nodes centred on i where possible, shifted at the ends.
            const std::size_t width = std::min<std::size_t>(5, n);
            std::size_t lo = (i >= 2) ? i - 2 : 0;
            if (lo + width > n) lo = n - width;
            std::span<const double> nodes(x_.data() + lo, width);
            const auto w = finite_difference_weights(x_[i], nodes, 1);
            double slope = 0.0;
            for (std::size_t k = 0; k < width; ++k) slope += w[k] * y_[lo + k];
            d_[i] = slope;
        }

        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double sl = secant[i - 1];
            const double sr = secant[i];
            if (sl * sr > 0.0) {
                const double bound = 3.0 * std::min(std::abs(sl), std::abs(sr));
                d_[i] = (d_[i] * sr > 0.0) ? std::copysign(std::min(std::abs(d_[i]), bound), sr) : 0.0;
            } else {
                // Extrema and flat neighbours: any other slope overshoots on one side.
                d_[i] = 0.0;
            }
        }
        // End slopes keep the sign of the end secant and the 3x bound.
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double s = (i == 0) ? secant.front() : secant.back();
            if (d_[i] * s <= 0.0)
                d_[i] = 0.0;
            else
                d_[i] = std::copysign(std::min(std::abs(d_[i]), 3.0 * std::abs(s)), s);
        }
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

struct ResampledTrace {
    DelayGrid grid;
    std::vector<double> values;
    /// Target samples outside the measured span, set to zero.
    std::size_t zero_filled = 0;
};

/// Interpolates a measured (tau, V) trace onto `target`. Negative
/// interpolants are clamped to zero; samples outside the measured span are
/// zero-filled and counted.
inline ResampledTrace resample_trace(std::span<const double> tau, std::span<const double> values,
                                     const DelayGrid& target) {
    MonotoneCubic interp(std::vector<double>(tau.begin(), tau.end()),
                         std::vector<double>(values.begin(), values.end()));
    ResampledTrace out{target, std::vector<double>(target.size(), 0.0), 0};
    // Tolerate grid points that miss the measured end points by rounding.
    const double slack = 1e-9 * std::max(std::abs(interp.front()), std::abs(interp.back())) + 1e-12;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double t = target[j];
        if (t < interp.front() - slack || t > interp.back() + slack) {
            ++out.zero_filled;
            continue;
        }
        out.values[j] = std::max(0.0, interp(std::clamp(t, interp.front(), interp.back())));
    }
    return out;
}

} // namespace hompr
