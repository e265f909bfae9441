#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/grid.hpp"
#include "hompr/units.hpp"

namespace hompr {

/// Taylor coefficients {beta_j} in ps^j/km about `center` (rad/ps):
///     beta(omega) = sum_j beta_j (omega - center)^j / j!
struct TaylorCoefficients {
    std::vector<double> beta;
    double center = 0.0;

    double evaluate(double offset) const noexcept {
        // Horner on sum_j beta_j x^j / j!.
        double acc = 0.0;
        for (std::size_t j = beta.size(); j-- > 0;) acc = beta[j] + acc * offset / static_cast<double>(j + 1);
        return acc;
    }

    double coefficient(std::size_t j) const noexcept { return j < beta.size() ? beta[j] : 0.0; }
};

/// Phase constant beta(omega) in rad/km sampled on a frequency grid.
class PhaseConstant {
public:
    PhaseConstant(FrequencyGrid grid, std::vector<double> beta, std::optional<TaylorCoefficients> taylor = {})
        : grid_(std::move(grid)), beta_(std::move(beta)), taylor_(std::move(taylor)) {
        detail::require(beta_.size() == grid_.size(), "phase constant length does not match its grid");
        for (double b : beta_) detail::require(std::isfinite(b), "phase constant must be finite");
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return beta_; }
    std::size_t size() const noexcept { return beta_.size(); }
    double operator[](std::size_t i) const noexcept { return beta_[i]; }
    const std::optional<TaylorCoefficients>& taylor() const noexcept { return taylor_; }

    /// beta(omega) + c + b (omega - reference); drops the Taylor view unless
    /// it shares `reference` as its center.
    PhaseConstant plus_affine(double constant, double slope, double reference) const {
        std::vector<double> out(beta_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += constant + slope * grid_.offset(i, reference);
        std::optional<TaylorCoefficients> t;
        if (taylor_ && taylor_->center == reference) {
            t = *taylor_;
            if (t->beta.size() < 2) t->beta.resize(2, 0.0);
            t->beta[0] += constant;
            t->beta[1] += slope;
        }
        return PhaseConstant(grid_, std::move(out), std::move(t));
    }

private:
    FrequencyGrid grid_;
    std::vector<double> beta_;
    std::optional<TaylorCoefficients> taylor_;
};

inline PhaseConstant taylor_phase_constant(const FrequencyGrid& grid, std::vector<double> coeffs, double omega0) {
    for (double c : coeffs) detail::require(std::isfinite(c), "Taylor coefficients must be finite");
    TaylorCoefficients taylor{std::move(coeffs), omega0};
    std::vector<double> beta(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) beta[i] = taylor.evaluate(grid.offset(i, omega0));
    return PhaseConstant(grid, std::move(beta), std::move(taylor));
}

/// beta(omega) = amplitude cos(2 pi (omega - omega0) / period + phase_offset)
inline PhaseConstant cosine_phase_constant(const FrequencyGrid& grid, double amplitude, double period,
                                           double phase_offset, double omega0) {
    detail::require(std::isfinite(period) && period > 0.0, "cosine period must be positive");
    detail::require(std::isfinite(amplitude) && std::isfinite(phase_offset), "cosine parameters must be finite");
    std::vector<double> beta(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        beta[i] = amplitude * std::cos(units::two_pi * grid.offset(i, omega0) / period + phase_offset);
    return PhaseConstant(grid, std::move(beta));
}

inline PhaseConstant cosine_phase_constant(const FrequencyGrid& grid, double amplitude, double period,
                                           double phase_offset) {
    return cosine_phase_constant(grid, amplitude, period, phase_offset, grid.center());
}

} // namespace hompr
