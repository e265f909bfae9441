#pragma once

// Uniform sampling grids for the frequency and delay domains.
//
// Both grids place their reference value at index n/2:
//
//     omega_i = center + (i - n/2) * d_omega
//     tau_j   = origin + (j - n/2) * d_tau
//
// A delay grid is the conjugate of a frequency grid when both have the same
// size and d_tau * d_omega * n = 2 pi.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/units.hpp"

namespace hompr {

using Complex = std::complex<double>;

inline constexpr std::size_t min_grid_points = 8;

class FrequencyGrid {
public:
    FrequencyGrid(double center, double spacing, std::size_t n_points)
        : center_(center), spacing_(spacing), n_(n_points) {
        detail::require(n_points >= min_grid_points, "frequency grid needs at least 8 points");
        detail::require(n_points % 2 == 0, "frequency grid size must be even");
        detail::require(std::isfinite(spacing) && spacing > 0.0, "frequency spacing must be positive");
        detail::require(std::isfinite(center), "frequency grid center must be finite");
    }

    double center() const noexcept { return center_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t center_index() const noexcept { return n_ / 2; }
    double span() const noexcept { return spacing_ * static_cast<double>(n_); }

    double operator[](std::size_t i) const noexcept {
        return center_ + (static_cast<double>(i) - static_cast<double>(n_ / 2)) * spacing_;
    }

    /// Offset from an arbitrary reference frequency, omega_i - reference.
    double offset(std::size_t i, double reference) const noexcept {
        return (center_ - reference) + (static_cast<double>(i) - static_cast<double>(n_ / 2)) * spacing_;
    }

    std::vector<double> samples() const {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
        return out;
    }

    /// Index of the sample nearest to `omega`, clamped to the grid.
    std::size_t nearest_index(double omega) const noexcept {
        const double k = std::round((omega - center_) / spacing_) + static_cast<double>(n_ / 2);
        if (k <= 0.0) return 0;
        if (k >= static_cast<double>(n_ - 1)) return n_ - 1;
        return static_cast<std::size_t>(k);
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double center_;
    double spacing_;
    std::size_t n_;
};

class DelayGrid {
public:
    DelayGrid(double spacing, std::size_t n_points, double origin = 0.0)
        : spacing_(spacing), n_(n_points), origin_(origin) {
        detail::require(n_points >= min_grid_points, "delay grid needs at least 8 points");
        detail::require(n_points % 2 == 0, "delay grid size must be even");
        detail::require(std::isfinite(spacing) && spacing > 0.0, "delay spacing must be positive");
        detail::require(std::isfinite(origin), "delay origin must be finite");
    }

    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return n_; }
    double origin() const noexcept { return origin_; }
    std::size_t origin_index() const noexcept { return n_ / 2; }
    double span() const noexcept { return spacing_ * static_cast<double>(n_); }

    double operator[](std::size_t j) const noexcept {
        return origin_ + (static_cast<double>(j) - static_cast<double>(n_ / 2)) * spacing_;
    }

    std::vector<double> samples() const {
        std::vector<double> out(n_);
        for (std::size_t j = 0; j < n_; ++j) out[j] = (*this)[j];
        return out;
    }

    friend bool operator==(const DelayGrid&, const DelayGrid&) = default;

private:
    double spacing_;
    std::size_t n_;
    double origin_;
};

struct ConjugateGrids {
    FrequencyGrid frequency;
    DelayGrid delay;
};

/// Frequency grid of `n_points` samples around `center` plus the delay grid
/// that makes the discrete transform pair exact (d_tau = 2 pi / (n d_omega)).
inline ConjugateGrids build_conjugate_grids(std::size_t n_points, double freq_spacing, double center) {
    FrequencyGrid freq(center, freq_spacing, n_points);
    DelayGrid delay(units::two_pi / (static_cast<double>(n_points) * freq_spacing), n_points, 0.0);
    return {freq, delay};
}

inline bool are_conjugate(const FrequencyGrid& f, const DelayGrid& d, double rel_tol = 1e-12) {
    if (f.size() != d.size()) return false;
    const double product = f.spacing() * d.spacing() * static_cast<double>(f.size());
    return std::abs(product - units::two_pi) <= rel_tol * units::two_pi;
}

/// Complex samples tied to the grid they live on.
template <class Grid>
class ComplexTrace {
public:
    ComplexTrace(Grid grid, std::vector<Complex> values) : grid_(std::move(grid)), values_(std::move(values)) {
        detail::require(values_.size() == grid_.size(), "trace length does not match its grid");
    }

    explicit ComplexTrace(Grid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<Complex>& values() const noexcept { return values_; }
    std::vector<Complex>& values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }
    Complex& operator[](std::size_t i) noexcept { return values_[i]; }

private:
    Grid grid_;
    std::vector<Complex> values_;
};

using SpectralTrace = ComplexTrace<FrequencyGrid>;
using DelayTrace = ComplexTrace<DelayGrid>;

} // namespace hompr
