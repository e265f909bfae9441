#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/grid.hpp"
#include "hompr/units.hpp"

namespace hompr {

/// Nonnegative spectral intensity I(omega) on a frequency grid, normalized
/// so that sum_i I_i d_omega = 1.
class Spectrum {
public:
    /// Validates and rescales `intensity` to unit area.
    static Spectrum normalized(FrequencyGrid grid, std::vector<double> intensity) {
        detail::require(intensity.size() == grid.size(), "spectrum length does not match its grid");
        double total = 0.0;
        for (double v : intensity) {
            detail::require(std::isfinite(v), "spectrum contains NaN or Inf");
            detail::require(v >= 0.0, "spectrum intensity must be nonnegative");
            total += v;
        }
        detail::require(total > 0.0, "spectrum is identically zero");
        const double scale = 1.0 / (total * grid.spacing());
        for (double& v : intensity) v *= scale;
        return Spectrum(std::move(grid), std::move(intensity));
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& intensity() const noexcept { return intensity_; }
    std::size_t size() const noexcept { return intensity_.size(); }
    double operator[](std::size_t i) const noexcept { return intensity_[i]; }

    std::size_t peak_index() const noexcept {
        return static_cast<std::size_t>(std::max_element(intensity_.begin(), intensity_.end()) - intensity_.begin());
    }
    double peak() const noexcept { return intensity_[peak_index()]; }

    /// Intensity-weighted mean frequency.
    double centroid() const noexcept {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            num += intensity_[i] * grid_.offset(i, grid_.center());
            den += intensity_[i];
        }
        return grid_.center() + num / den;
    }

    /// Intensity-weighted RMS width about the centroid.
    double rms_width() const noexcept {
        const double c = centroid();
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double d = grid_.offset(i, c);
            num += intensity_[i] * d * d;
            den += intensity_[i];
        }
        return std::sqrt(num / den);
    }

private:
    Spectrum(FrequencyGrid grid, std::vector<double> intensity)
        : grid_(std::move(grid)), intensity_(std::move(intensity)) {}

    FrequencyGrid grid_;
    std::vector<double> intensity_;
};

/// Nonnegative spectral magnitude |E(omega)| with no normalization imposed.
struct SpectralMagnitude {
    SpectralMagnitude(FrequencyGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        detail::require(values.size() == grid.size(), "magnitude length does not match its grid");
        for (double x : values) detail::require(std::isfinite(x) && x >= 0.0, "magnitude must be finite and nonnegative");
    }

    FrequencyGrid grid;
    std::vector<double> values;
};

namespace detail {

// Source widths must be resolved by the grid and fit well inside it.
inline void check_spectral_width(const FrequencyGrid& grid, double rms_width) {
    if (rms_width < 3.0 * grid.spacing())
        throw InputError("spectrum is under-resolved: RMS width " + std::to_string(rms_width) +
                         " rad/ps is below 3 grid spacings");
    if (rms_width > grid.span() / 6.0)
        throw InputError("frequency window too small: RMS width " + std::to_string(rms_width) +
                         " rad/ps exceeds 1/6 of the grid span");
}

inline void check_wavelengths(double center_nm, double width_nm) {
    require(std::isfinite(center_nm) && center_nm > 0.0, "center wavelength must be positive");
    require(std::isfinite(width_nm) && width_nm > 0.0, "spectral width must be positive");
}

} // namespace detail

/// Intensity FWHM in rad/ps of a source `fwhm_nm` wide at `center_nm`.
inline double angular_fwhm(double center_nm, double fwhm_nm) {
    return units::angular_width_from_wavelength(fwhm_nm, center_nm);
}

/// Unit-area Gaussian intensity centred at 2 pi c / center_nm whose
/// intensity FWHM corresponds to `fwhm_nm`.
inline Spectrum gaussian_spectrum(const FrequencyGrid& grid, double center_nm, double fwhm_nm) {
    detail::check_wavelengths(center_nm, fwhm_nm);
    const double omega0 = units::angular_from_wavelength(center_nm);
    const double sigma = units::sigma_from_fwhm(angular_fwhm(center_nm, fwhm_nm));
    detail::check_spectral_width(grid, sigma);
    std::vector<double> intensity(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.offset(i, omega0) / sigma;
        intensity[i] = std::exp(-0.5 * x * x);
    }
    return Spectrum::normalized(grid, std::move(intensity));
}

/// Physicists' Hermite polynomial H_n(x).
inline double hermite(int order, double x) {
    double h_prev = 1.0;
    if (order == 0) return h_prev;
    double h = 2.0 * x;
    for (int k = 1; k < order; ++k) {
        const double next = 2.0 * x * h - 2.0 * k * h_prev;
        h_prev = h;
        h = next;
    }
    return h;
}

/// Unit-area intensity |H_n(x) exp(-x^2/2)|^2 with x = (omega - omega0)/s.
/// The scale s is chosen so that order 0 is exactly gaussian_spectrum with
/// fwhm = scale_nm.
inline Spectrum hermite_gaussian_spectrum(const FrequencyGrid& grid, int order, double center_nm, double scale_nm) {
    detail::check_wavelengths(center_nm, scale_nm);
    detail::require(order >= 0, "Hermite-Gaussian order must be nonnegative");
    const double omega0 = units::angular_from_wavelength(center_nm);
    const double s = std::sqrt(2.0) * units::sigma_from_fwhm(angular_fwhm(center_nm, scale_nm));
    // <x^2> = n + 1/2 for the n-th mode intensity.
    detail::check_spectral_width(grid, s * std::sqrt(order + 0.5));
    std::vector<double> intensity(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.offset(i, omega0) / s;
        const double h = hermite(order, x);
        intensity[i] = h * h * std::exp(-x * x);
    }
    return Spectrum::normalized(grid, std::move(intensity));
}

} // namespace hompr
