#pragma once

// Internal units: angular frequency in rad/ps, delay in ps, length in km,
// phase constant in rad/km and Taylor coefficients in ps^j/km.

#include <cmath>
#include <numbers>

namespace hompr::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Speed of light in nm/ps.
inline constexpr double speed_of_light = 299792.458;

inline constexpr double angular_from_thz(double thz) { return two_pi * thz; }
inline constexpr double thz_from_angular(double omega) { return omega / two_pi; }

inline constexpr double angular_from_wavelength(double nm) { return two_pi * speed_of_light / nm; }
inline constexpr double wavelength_from_angular(double omega) { return two_pi * speed_of_light / omega; }

/// Converts a small wavelength interval around `center_nm` into an angular
/// frequency interval (dnu = c dlambda / lambda^2).
inline constexpr double angular_width_from_wavelength(double width_nm, double center_nm) {
    return two_pi * speed_of_light * width_nm / (center_nm * center_nm);
}

/// Gaussian FWHM to standard deviation.
inline double sigma_from_fwhm(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

} // namespace hompr::units
