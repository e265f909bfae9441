#pragma once

// Two-photon interference traces from a source spectrum and a dispersive
// medium.
//
//     g(omega) = I(omega) exp(-i beta(omega) z)          cross-spectrum
//     V(tau)   = |G(tau)|^2,  G = forward transform of g
//     N_C(tau) = 1 - xi V(tau)
//
// The exp(-i beta z) sign is used everywhere, including in the retrieval
// guesses, so recovered beta keeps its physical sign.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/fourier.hpp"
#include "hompr/grid.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/resample.hpp"
#include "hompr/spectrum.hpp"

namespace hompr {

/// Slack above 1 tolerated in visibilities built from unit-area spectra.
inline constexpr double visibility_slack = 1e-9;

/// Nonnegative V(tau) samples on a delay grid.
class VisibilityTrace {
public:
    VisibilityTrace(DelayGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        detail::require(values_.size() == grid_.size(), "visibility length does not match its grid");
        for (double v : values_) {
            detail::require(std::isfinite(v), "visibility contains NaN or Inf");
            detail::require(v >= 0.0, "visibility must be nonnegative");
        }
    }

    const DelayGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    double peak() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, v);
        return m;
    }

    std::size_t peak_index() const noexcept {
        return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
    }

    double sum() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

private:
    DelayGrid grid_;
    std::vector<double> values_;
};

enum class PhotonKind { single_photon, coherent, thermal };

/// Photon-statistics factor xi of N_C = 1 - xi V.
class PhotonStatistics {
public:
    constexpr explicit PhotonStatistics(PhotonKind kind) noexcept : kind_(kind) {}

    constexpr PhotonKind kind() const noexcept { return kind_; }

    constexpr double xi() const noexcept {
        switch (kind_) {
        case PhotonKind::single_photon: return 1.0;
        case PhotonKind::coherent: return 0.5;
        case PhotonKind::thermal: return 1.0 / 3.0;
        }
        return 1.0;
    }

    std::string_view name() const noexcept {
        switch (kind_) {
        case PhotonKind::single_photon: return "single_photon";
        case PhotonKind::coherent: return "coherent";
        case PhotonKind::thermal: return "thermal";
        }
        return "single_photon";
    }

    static PhotonStatistics parse(std::string_view name) {
        if (name == "single_photon") return PhotonStatistics(PhotonKind::single_photon);
        if (name == "coherent") return PhotonStatistics(PhotonKind::coherent);
        if (name == "thermal") return PhotonStatistics(PhotonKind::thermal);
        throw InputError("unknown photon statistics '" + std::string(name) +
                         "' (expected single_photon, coherent or thermal)");
    }

private:
    PhotonKind kind_;
};

/// Normalized coincidence rate N_C(tau) on a delay grid.
struct CoincidenceTrace {
    DelayGrid grid;
    std::vector<double> values;
};

/// g(omega) = I(omega) exp(-i beta(omega) z).
inline SpectralTrace cross_spectrum(const Spectrum& spectrum, const PhaseConstant& beta, double z) {
    detail::require(spectrum.grid() == beta.grid(), "spectrum and phase constant live on different grids");
    detail::require(std::isfinite(z), "medium length must be finite");
    SpectralTrace g(spectrum.grid());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = spectrum[i] * std::polar(1.0, -beta[i] * z);
    return g;
}

/// V(tau) = |forward_transform(g)|^2 on `delay`, which must be conjugate to
/// the spectrum's grid.
inline VisibilityTrace visibility(const Spectrum& spectrum, const PhaseConstant& beta, double z,
                                  const DelayGrid& delay) {
    const auto big_g = forward_transform(cross_spectrum(spectrum, beta, z), delay);
    std::vector<double> v(delay.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::norm(big_g[j]);
    return VisibilityTrace(delay, std::move(v));
}

inline CoincidenceTrace coincidence_from_visibility(const VisibilityTrace& v, PhotonStatistics stats) {
    CoincidenceTrace out{v.grid(), std::vector<double>(v.size())};
    for (std::size_t j = 0; j < v.size(); ++j) {
        detail::require(v[j] <= 1.0 + visibility_slack, "visibility exceeds 1; cannot form a coincidence rate");
        out.values[j] = 1.0 - stats.xi() * v[j];
    }
    return out;
}

inline VisibilityTrace visibility_from_coincidence(const CoincidenceTrace& nc, PhotonStatistics stats) {
    std::vector<double> v(nc.values.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = (1.0 - nc.values[j]) / stats.xi();
    return VisibilityTrace(nc.grid, std::move(v));
}

/// sum |a|^2 d_omega.
inline double spectral_norm_squared(const SpectralTrace& a) {
    double s = 0.0;
    for (const auto& x : a.values()) s += std::norm(x);
    return s * a.grid().spacing();
}

/// Rescales a complex spectral amplitude to unit norm.
inline SpectralTrace normalize_amplitude(SpectralTrace a) {
    const double n2 = spectral_norm_squared(a);
    detail::require(n2 > 0.0, "cannot normalize an all-zero amplitude");
    const double s = 1.0 / std::sqrt(n2);
    for (auto& x : a.values()) x *= s;
    return a;
}

/// Visibility of a weak coherent pulse alpha' interfering with a heralded
/// single photon Phi'(., omega_i0):
///     V(tau) = 2 |FT[alpha' Phi'](tau)|^2 / (|A|^2 + 2)
/// Both amplitudes must be unit-norm on a shared grid.
inline VisibilityTrace jsp_visibility(const SpectralTrace& alpha, const SpectralTrace& phi, double mean_photon_number,
                                      const DelayGrid& delay) {
    detail::require(alpha.grid() == phi.grid(), "alpha and Phi amplitudes live on different grids");
    detail::require(std::isfinite(mean_photon_number) && mean_photon_number >= 0.0,
                    "mean photon number |A|^2 must be nonnegative");
    detail::require(std::abs(spectral_norm_squared(alpha) - 1.0) < 1e-9, "alpha amplitude is not unit-norm");
    detail::require(std::abs(spectral_norm_squared(phi) - 1.0) < 1e-9, "Phi amplitude is not unit-norm");
    SpectralTrace product(alpha.grid());
    for (std::size_t i = 0; i < product.size(); ++i) product[i] = alpha[i] * phi[i];
    const auto big_g = forward_transform(product, delay);
    const double scale = 2.0 / (mean_photon_number + 2.0);
    std::vector<double> v(delay.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = scale * std::norm(big_g[j]);
    return VisibilityTrace(delay, std::move(v));
}

/// Measured (tau, V) pairs interpolated onto `target`.
struct ResampledVisibility {
    VisibilityTrace trace;
    std::size_t zero_filled = 0;
};

inline ResampledVisibility resample_visibility(std::span<const double> tau, std::span<const double> values,
                                               const DelayGrid& target) {
    auto r = resample_trace(tau, values, target);
    return {VisibilityTrace(r.grid, std::move(r.values)), r.zero_filled};
}

} // namespace hompr
