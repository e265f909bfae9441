#pragma once

// Error metric, projection distance and its gradients.
//
//   E   = sum_j (|G(tau_j)| - sqrt V(tau_j))^2 / sum_j V(tau_j)
//   Z   = sum_i |m_i exp(i phi_i) - g'_i|^2
//       = sum_i (m_i - |g'_i|)^2 + 4 m_i |g'_i| sin^2((phi_i - phi'_i)/2)
//   dZ/dphi_i = 2 |g'_i| m_i sin(phi_i - phi'_i)
//
// For a Taylor phase phi_i = -z sum_j beta_j x_i^j / j!, x_i = omega_i - omega_0,
// the coefficient gradient carries the chain factor -z x^j / j! and the fixed
// normalization 1 / sum_i 4 m_i, i.e. it is the exact gradient of
// Z / sum_i 4 m_i.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/grid.hpp"
#include "hompr/spectrum.hpp"

namespace hompr {

inline double retrieval_error(std::span<const Complex> big_g, std::span<const double> sqrt_v, double v_sum) {
    double acc = 0.0;
    for (std::size_t j = 0; j < big_g.size(); ++j) {
        const double d = std::abs(big_g[j]) - sqrt_v[j];
        acc += d * d;
    }
    return acc / v_sum;
}

inline double retrieval_error(const DelayTrace& big_g, const VisibilityTrace& v) {
    detail::require(big_g.grid() == v.grid(), "correlation and visibility live on different delay grids");
    const double v_sum = v.sum();
    detail::require(v_sum > 0.0, "visibility trace is identically zero");
    std::vector<double> sqrt_v(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) sqrt_v[j] = std::sqrt(v[j]);
    return retrieval_error(big_g.values(), sqrt_v, v_sum);
}

/// Z for the phase set `phi` against the Fourier-projected spectrum g'.
inline double projection_distance(std::span<const double> phi, std::span<const Complex> g_prime,
                                  std::span<const double> magnitude) {
    double z = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double a = std::abs(g_prime[i]);
        const double dm = magnitude[i] - a;
        const double s = std::sin(0.5 * (phi[i] - std::arg(g_prime[i])));
        z += dm * dm + 4.0 * magnitude[i] * a * s * s;
    }
    return z;
}

inline std::vector<double> gp_phase_gradient(std::span<const Complex> g_prime, std::span<const double> magnitude,
                                             std::span<const double> phi) {
    detail::require(g_prime.size() == magnitude.size() && phi.size() == magnitude.size(),
                    "gradient inputs differ in length");
    std::vector<double> grad(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
        grad[i] = 2.0 * std::abs(g_prime[i]) * magnitude[i] * std::sin(phi[i] - std::arg(g_prime[i]));
    return grad;
}

inline std::vector<double> gp_phase_gradient(const SpectralTrace& g_prime, const Spectrum& spectrum,
                                             std::span<const double> phi) {
    detail::require(g_prime.grid() == spectrum.grid(), "g' and spectrum live on different grids");
    return gp_phase_gradient(g_prime.values(), spectrum.intensity(), phi);
}

/// phi_i = -z sum_j beta_j (omega_i - center)^j / j!
inline std::vector<double> taylor_phase(const FrequencyGrid& grid, std::span<const double> beta, double center,
                                        double z) {
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.offset(i, center);
        double acc = 0.0;
        for (std::size_t j = beta.size(); j-- > 0;) acc = beta[j] + acc * x / static_cast<double>(j + 1);
        phi[i] = -z * acc;
    }
    return phi;
}

/// Gradient of Z / sum_i 4 m_i over beta_j for orders j >= first_order;
/// lower orders get zero. The returned vector has beta.size() entries.
inline std::vector<double> gp_coeff_gradient(std::span<const Complex> g_prime, std::span<const double> magnitude,
                                             std::span<const double> beta, const FrequencyGrid& grid, double center,
                                             double z, std::size_t first_order = 2) {
    detail::require(g_prime.size() == grid.size() && magnitude.size() == grid.size(),
                    "gradient inputs differ in length");
    double denom = 0.0;
    for (double m : magnitude) denom += 4.0 * m;
    detail::require(denom > 0.0, "spectral constraint sums to zero");
    const auto phi = taylor_phase(grid, beta, center, z);
    std::vector<double> grad(beta.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double common = 2.0 * std::abs(g_prime[i]) * magnitude[i] * std::sin(phi[i] - std::arg(g_prime[i]));
        if (common == 0.0) continue;
        const double x = grid.offset(i, center);
        double basis = 1.0; // x^j / j!
        for (std::size_t j = 0; j < beta.size(); ++j) {
            if (j > 0) basis *= x / static_cast<double>(j);
            if (j >= first_order) grad[j] += common * (-z * basis);
        }
    }
    for (double& g : grad) g /= denom;
    return grad;
}

inline std::vector<double> gp_coeff_gradient(const SpectralTrace& g_prime, const Spectrum& spectrum,
                                             std::span<const double> beta, double center, double z,
                                             std::size_t first_order = 2) {
    detail::require(g_prime.grid() == spectrum.grid(), "g' and spectrum live on different grids");
    return gp_coeff_gradient(g_prime.values(), spectrum.intensity(), beta, spectrum.grid(), center, z, first_order);
}

/// Solves the weighted least-squares fit y ~ sum_k c_k x^k of `degree`,
/// ignoring samples with zero weight. x is rescaled internally to [-1, 1].
inline std::vector<double> weighted_polyfit(std::span<const double> x, std::span<const double> y,
                                            std::span<const double> w, std::size_t degree) {
    const std::size_t p = degree + 1;
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (w[i] > 0.0) scale = std::max(scale, std::abs(x[i]));
    if (scale == 0.0) scale = 1.0;

    std::vector<double> a(p * p, 0.0);
    std::vector<double> b(p, 0.0);
    std::vector<double> pw(p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(w[i] > 0.0)) continue;
        const double u = x[i] / scale;
        pw[0] = 1.0;
        for (std::size_t k = 1; k < p; ++k) pw[k] = pw[k - 1] * u;
        for (std::size_t r = 0; r < p; ++r) {
            b[r] += w[i] * pw[r] * y[i];
            for (std::size_t c = 0; c < p; ++c) a[r * p + c] += w[i] * pw[r] * pw[c];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r * p + col]) > std::abs(a[piv * p + col])) piv = r;
        detail::require(a[piv * p + col] != 0.0, "polynomial fit is singular (too few weighted samples)");
        if (piv != col) {
            for (std::size_t c = 0; c < p; ++c) std::swap(a[col * p + c], a[piv * p + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < p; ++r) {
            const double f = a[r * p + col] / a[col * p + col];
            for (std::size_t c = col; c < p; ++c) a[r * p + c] -= f * a[col * p + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> c(p);
    for (std::size_t r = p; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < p; ++k) s -= a[r * p + k] * c[k];
        c[r] = s / a[r * p + r];
    }
    double f = 1.0;
    for (std::size_t k = 0; k < p; ++k) {
        c[k] /= f;
        f *= scale;
    }
    return c;
}

} // namespace hompr
