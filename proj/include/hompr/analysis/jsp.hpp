#pragma once

// Joint spectral phase maps assembled from one phase-difference retrieval
// per idler frequency.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <vector>

#include "hompr/analysis/dispersion.hpp"
#include "hompr/error.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/grid.hpp"
#include "hompr/retrieval/run.hpp"

namespace hompr {

struct JspSlice {
    double idler_center = 0.0;
    /// Recovered phase (rad) on the signal grid after gauge fixing.
    std::vector<double> phase;
    /// |alpha'| |Phi'| >= floor * peak.
    std::vector<bool> valid;
    bool converged = false;
    StopReason reason = StopReason::max_iterations;
    int iterations = 0;
    double final_error = 0.0;
    /// Intensity-weighted second derivative of the phase (rad ps^2).
    double quadratic = 0.0;
};

struct JspMap {
    FrequencyGrid signal_grid;
    std::vector<double> idler_centers;
    /// phase[k][i]: slice k, signal sample i.
    std::vector<std::vector<double>> phase;
    std::vector<std::vector<bool>> valid;
    std::vector<JspSlice> slices;
    /// Frequency at which each slice's constant and slope are set to zero.
    double gauge_reference = 0.0;
};

/// Supplies the unit-norm heralded amplitude Phi'(omega_s, omega_i0).
using SliceAmplitude = std::function<SpectralTrace(double idler_center)>;

struct JspSweepOptions {
    double mean_photon_number = 1.0;
    RetrievalConfig retrieval;
    double gauge_reference = 0.0;
    /// Slices run concurrently on up to this many threads.
    unsigned jobs = 1;
    /// Per-slice iteration budgets; empty means retrieval.max_iterations.
    std::vector<int> slice_max_iterations;
};

/// Sets phi(ref) = 0 and phi'(ref) = 0 (central difference at the sample
/// nearest `ref`).
inline void fix_gauge(std::vector<double>& phase, const FrequencyGrid& grid, double ref) {
    const std::size_t r = std::clamp<std::size_t>(grid.nearest_index(ref), 1, grid.size() - 2);
    const double slope = (phase[r + 1] - phase[r - 1]) / (2.0 * grid.spacing());
    const double value = phase[r] + slope * (ref - grid[r]);
    for (std::size_t i = 0; i < phase.size(); ++i) phase[i] -= value + slope * grid.offset(i, ref);
}

/// Synthesizes V for one slice, retrieves the phase difference and
/// gauge-fixes it.
inline JspSlice jsp_slice(const SpectralTrace& alpha, const SpectralTrace& phi, double idler_center,
                          const DelayGrid& delay, const JspSweepOptions& options) {
    const auto v = jsp_visibility(alpha, phi, options.mean_photon_number, delay);
    const auto& grid = alpha.grid();
    std::vector<double> m1(grid.size()), m2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m1[i] = std::abs(alpha[i]);
        m2[i] = std::abs(phi[i]);
    }
    auto r = phase_difference_retrieval(v, SpectralMagnitude(grid, m1), SpectralMagnitude(grid, m2), options.retrieval);

    JspSlice s;
    s.idler_center = idler_center;
    s.phase = std::move(r.phase);
    fix_gauge(s.phase, grid, options.gauge_reference);
    std::vector<double> w(grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[i] = m1[i] * m2[i];
        peak = std::max(peak, w[i]);
    }
    s.valid.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s.valid[i] = w[i] >= intensity_floor * peak;
    s.converged = r.result.converged;
    s.reason = r.result.reason;
    s.iterations = r.result.final_state.iteration;
    s.final_error = r.result.final_state.error();
    s.quadratic = weighted_coefficient(phase_derivative(s.phase, grid.spacing(), 2).values, w);
    return s;
}

/// One retrieval per idler center. `phi_family` may be called from several
/// threads at once. Slices that do not converge are kept in
/// the map with every sample marked invalid.
inline JspMap jsp_sweep(const SpectralTrace& alpha, const SliceAmplitude& phi_family,
                        const std::vector<double>& idler_centers, const DelayGrid& delay,
                        const JspSweepOptions& options) {
    detail::require(!idler_centers.empty(), "idler center list is empty");
    detail::require(static_cast<bool>(phi_family), "no slice amplitude supplied");
    options.retrieval.validate();
    const std::size_t n = idler_centers.size();
    detail::require(options.slice_max_iterations.empty() || options.slice_max_iterations.size() == n,
                    "per-slice iteration budgets must match the slice list");
    std::vector<JspSlice> slices(n);
    const unsigned jobs = std::max(1u, options.jobs);
    for (std::size_t first = 0; first < n; first += jobs) {
        std::vector<std::future<JspSlice>> batch;
        for (std::size_t k = first; k < std::min(n, first + jobs); ++k) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, k] {
                JspSweepOptions own = options;
                if (!options.slice_max_iterations.empty())
                    own.retrieval.max_iterations = options.slice_max_iterations[k];
                return jsp_slice(alpha, phi_family(idler_centers[k]), idler_centers[k], delay, own);
            }));
        }
        for (std::size_t b = 0; b < batch.size(); ++b) slices[first + b] = batch[b].get();
    }

    JspMap map{alpha.grid(), idler_centers, {}, {}, {}, options.gauge_reference};
    for (auto& s : slices) {
        if (!s.converged) s.valid.assign(s.valid.size(), false);
        map.phase.push_back(s.phase);
        map.valid.push_back(s.valid);
    }
    map.slices = std::move(slices);
    return map;
}

} // namespace hompr
