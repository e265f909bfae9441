#pragma once

// Derivatives of recovered phase constants and intensity-weighted Taylor
// coefficients.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/retrieval/run.hpp"
#include "hompr/spectrum.hpp"
#include "hompr/stencil.hpp"

namespace hompr {

/// Samples below this fraction of the peak intensity are left out of
/// weighted averages and marked invalid in JSP maps.
inline constexpr double intensity_floor = 1e-6;

struct DerivativeProfile {
    int order = 2;
    /// ps^order/km for a phase constant.
    std::vector<double> values;
    /// True where a one-sided stencil was used (near the grid ends).
    std::vector<bool> one_sided;
};

/// Central differences: 5 points for order 2, 7 points for order 3. The
/// stencil keeps its width near the ends and slides inward (one-sided).
inline DerivativeProfile phase_derivative(std::span<const double> beta, double spacing, int order) {
    detail::require(order == 2 || order == 3, "derivative order must be 2 or 3");
    detail::require(spacing > 0.0, "grid spacing must be positive");
    const std::size_t width = order == 2 ? 5 : 7;
    const std::size_t half = width / 2;
    const std::size_t n = beta.size();
    detail::require(n >= width, "grid too short for the derivative stencil");

    std::vector<double> nodes(width);
    for (std::size_t k = 0; k < width; ++k) nodes[k] = static_cast<double>(k);
    // weights[s] for the evaluation point at stencil position s.
    std::vector<std::vector<double>> weights(width);
    const double scale = std::pow(spacing, order);
    for (std::size_t pos = 0; pos < width; ++pos) {
        weights[pos] = finite_difference_weights(static_cast<double>(pos), nodes, order);
        for (double& w : weights[pos]) w /= scale;
    }

    DerivativeProfile out{order, std::vector<double>(n), std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t first = i >= half ? i - half : 0;
        if (first + width > n) first = n - width;
        const std::size_t pos = i - first;
        out.one_sided[i] = pos != half;
        const auto& w = weights[pos];
        double acc = 0.0;
        for (std::size_t k = 0; k < width; ++k) acc += w[k] * beta[first + k];
        out.values[i] = acc;
    }
    return out;
}

inline DerivativeProfile phase_derivative(const PhaseConstant& beta, int order) {
    return phase_derivative(beta.values(), beta.grid().spacing(), order);
}

/// sum I d / sum I over samples with I >= floor * peak.
inline double weighted_coefficient(std::span<const double> derivative, std::span<const double> weights) {
    detail::require(derivative.size() == weights.size(), "derivative and weights differ in length");
    double peak = 0.0;
    for (double w : weights) peak = std::max(peak, w);
    detail::require(peak > 0.0, "all weights are zero");
    const double floor = intensity_floor * peak;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < floor) continue;
        num += weights[i] * derivative[i];
        den += weights[i];
    }
    detail::require(den > 0.0, "no weight above the intensity floor");
    return num / den;
}

inline double weighted_coefficient(std::span<const double> derivative, const Spectrum& weights) {
    detail::require(derivative.size() == weights.grid().size(), "derivative length does not match the spectrum");
    return weighted_coefficient(derivative, weights.intensity());
}

struct DispersionEstimate {
    double beta2 = 0.0;
    double beta3 = 0.0;
    std::vector<double> per_frequency_beta2;
    std::vector<double> per_frequency_beta3;
    Spectrum weights;
};

inline DispersionEstimate estimate_dispersion(const PhaseConstant& beta, const Spectrum& spectrum) {
    detail::require(beta.grid() == spectrum.grid(), "phase constant and spectrum live on different grids");
    auto d2 = phase_derivative(beta, 2);
    auto d3 = phase_derivative(beta, 3);
    const double b2 = weighted_coefficient(d2.values, spectrum);
    const double b3 = weighted_coefficient(d3.values, spectrum);
    return DispersionEstimate{b2, b3, std::move(d2.values), std::move(d3.values), spectrum};
}

struct ErrorReport {
    double beta2_error = 0.0;
    double beta3_error = 0.0;
    double beta2_estimate = 0.0;
    double beta3_estimate = 0.0;
    double final_error = 0.0;
    int iterations = 0;
};

/// Both sides go through the same derivative and weighting pipeline, so a
/// perfect recovery reports zero error.
inline ErrorReport compare_to_truth(const PhaseConstant& recovered, const PhaseConstant& truth,
                                    const Spectrum& spectrum, double final_error, int iterations) {
    const auto est = estimate_dispersion(recovered, spectrum);
    const auto ref = estimate_dispersion(truth, spectrum);
    return ErrorReport{std::abs(est.beta2 - ref.beta2), std::abs(est.beta3 - ref.beta3), est.beta2, est.beta3,
                       final_error, iterations};
}

inline ErrorReport compare_to_truth(const RetrievalResult& result, const PhaseConstant& truth,
                                    const Spectrum& spectrum) {
    return compare_to_truth(result.recovered_beta, truth, spectrum, result.final_state.error(),
                            result.final_state.iteration);
}

} // namespace hompr
