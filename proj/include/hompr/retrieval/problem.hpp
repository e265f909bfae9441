#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/grid.hpp"
#include "hompr/spectrum.hpp"

namespace hompr {

/// Samples whose constraint magnitude is below this fraction of the peak
/// carry no phase information; they are left out of fits and averages.
inline constexpr double support_floor = 1e-6;

/// The two magnitude constraints of a retrieval plus the phase scaling.
///
/// The iterated object is g(omega) = m(omega) exp(i phi(omega)) with
/// |g| = m in frequency and |FT g| = sqrt(V) in delay. Phases map to the
/// reported phase constant through phi = -beta z.
class RetrievalProblem {
public:
    RetrievalProblem(VisibilityTrace visibility, SpectralMagnitude magnitude, double z, double expansion_center)
        : freq_(magnitude.grid), visibility_(std::move(visibility)), magnitude_(std::move(magnitude.values)), z_(z),
          expansion_center_(expansion_center) {
        detail::require(are_conjugate(freq_, visibility_.grid()),
                        "visibility grid is not the conjugate of the spectrum grid; resample it first");
        detail::require(std::isfinite(z) && z != 0.0, "phase scale z must be finite and nonzero");
        detail::require(std::isfinite(expansion_center), "expansion center must be finite");
        sqrt_v_.resize(visibility_.size());
        for (std::size_t j = 0; j < sqrt_v_.size(); ++j) sqrt_v_[j] = std::sqrt(visibility_[j]);
        v_sum_ = visibility_.sum();
        detail::require(v_sum_ > 0.0, "visibility trace is identically zero");
        reference_index_ = static_cast<std::size_t>(std::max_element(magnitude_.begin(), magnitude_.end()) -
                                                    magnitude_.begin());
        const double floor = support_floor * magnitude_[reference_index_];
        detail::require(magnitude_[reference_index_] > 0.0, "spectral constraint is identically zero");
        support_.resize(magnitude_.size());
        for (std::size_t i = 0; i < magnitude_.size(); ++i) support_[i] = magnitude_[i] >= floor;
        for (double m : magnitude_) magnitude_sum_ += m;
    }

    /// beta retrieval: |g| = I(omega), expansion about the spectral centroid.
    static RetrievalProblem for_spectrum(VisibilityTrace visibility, const Spectrum& spectrum, double z) {
        detail::require(z > 0.0, "medium length z must be positive");
        return RetrievalProblem(std::move(visibility), SpectralMagnitude(spectrum.grid(), spectrum.intensity()), z,
                                spectrum.centroid());
    }

    const FrequencyGrid& frequency_grid() const noexcept { return freq_; }
    const DelayGrid& delay_grid() const noexcept { return visibility_.grid(); }
    const VisibilityTrace& visibility() const noexcept { return visibility_; }
    const std::vector<double>& magnitude() const noexcept { return magnitude_; }
    const std::vector<double>& sqrt_visibility() const noexcept { return sqrt_v_; }
    double visibility_sum() const noexcept { return v_sum_; }
    double magnitude_sum() const noexcept { return magnitude_sum_; }
    double z() const noexcept { return z_; }
    double expansion_center() const noexcept { return expansion_center_; }
    /// Peak of the spectral constraint; phases are unwrapped from here.
    std::size_t reference_index() const noexcept { return reference_index_; }
    const std::vector<bool>& support() const noexcept { return support_; }
    std::size_t size() const noexcept { return magnitude_.size(); }

private:
    FrequencyGrid freq_;
    VisibilityTrace visibility_;
    std::vector<double> magnitude_;
    std::vector<double> sqrt_v_;
    std::vector<bool> support_;
    double v_sum_ = 0.0;
    double magnitude_sum_ = 0.0;
    double z_;
    double expansion_center_;
    std::size_t reference_index_ = 0;
};

} // namespace hompr
