#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hompr/forward_model.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/retrieval/run.hpp"
#include "hompr/spectrum.hpp"
#include "hompr/units.hpp"

namespace hompr::test {

/// 1024-point grid at 0.002 THz around 195.55 THz, 1 nm Gaussian at 1533 nm,
/// beta2 = 4 ps^2/km, beta3 = 0.06 ps^3/km over 3.7 km.
struct Fiber {
    ConjugateGrids grids = build_conjugate_grids(1024, units::angular_from_thz(0.002), units::angular_from_thz(195.55));
    double z = 3.7;
    Spectrum spectrum = gaussian_spectrum(grids.frequency, 1533.0, 1.0);
    PhaseConstant beta = taylor_phase_constant(grids.frequency, {0.0, 0.0, 4.0, 0.06},
                                               units::angular_from_wavelength(1533.0));
    VisibilityTrace v = visibility(spectrum, beta, z, grids.delay);
};

inline const Fiber& fiber() {
    static const Fiber f;
    return f;
}

/// Small grid for cheap randomized checks.
inline ConjugateGrids small_grids(std::size_t n = 64) { return build_conjugate_grids(n, 0.05, 1200.0); }

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> out(n);
    for (double& x : out) x = d(rng);
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace hompr::test
