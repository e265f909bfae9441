#pragma once

// Reading and writing the trace files exchanged by the CLI.
//
// Visibility files hold (delay_ps, V). Spectrum and phase-constant files
// hold (x, value) where the "# x_unit:" header is rad_per_ps (default), thz
// or nm. Spectra given per nm are converted with the Jacobian
// |d lambda / d omega| = lambda^2 / (2 pi c).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/io/columns.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/resample.hpp"
#include "hompr/spectrum.hpp"
#include "hompr/units.hpp"

namespace hompr::io {

using Header = std::vector<std::pair<std::string, std::string>>;

inline void write_visibility(const std::filesystem::path& path, const VisibilityTrace& v, Header header = {}) {
    const auto tau = v.grid().samples();
    header.insert(header.begin(), {"quantity", "visibility"});
    header.emplace_back("x_unit", "ps");
    header.emplace_back("n_points", std::to_string(v.size()));
    header.emplace_back("delay_spacing_ps", format_double(v.grid().spacing()));
    write_columns(path, header, {{"delay_ps", &tau}, {"visibility", &v.values()}});
}

inline void write_coincidence(const std::filesystem::path& path, const CoincidenceTrace& nc, PhotonStatistics stats) {
    const auto tau = nc.grid.samples();
    write_columns(path,
                  {{"quantity", "normalized_coincidence"},
                   {"statistics", std::string(stats.name())},
                   {"xi", format_double(stats.xi())},
                   {"x_unit", "ps"}},
                  {{"delay_ps", &tau}, {"coincidence", &nc.values}});
}

inline void write_spectrum(const std::filesystem::path& path, const Spectrum& s) {
    const auto w = s.grid().samples();
    write_columns(path, {{"quantity", "spectral_intensity"}, {"x_unit", "rad_per_ps"}, {"normalization", "unit_area"}},
                  {{"omega_rad_per_ps", &w}, {"intensity", &s.intensity()}});
}

inline void write_phase_constant(const std::filesystem::path& path, const PhaseConstant& beta,
                                 const std::vector<std::pair<std::string, const std::vector<double>*>>& extra = {}) {
    const auto w = beta.grid().samples();
    std::vector<ColumnSpec> cols{{"omega_rad_per_ps", &w}, {"beta_rad_per_km", &beta.values()}};
    for (const auto& [name, values] : extra) cols.push_back({name, values});
    write_columns(path, {{"quantity", "phase_constant"}, {"x_unit", "rad_per_ps"}}, cols);
}

namespace detail {

/// True when `x` reproduces the grid samples to rounding.
template <class Grid>
bool on_grid(const std::vector<double>& x, const Grid& grid) {
    if (x.size() != grid.size()) return false;
    const double tol = 1e-9 * grid.spacing();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - grid[i]) > tol) return false;
    return true;
}

/// Converts the abscissa column to rad/ps and sorts the pairs by omega.
inline std::pair<std::vector<double>, std::vector<double>>
to_angular(const ColumnFile& f, const std::string& source, bool density) {
    const auto it = f.header.find("x_unit");
    const std::string unit = it == f.header.end() ? "rad_per_ps" : it->second;
    std::vector<double> x = f.columns[0];
    std::vector<double> y = f.columns[1];
    if (unit == "thz") {
        for (double& v : x) v = units::angular_from_thz(v);
        if (density)
            for (double& v : y) v /= units::two_pi;
    } else if (unit == "nm") {
        for (std::size_t i = 0; i < x.size(); ++i) {
            hompr::detail::require(x[i] > 0.0, source + ": wavelengths must be positive");
            const double lambda = x[i];
            x[i] = units::angular_from_wavelength(lambda);
            if (density) y[i] *= lambda * lambda / (units::two_pi * units::speed_of_light);
        }
    } else if (unit != "rad_per_ps") {
        throw InputError(source + ": unknown x_unit '" + unit + "' (expected rad_per_ps, thz or nm)");
    }
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    return {std::move(xs), std::move(ys)};
}

} // namespace detail

/// Reads (delay_ps, V). Traces on the target grid are taken as they are;
/// anything else is resampled with the monotone cubic.
inline ResampledVisibility read_visibility(const std::filesystem::path& path, const DelayGrid& target) {
    const auto f = read_columns(path, 2);
    for (double v : f.columns[1])
        if (v < 0.0) throw InputError(path.string() + ": visibility must be nonnegative");
    if (detail::on_grid(f.columns[0], target)) return {VisibilityTrace(target, f.columns[1]), 0};
    try {
        return resample_visibility(f.columns[0], f.columns[1], target);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

inline Spectrum read_spectrum(const std::filesystem::path& path, const FrequencyGrid& grid) {
    const auto f = read_columns(path, 2);
    for (double v : f.columns[1])
        if (v < 0.0) throw InputError(path.string() + ": spectral intensity must be nonnegative");
    auto [x, y] = detail::to_angular(f, path.string(), true);
    if (detail::on_grid(x, grid)) return Spectrum::normalized(grid, y);
    MonotoneCubic interp(std::move(x), std::move(y));
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= interp.front() && grid[i] <= interp.back()) out[i] = std::max(0.0, interp(grid[i]));
    return Spectrum::normalized(grid, std::move(out));
}

/// Phase constants must cover the whole grid; there is no sensible
/// extrapolation for beta.
inline PhaseConstant read_phase_constant(const std::filesystem::path& path, const FrequencyGrid& grid) {
    const auto f = read_columns(path);
    if (f.columns.size() < 2) throw InputError(path.string() + ": expected at least 2 columns");
    auto [x, y] = detail::to_angular(f, path.string(), false);
    if (detail::on_grid(x, grid)) return PhaseConstant(grid, y);
    const double slack = 1e-9 * grid.spacing();
    if (x.front() > grid[0] + slack || x.back() < grid[grid.size() - 1] - slack)
        throw InputError(path.string() + ": phase constant does not cover the frequency grid");
    MonotoneCubic interp(std::move(x), std::move(y));
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = interp(grid[i]);
    return PhaseConstant(grid, std::move(out));
}

} // namespace hompr::io
