#pragma once

// End-to-end runs behind the CLI subcommands. Each run returns its numbers
// and writes its artifacts into the scenario's output directory.

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hompr/analysis/dispersion.hpp"
#include "hompr/analysis/jsp.hpp"
#include "hompr/app/scenario.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/io/columns.hpp"
#include "hompr/io/keyvalue.hpp"
#include "hompr/io/traces.hpp"
#include "hompr/retrieval/run.hpp"
#include "hompr/version.hpp"

namespace hompr::app {

using Entries = std::vector<std::pair<std::string, std::string>>;
namespace fs = std::filesystem;

struct Simulation {
    ConjugateGrids grids;
    Spectrum spectrum;
    PhaseConstant beta;
    VisibilityTrace visibility;
    CoincidenceTrace coincidence;
};

inline Simulation simulate(const ScenarioConfig& c) {
    auto grids = c.grids();
    auto spectrum = c.spectrum(grids.frequency);
    auto beta = c.phase_constant(grids.frequency);
    auto v = visibility(spectrum, beta, c.medium.z_km, grids.delay);
    auto nc = coincidence_from_visibility(v, c.statistics);
    return Simulation{std::move(grids), std::move(spectrum), std::move(beta), std::move(v), std::move(nc)};
}

inline std::vector<fs::path> write_simulation(const Simulation& s, const ScenarioConfig& c, const fs::path& dir) {
    std::vector<fs::path> files{dir / "visibility.dat", dir / "coincidence.dat", dir / "spectrum.dat",
                                dir / "beta_true.dat"};
    io::write_visibility(files[0], s.visibility,
                         {{"scenario", c.name}, {"z_km", io::format_double(c.medium.z_km)}});
    io::write_coincidence(files[1], s.coincidence, c.statistics);
    io::write_spectrum(files[2], s.spectrum);
    io::write_phase_constant(files[3], s.beta);
    return files;
}

struct RetrievalOutcome {
    RetrievalResult result;
    DispersionEstimate estimate;
    std::optional<ErrorReport> report;
    std::vector<IterationRecord> log;
    double seconds = 0.0;
};

inline RetrievalOutcome retrieve(const ScenarioConfig& c, const VisibilityTrace& v, const Spectrum& spectrum,
                                 const PhaseConstant* truth, const IterationSink& sink = {}) {
    std::vector<IterationRecord> log;
    const auto start = std::chrono::steady_clock::now();
    auto result = run(v, spectrum, c.medium.z_km, c.retrieval, [&](const IterationRecord& r) {
        log.push_back(r);
        if (sink) sink(r);
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto estimate = estimate_dispersion(result.recovered_beta, spectrum);
    std::optional<ErrorReport> report;
    if (truth) report = compare_to_truth(result, *truth, spectrum);
    return RetrievalOutcome{std::move(result), std::move(estimate), report, std::move(log), seconds};
}

inline Entries report_entries(const RetrievalOutcome& o) {
    const auto& s = o.result.final_state;
    Entries e{{"converged", o.result.converged ? "true" : "false"},
              {"stop_reason", std::string(to_string(o.result.reason))},
              {"iterations", std::to_string(s.iteration)},
              {"initial_error", io::format_double(s.error_history.front())},
              {"final_error", io::format_double(s.error())},
              {"beta2_estimate", io::format_double(o.estimate.beta2)},
              {"beta3_estimate", io::format_double(o.estimate.beta3)},
              {"stages", std::to_string(o.result.stages.size())},
              {"seconds", io::format_double(o.seconds)}};
    if (o.report) {
        e.emplace_back("beta2_error", io::format_double(o.report->beta2_error));
        e.emplace_back("beta3_error", io::format_double(o.report->beta3_error));
    }
    return e;
}

inline std::vector<fs::path> write_retrieval(const RetrievalOutcome& o, const fs::path& dir) {
    std::vector<fs::path> files{dir / "beta_recovered.dat", dir / "recovered_visibility.dat", dir / "convergence.log",
                                dir / "report.txt"};
    io::write_phase_constant(files[0], o.result.recovered_beta,
                             {{"beta2_ps2_per_km", &o.estimate.per_frequency_beta2},
                              {"beta3_ps3_per_km", &o.estimate.per_frequency_beta3}});
    io::write_visibility(files[1], o.result.recovered_visibility, {{"source", "retrieval"}});
    {
        std::ofstream log(files[2]);
        if (!log) throw InputError(files[2].string() + ": cannot write file");
        log << "# k error stage\n";
        for (const auto& r : o.log) log << r.k << ' ' << io::format_double(r.error) << ' ' << to_string(r.stage) << '\n';
    }
    io::write_record(files[3], report_entries(o));
    return files;
}

/// Summary of one CLI invocation, written even when the run fails.
struct RunRecord {
    std::string command;
    std::string status = "ok";
    std::string failure;
    Entries config;
    Entries summary;
    std::vector<fs::path> artifacts;
    double seconds = 0.0;

    void write(const fs::path& path) const {
        Entries e{{"command", command}, {"status", status}};
        if (!failure.empty()) e.emplace_back("failure", failure);
        e.emplace_back("toolkit_version", hompr::version);
        e.emplace_back("wall_seconds", io::format_double(seconds));
        for (const auto& [k, v] : summary) e.emplace_back("result." + k, v);
        for (std::size_t i = 0; i < artifacts.size(); ++i)
            e.emplace_back("artifact." + std::to_string(i), artifacts[i].string());
        for (const auto& [k, v] : config) e.emplace_back("config." + k, v);
        io::write_record(path, e);
    }
};

// --- JSP sweep -------------------------------------------------------------

struct SweepOutcome {
    JspMap map;
    /// Preset quadratic coefficient per slice (rad ps^2).
    std::vector<double> presets;
};

namespace detail {

inline SpectralTrace gaussian_amplitude(const FrequencyGrid& g, double center, double intensity_fwhm, double quadratic,
                                        double cubic) {
    const double sigma = units::sigma_from_fwhm(intensity_fwhm);
    SpectralTrace t(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g[i] - center;
        const double amp = std::exp(-x * x / (4.0 * sigma * sigma));
        t[i] = std::polar(amp, 0.5 * quadratic * x * x + cubic * x * x * x / 6.0);
    }
    return normalize_amplitude(std::move(t));
}

} // namespace detail

inline SweepOutcome sweep(const ScenarioConfig& c) {
    if (!c.sweep) throw FieldError("sweep.idler_offsets_thz", "is required by the sweep command");
    const auto& s = *c.sweep;
    const auto grids = c.grids();
    const double center = c.medium_center();
    const double ref_width = angular_fwhm(c.source.center_nm, s.reference_fwhm_nm);
    const double slice_width = angular_fwhm(c.source.center_nm, s.slice_fwhm_nm);
    const auto alpha = detail::gaussian_amplitude(grids.frequency, center, ref_width, 0.0, 0.0);

    std::vector<double> offsets;
    std::vector<double> presets;
    for (double thz : s.idler_offsets_thz) {
        offsets.push_back(units::angular_from_thz(thz));
        presets.push_back(s.quadratic + s.quadratic_slope * offsets.back());
    }
    auto family = [&](double delta) {
        return detail::gaussian_amplitude(grids.frequency, center - delta, slice_width,
                                          s.quadratic + s.quadratic_slope * delta, s.cubic);
    };
    JspSweepOptions options;
    options.mean_photon_number = s.mean_photon_number;
    options.retrieval = c.retrieval;
    options.gauge_reference = center;
    options.jobs = s.jobs;
    options.slice_max_iterations = s.slice_max_iterations;
    auto map = jsp_sweep(alpha, family, offsets, grids.delay, options);
    return SweepOutcome{std::move(map), std::move(presets)};
}

inline std::vector<fs::path> write_sweep(const SweepOutcome& o, const fs::path& dir) {
    const auto& m = o.map;
    const auto omega = m.signal_grid.samples();
    std::string offsets;
    for (double d : m.idler_centers) offsets += (offsets.empty() ? "" : " ") + io::format_double(d);
    const io::Header header{{"rows", "signal omega (rad/ps), first column"},
                            {"idler_offsets_rad_per_ps", offsets},
                            {"gauge_reference_rad_per_ps", io::format_double(m.gauge_reference)},
                            {"gauge", "phase and slope zero at the reference in every slice"}};
    std::vector<std::vector<double>> phase(m.phase.size()), mask(m.phase.size());
    std::vector<io::ColumnSpec> pcols{{"omega_rad_per_ps", &omega}}, mcols{{"omega_rad_per_ps", &omega}};
    for (std::size_t k = 0; k < m.phase.size(); ++k) {
        phase[k].resize(omega.size());
        mask[k].resize(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            phase[k][i] = m.valid[k][i] ? m.phase[k][i] : std::numeric_limits<double>::quiet_NaN();
            mask[k][i] = m.valid[k][i] ? 1.0 : 0.0;
        }
    }
    for (std::size_t k = 0; k < m.phase.size(); ++k) {
        pcols.push_back({"slice" + std::to_string(k), &phase[k]});
        mcols.push_back({"slice" + std::to_string(k), &mask[k]});
    }
    std::vector<fs::path> files{dir / "jsp_phase.dat", dir / "jsp_mask.dat"};
    io::write_columns(files[0], header, pcols);
    io::write_columns(files[1], header, mcols);
    for (std::size_t k = 0; k < m.slices.size(); ++k) {
        const auto& s = m.slices[k];
        const double rel = std::abs(s.quadratic - o.presets[k]) / std::abs(o.presets[k]);
        files.push_back(dir / ("slice" + std::to_string(k) + ".txt"));
        io::write_record(files.back(), {{"idler_offset_rad_per_ps", io::format_double(s.idler_center)},
                                        {"converged", s.converged ? "true" : "false"},
                                        {"stop_reason", std::string(to_string(s.reason))},
                                        {"iterations", std::to_string(s.iterations)},
                                        {"final_error", io::format_double(s.final_error)},
                                        {"quadratic_estimate", io::format_double(s.quadratic)},
                                        {"quadratic_preset", io::format_double(o.presets[k])},
                                        {"quadratic_relative_error", io::format_double(rel)}});
    }
    return files;
}

// --- reproduce ---------------------------------------------------------------

struct ReproduceRow {
    std::string scenario;
    std::string algorithm;
    bool ok = false;
    std::string failure;
    double initial_error = 0.0;
    double final_error = 0.0;
    int iterations = 0;
    double beta2_error = 0.0;
    double beta3_error = 0.0;
    bool converged = false;
    double seconds = 0.0;
};

/// simulate -> retrieve for one scenario, writing the usual artifacts.
inline ReproduceRow reproduce_one(const ScenarioConfig& c) {
    ReproduceRow row;
    row.scenario = c.name;
    row.algorithm = std::string(to_string(c.retrieval.algorithm));
    const auto sim = simulate(c);
    write_simulation(sim, c, c.output_dir);
    const auto o = retrieve(c, sim.visibility, sim.spectrum, &sim.beta);
    write_retrieval(o, c.output_dir);
    row.ok = true;
    row.initial_error = o.result.final_state.error_history.front();
    row.final_error = o.result.final_state.error();
    row.iterations = o.result.final_state.iteration;
    row.beta2_error = o.report->beta2_error;
    row.beta3_error = o.report->beta3_error;
    row.converged = o.result.converged;
    row.seconds = o.seconds;
    return row;
}

} // namespace hompr::app
