#pragma once

// Scenario configuration: one simulated or measured experiment per file.
//
//   scenario.name        label used in summaries (default: file stem)
//   grid.n_points        even, >= 8
//   grid.freq_spacing_thz
//   grid.center_thz      default: the source center
//   source.kind          gaussian | hermite_gaussian | file
//   source.center_nm, source.width_nm (intensity FWHM for gaussian, scale
//   FWHM for hermite_gaussian), source.order, source.file
//   medium.kind          taylor | cosine | file
//   medium.z_km
//   medium.beta0 .. medium.beta6          ps^j/km
//   medium.amplitude (rad/km), medium.period (rad/ps), medium.phase_offset (rad)
//   medium.file
//   statistics           single_photon | coherent | thermal
//   retrieval.*          see RetrievalConfig; retrieval.taylor_seed lists
//                        beta_0, beta_1, ... and retrieval.line_search.* the
//                        step controls
//   output.dir           relative to the config file
//   acceptance.beta2_tolerance, acceptance.beta3_tolerance
//   sweep.*              JSP sweep (see SweepSettings)
//
// Relative paths resolve against the config file's directory. Unknown keys
// are errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hompr/error.hpp"
#include "hompr/forward_model.hpp"
#include "hompr/grid.hpp"
#include "hompr/io/keyvalue.hpp"
#include "hompr/io/traces.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/retrieval/config.hpp"
#include "hompr/spectrum.hpp"
#include "hompr/units.hpp"

namespace hompr::app {

inline constexpr int max_taylor_order = 6;

struct GridSettings {
    std::size_t n_points = 1024;
    double freq_spacing_thz = 0.002;
    std::optional<double> center_thz;
};

struct SourceSettings {
    enum class Kind { gaussian, hermite_gaussian, file };
    Kind kind = Kind::gaussian;
    double center_nm = 1533.0;
    double width_nm = 1.0;
    int order = 3;
    std::filesystem::path file;
};

struct MediumSettings {
    enum class Kind { taylor, cosine, file };
    Kind kind = Kind::taylor;
    double z_km = 3.7;
    std::vector<double> taylor{0.0, 0.0, 4.0, 0.06};
    double amplitude = 0.0;
    double period = 1.0;
    double phase_offset = 0.0;
    std::filesystem::path file;
};

/// Synthetic JSP sweep: a Gaussian reference amplitude alpha' and heralded
/// slices Phi'(omega_s; omega_i0) whose signal center moves as -delta_i
/// (energy conservation) and whose phase is
///     q(delta_i) x^2 / 2 + cubic x^3 / 6,   x = omega_s - slice center,
///     q(delta_i) = quadratic + quadratic_slope * delta_i,
/// with delta_i = omega_i0 - idler center in rad/ps.
struct SweepSettings {
    std::vector<double> idler_offsets_thz;
    double mean_photon_number = 1.0;
    double reference_fwhm_nm = 1.0;
    double slice_fwhm_nm = 0.8;
    double quadratic = 20.0;
    double quadratic_slope = 0.0;
    double cubic = 0.0;
    unsigned jobs = 1;
    /// Optional per-slice iteration budgets (one per offset).
    std::vector<int> slice_max_iterations;
};

struct AcceptanceSettings {
    double beta2_tolerance = 1e-4;
    double beta3_tolerance = 1e-3;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::filesystem::path source_file;
    GridSettings grid;
    SourceSettings source;
    MediumSettings medium;
    PhotonStatistics statistics{PhotonKind::single_photon};
    RetrievalConfig retrieval;
    std::filesystem::path output_dir;
    AcceptanceSettings acceptance;
    std::optional<SweepSettings> sweep;
    /// Every key = value pair as read (plus overrides), for run records.
    std::vector<std::pair<std::string, std::string>> snapshot;

    double center_angular() const {
        return grid.center_thz ? units::angular_from_thz(*grid.center_thz)
                               : units::angular_from_wavelength(source.center_nm);
    }
    /// Expansion center of the medium's Taylor or cosine profile.
    double medium_center() const { return units::angular_from_wavelength(source.center_nm); }

    ConjugateGrids grids() const {
        return build_conjugate_grids(grid.n_points, units::angular_from_thz(grid.freq_spacing_thz), center_angular());
    }

    Spectrum spectrum(const FrequencyGrid& g) const {
        switch (source.kind) {
        case SourceSettings::Kind::gaussian: return gaussian_spectrum(g, source.center_nm, source.width_nm);
        case SourceSettings::Kind::hermite_gaussian:
            return hermite_gaussian_spectrum(g, source.order, source.center_nm, source.width_nm);
        case SourceSettings::Kind::file: return io::read_spectrum(source.file, g);
        }
        throw InputError("unreachable source kind");
    }

    PhaseConstant phase_constant(const FrequencyGrid& g) const {
        switch (medium.kind) {
        case MediumSettings::Kind::taylor: return taylor_phase_constant(g, medium.taylor, medium_center());
        case MediumSettings::Kind::cosine:
            return cosine_phase_constant(g, medium.amplitude, medium.period, medium.phase_offset, medium_center());
        case MediumSettings::Kind::file: return io::read_phase_constant(medium.file, g);
        }
        throw InputError("unreachable medium kind");
    }
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline std::filesystem::path existing_file(const io::KeyValueFile& kv, const std::string& key,
                                           const std::filesystem::path& base) {
    const auto path = resolve(base, kv.required_text(key));
    if (!std::filesystem::is_regular_file(path)) throw FieldError(key, "file '" + path.string() + "' does not exist");
    return path;
}

template <class F>
auto field(const std::string& key, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const FieldError&) {
        throw;
    } catch (const InputError& e) {
        throw FieldError(key, e.what());
    }
}

inline void read_retrieval(const io::KeyValueFile& kv, RetrievalConfig& r) {
    if (auto v = kv.text("retrieval.algorithm")) r.algorithm = field("retrieval.algorithm", [&] {
        return parse_algorithm(*v);
    });
    r.max_iterations = static_cast<int>(kv.integer_or("retrieval.max_iterations", r.max_iterations));
    r.error_tolerance = kv.number_or("retrieval.error_tolerance", r.error_tolerance);
    r.stall_tolerance = kv.number_or("retrieval.stall_tolerance", r.stall_tolerance);
    r.stall_window = static_cast<int>(kv.integer_or("retrieval.stall_window", r.stall_window));
    r.min_stage_iterations = static_cast<int>(kv.integer_or("retrieval.min_stage_iterations", r.min_stage_iterations));
    r.gp_coeff_order = static_cast<int>(kv.integer_or("retrieval.gp_coeff_order", r.gp_coeff_order));
    if (auto v = kv.text("retrieval.initial_guess"))
        r.initial_guess.kind = field("retrieval.initial_guess", [&] { return parse_initial_guess_kind(*v); });
    if (auto s = kv.integer("retrieval.seed")) {
        if (*s < 0) throw FieldError("retrieval.seed", "must be nonnegative");
        r.initial_guess.seed = static_cast<std::uint64_t>(*s);
    }
    if (auto t = kv.numbers("retrieval.taylor_seed")) r.initial_guess.taylor = *t;
    if (r.initial_guess.kind == InitialGuess::Kind::taylor_seed && r.initial_guess.taylor.empty())
        throw FieldError("retrieval.taylor_seed", "is required when retrieval.initial_guess = taylor_seed");
    r.line_search.initial_step = kv.number_or("retrieval.line_search.initial_step", r.line_search.initial_step);
    r.line_search.growth = kv.number_or("retrieval.line_search.growth", r.line_search.growth);
    r.line_search.shrink = kv.number_or("retrieval.line_search.shrink", r.line_search.shrink);
    r.line_search.max_probes =
        static_cast<int>(kv.integer_or("retrieval.line_search.max_probes", r.line_search.max_probes));
    try {
        r.validate();
    } catch (const InputError& e) {
        std::string msg = e.what();
        const auto sp = msg.find(' ');
        throw FieldError("retrieval." + msg.substr(0, sp), msg.substr(sp + 1));
    }
}

} // namespace detail

/// Builds a scenario from parsed key-value pairs. `base` anchors relative
/// paths.
inline ScenarioConfig parse_scenario(const io::KeyValueFile& kv, const std::filesystem::path& base,
                                     const std::string& default_name) {
    ScenarioConfig c;
    c.name = kv.text_or("scenario.name", default_name);

    if (auto n = kv.integer("grid.n_points")) {
        if (*n < static_cast<std::int64_t>(min_grid_points) || *n % 2 != 0)
            throw FieldError("grid.n_points", "must be even and at least 8");
        c.grid.n_points = static_cast<std::size_t>(*n);
    }
    c.grid.freq_spacing_thz = kv.number_or("grid.freq_spacing_thz", c.grid.freq_spacing_thz);
    if (!(c.grid.freq_spacing_thz > 0.0)) throw FieldError("grid.freq_spacing_thz", "must be positive");
    c.grid.center_thz = kv.number("grid.center_thz");
    if (c.grid.center_thz && !(*c.grid.center_thz > 0.0)) throw FieldError("grid.center_thz", "must be positive");

    const std::string source_kind = kv.text_or("source.kind", "gaussian");
    if (source_kind == "gaussian") {
        c.source.kind = SourceSettings::Kind::gaussian;
    } else if (source_kind == "hermite_gaussian") {
        c.source.kind = SourceSettings::Kind::hermite_gaussian;
        c.source.order = static_cast<int>(kv.integer_or("source.order", c.source.order));
        if (c.source.order < 0) throw FieldError("source.order", "must be nonnegative");
    } else if (source_kind == "file") {
        c.source.kind = SourceSettings::Kind::file;
        c.source.file = detail::existing_file(kv, "source.file", base);
    } else {
        throw FieldError("source.kind", "'" + source_kind + "' is not one of gaussian, hermite_gaussian, file");
    }
    c.source.center_nm = kv.number_or("source.center_nm", c.source.center_nm);
    c.source.width_nm = kv.number_or("source.width_nm", c.source.width_nm);
    if (!(c.source.center_nm > 0.0)) throw FieldError("source.center_nm", "must be positive");
    if (!(c.source.width_nm > 0.0)) throw FieldError("source.width_nm", "must be positive");

    const std::string medium_kind = kv.text_or("medium.kind", "taylor");
    c.medium.z_km = kv.number_or("medium.z_km", c.medium.z_km);
    if (!(c.medium.z_km > 0.0)) throw FieldError("medium.z_km", "must be positive");
    if (medium_kind == "taylor") {
        c.medium.kind = MediumSettings::Kind::taylor;
        std::vector<double> beta(max_taylor_order + 1, 0.0);
        bool any = false;
        for (int j = 0; j <= max_taylor_order; ++j) {
            if (auto b = kv.number("medium.beta" + std::to_string(j))) {
                beta[static_cast<std::size_t>(j)] = *b;
                any = true;
            }
        }
        if (any) {
            while (beta.size() > 4 && beta.back() == 0.0) beta.pop_back();
            c.medium.taylor = beta;
        }
    } else if (medium_kind == "cosine") {
        c.medium.kind = MediumSettings::Kind::cosine;
        c.medium.amplitude = kv.required_number("medium.amplitude");
        c.medium.period = kv.required_number("medium.period");
        c.medium.phase_offset = kv.number_or("medium.phase_offset", 0.0);
        if (!(c.medium.period > 0.0)) throw FieldError("medium.period", "must be positive");
    } else if (medium_kind == "file") {
        c.medium.kind = MediumSettings::Kind::file;
        c.medium.file = detail::existing_file(kv, "medium.file", base);
    } else {
        throw FieldError("medium.kind", "'" + medium_kind + "' is not one of taylor, cosine, file");
    }

    if (auto s = kv.text("statistics")) c.statistics = detail::field("statistics", [&] {
        return PhotonStatistics::parse(*s);
    });

    detail::read_retrieval(kv, c.retrieval);

    c.output_dir = detail::resolve(base, kv.text_or("output.dir", "out/" + c.name));
    c.acceptance.beta2_tolerance = kv.number_or("acceptance.beta2_tolerance", c.acceptance.beta2_tolerance);
    c.acceptance.beta3_tolerance = kv.number_or("acceptance.beta3_tolerance", c.acceptance.beta3_tolerance);

    if (auto offsets = kv.numbers("sweep.idler_offsets_thz")) {
        SweepSettings s;
        s.idler_offsets_thz = *offsets;
        if (s.idler_offsets_thz.empty()) throw FieldError("sweep.idler_offsets_thz", "slice list is empty");
        s.mean_photon_number = kv.number_or("sweep.mean_photon_number", s.mean_photon_number);
        if (s.mean_photon_number < 0.0) throw FieldError("sweep.mean_photon_number", "must be nonnegative");
        s.reference_fwhm_nm = kv.number_or("sweep.reference_fwhm_nm", s.reference_fwhm_nm);
        s.slice_fwhm_nm = kv.number_or("sweep.slice_fwhm_nm", s.slice_fwhm_nm);
        if (!(s.reference_fwhm_nm > 0.0)) throw FieldError("sweep.reference_fwhm_nm", "must be positive");
        if (!(s.slice_fwhm_nm > 0.0)) throw FieldError("sweep.slice_fwhm_nm", "must be positive");
        s.quadratic = kv.number_or("sweep.quadratic", s.quadratic);
        s.quadratic_slope = kv.number_or("sweep.quadratic_slope", s.quadratic_slope);
        s.cubic = kv.number_or("sweep.cubic", s.cubic);
        const auto jobs = kv.integer_or("sweep.jobs", 1);
        if (jobs < 1) throw FieldError("sweep.jobs", "must be at least 1");
        s.jobs = static_cast<unsigned>(jobs);
        if (auto b = kv.numbers("sweep.slice_max_iterations")) {
            if (b->size() != s.idler_offsets_thz.size())
                throw FieldError("sweep.slice_max_iterations", "needs one entry per idler offset");
            for (double x : *b) {
                if (x < 1 || x != std::floor(x)) throw FieldError("sweep.slice_max_iterations", "entries must be integers >= 1");
                s.slice_max_iterations.push_back(static_cast<int>(x));
            }
        }
        c.sweep = s;
    } else {
        for (const auto& [k, v] : kv.entries())
            if (k.rfind("sweep.", 0) == 0) throw FieldError("sweep.idler_offsets_thz", "is required by " + k);
    }

    kv.reject_unused();
    c.snapshot = kv.entries();
    return c;
}

/// Reads a scenario file; `overrides` (key, value) replace file entries.
inline ScenarioConfig load_scenario(const std::filesystem::path& path,
                                    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    auto kv = io::KeyValueFile::read(path);
    for (const auto& [k, v] : overrides) kv.set(k, v);
    auto c = parse_scenario(kv, path.parent_path(), path.stem().string());
    c.source_file = path;
    return c;
}

} // namespace hompr::app
