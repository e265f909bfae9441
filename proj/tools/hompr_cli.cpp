// hompr: simulate HOM visibility traces and retrieve phase constants.
//
// Exit status: 0 success, 1 input or config error, 2 ran but did not
// converge.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hompr/app/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hompr;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_not_converged = 2;

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iters;
    std::string algorithm;

    void attach(CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", config, "scenario config file")->check(CLI::ExistingFile);
        if (needs_config) c->required();
        cmd->add_option("--out", out, "output directory (overrides output.dir)");
        cmd->add_option("--seed", seed, "RNG seed for random_phase starts");
        cmd->add_option("--max-iters", max_iters, "iteration budget")->check(CLI::PositiveNumber);
        cmd->add_option("--algorithm", algorithm, "gs | gp-phase | gp-coeff | composite");
    }

    std::vector<std::pair<std::string, std::string>> overrides() const {
        std::vector<std::pair<std::string, std::string>> o;
        if (!out.empty()) o.emplace_back("output.dir", fs::absolute(out).string());
        if (seed) o.emplace_back("retrieval.seed", std::to_string(*seed));
        if (max_iters) o.emplace_back("retrieval.max_iterations", std::to_string(*max_iters));
        if (!algorithm.empty()) o.emplace_back("retrieval.algorithm", algorithm);
        return o;
    }

    /// Where the run record goes when the config itself cannot be read.
    fs::path fallback_dir() const {
        if (!out.empty()) return out;
        if (!config.empty()) return fs::path(config).parent_path() / "out" / fs::path(config).stem();
        return "out";
    }
};

/// Runs `body`, times it and writes run_record.txt whatever happens.
template <class Body>
int guarded(const std::string& command, const CommonOptions& opts, Body&& body) {
    app::RunRecord record;
    record.command = command;
    fs::path dir = opts.fallback_dir();
    const auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
        code = body(record, dir);
        if (code == exit_not_converged) record.status = "not_converged";
    } catch (const InputError& e) {
        record.status = "input_error";
        record.failure = e.what();
        std::cerr << "error: " << e.what() << '\n';
        code = exit_input;
    } catch (const std::exception& e) {
        record.status = "error";
        record.failure = e.what();
        std::cerr << "error: " << e.what() << '\n';
        code = exit_input;
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        record.write(dir / "run_record.txt");
    } catch (const std::exception& e) {
        std::cerr << "warning: could not write run record: " << e.what() << '\n';
    }
    return code;
}

app::ScenarioConfig load(const CommonOptions& opts, fs::path& dir, app::RunRecord& record) {
    auto c = app::load_scenario(opts.config, opts.overrides());
    dir = c.output_dir;
    record.config = c.snapshot;
    return c;
}

int cmd_simulate(const CommonOptions& opts) {
    return guarded("simulate", opts, [&](app::RunRecord& record, fs::path& dir) {
        const auto c = load(opts, dir, record);
        const auto sim = app::simulate(c);
        record.artifacts = app::write_simulation(sim, c, dir);
        record.summary = {{"peak_visibility", io::format_double(sim.visibility.peak())}};
        std::printf("%s: peak visibility %.12g, wrote %s\n", c.name.c_str(), sim.visibility.peak(),
                    dir.string().c_str());
        return exit_ok;
    });
}

int cmd_retrieve(const CommonOptions& opts, const std::string& vis_file, const std::string& spec_file) {
    return guarded("retrieve", opts, [&](app::RunRecord& record, fs::path& dir) {
        const auto c = load(opts, dir, record);
        const auto grids = c.grids();
        std::optional<app::Simulation> sim;
        if (vis_file.empty() || spec_file.empty()) sim = app::simulate(c);
        const auto v = vis_file.empty() ? sim->visibility : io::read_visibility(vis_file, grids.delay).trace;
        const auto spectrum = spec_file.empty() ? sim->spectrum : io::read_spectrum(spec_file, grids.frequency);
        const bool simulated_medium = c.medium.kind != app::MediumSettings::Kind::file || sim;
        std::optional<PhaseConstant> truth;
        if (simulated_medium) truth = sim ? sim->beta : c.phase_constant(grids.frequency);
        const auto o = app::retrieve(c, v, spectrum, truth ? &*truth : nullptr);
        record.artifacts = app::write_retrieval(o, dir);
        record.summary = app::report_entries(o);
        std::printf("%s: %s after %d iterations, E = %.6g, beta2 = %.10g ps^2/km, beta3 = %.10g ps^3/km\n",
                    c.name.c_str(), std::string(to_string(o.result.reason)).c_str(), o.result.final_state.iteration,
                    o.result.final_state.error(), o.estimate.beta2, o.estimate.beta3);
        return o.result.converged ? exit_ok : exit_not_converged;
    });
}

/// Grid implied by a uniformly sampled rad/ps abscissa.
FrequencyGrid grid_from_samples(const std::vector<double>& x, const std::string& source) {
    if (x.size() < min_grid_points || x.size() % 2 != 0)
        throw InputError(source + ": need an even number (>= 8) of samples to infer the grid");
    const double spacing = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    FrequencyGrid g(x[x.size() / 2], spacing, x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - g[i]) > 1e-6 * spacing) throw InputError(source + ": abscissa is not uniformly sampled");
    return g;
}

int cmd_analyze(const CommonOptions& opts, const std::string& beta_file, const std::string& spec_file,
                const std::string& truth_file) {
    return guarded("analyze", opts, [&](app::RunRecord& record, fs::path& dir) {
        std::optional<FrequencyGrid> grid;
        if (!opts.config.empty()) {
            const auto c = load(opts, dir, record);
            grid = c.grids().frequency;
        } else {
            if (!opts.out.empty()) dir = opts.out;
            const auto f = io::read_columns(beta_file);
            if (f.header.count("x_unit") && f.header.at("x_unit") != "rad_per_ps")
                throw InputError(beta_file + ": without --config the phase constant must be sampled in rad_per_ps");
            grid = grid_from_samples(f.columns[0], beta_file);
        }
        const auto beta = io::read_phase_constant(beta_file, *grid);
        const auto spectrum = io::read_spectrum(spec_file, *grid);
        const auto est = estimate_dispersion(beta, spectrum);
        app::Entries e{{"beta2", io::format_double(est.beta2)}, {"beta3", io::format_double(est.beta3)}};
        if (!truth_file.empty()) {
            const auto truth = io::read_phase_constant(truth_file, *grid);
            const auto r = compare_to_truth(beta, truth, spectrum, 0.0, 0);
            e.emplace_back("beta2_error", io::format_double(r.beta2_error));
            e.emplace_back("beta3_error", io::format_double(r.beta3_error));
        }
        const fs::path record_path = dir / "dispersion.txt";
        const fs::path profile_path = dir / "beta_derivatives.dat";
        io::write_record(record_path, e);
        io::write_phase_constant(profile_path, beta,
                                 {{"beta2_ps2_per_km", &est.per_frequency_beta2},
                                  {"beta3_ps3_per_km", &est.per_frequency_beta3}});
        record.artifacts = {record_path, profile_path};
        record.summary = e;
        std::printf("beta2 = %.10g ps^2/km, beta3 = %.10g ps^3/km\n", est.beta2, est.beta3);
        return exit_ok;
    });
}

int cmd_sweep(const CommonOptions& opts, std::optional<unsigned> jobs) {
    return guarded("sweep", opts, [&](app::RunRecord& record, fs::path& dir) {
        auto c = load(opts, dir, record);
        if (c.sweep && jobs) c.sweep->jobs = std::max(1u, *jobs);
        const auto o = app::sweep(c);
        record.artifacts = app::write_sweep(o, dir);
        int masked = 0;
        for (std::size_t k = 0; k < o.map.slices.size(); ++k) {
            const auto& s = o.map.slices[k];
            masked += s.converged ? 0 : 1;
            std::printf("slice %zu (offset %.6g rad/ps): %s, quadratic %.10g (preset %.10g)\n", k, s.idler_center,
                        s.converged ? "converged" : "masked", s.quadratic, o.presets[k]);
        }
        record.summary = {{"slices", std::to_string(o.map.slices.size())}, {"masked_slices", std::to_string(masked)}};
        return exit_ok;
    });
}

int cmd_reproduce(const CommonOptions& opts, const std::string& scenario_dir, unsigned jobs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(scenario_dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .cfg files in " << scenario_dir << '\n';
        return exit_input;
    }

    auto one = [&](const fs::path& file) {
        app::ReproduceRow row;
        row.scenario = file.stem().string();
        try {
            auto overrides = CommonOptions{file.string(), "", opts.seed, opts.max_iters, opts.algorithm}.overrides();
            if (!opts.out.empty())
                overrides.emplace_back("output.dir", fs::absolute(fs::path(opts.out) / file.stem()).string());
            const auto c = app::load_scenario(file, overrides);
            if (c.sweep) {
                row.algorithm = "sweep";
                const auto o = app::sweep(c);
                app::write_sweep(o, c.output_dir);
                row.ok = true;
                row.converged = true;
                double worst = 0.0;
                for (std::size_t k = 0; k < o.map.slices.size(); ++k) {
                    row.converged = row.converged && o.map.slices[k].converged;
                    worst = std::max(worst, std::abs(o.map.slices[k].quadratic - o.presets[k]) / std::abs(o.presets[k]));
                    row.iterations += o.map.slices[k].iterations;
                    row.final_error = std::max(row.final_error, o.map.slices[k].final_error);
                }
                row.beta2_error = worst;
                return row;
            }
            return app::reproduce_one(c);
        } catch (const std::exception& e) {
            row.failure = e.what();
            return row;
        }
    };

    std::vector<app::ReproduceRow> rows(files.size());
    const unsigned j = std::max(1u, jobs);
    for (std::size_t first = 0; first < files.size(); first += j) {
        std::vector<std::future<app::ReproduceRow>> batch;
        for (std::size_t k = first; k < std::min(files.size(), first + j); ++k)
            batch.push_back(std::async(std::launch::async, one, files[k]));
        for (std::size_t b = 0; b < batch.size(); ++b) rows[first + b] = batch[b].get();
    }

    std::printf("%-22s %-10s %12s %12s %6s %12s %12s %s\n", "scenario", "algorithm", "E_initial", "E_final", "iters",
                "beta2_err", "beta3_err", "status");
    int code = exit_ok;
    for (const auto& r : rows) {
        if (!r.ok) {
            std::printf("%-22s %-10s input error: %s\n", r.scenario.c_str(), r.algorithm.c_str(), r.failure.c_str());
            code = exit_input;
            continue;
        }
        if (r.algorithm == "sweep") {
            std::printf("%-22s %-10s %12s %12.4e %6d %12.4e %12s %s\n", r.scenario.c_str(), "sweep", "-",
                        r.final_error, r.iterations, r.beta2_error, "-",
                        r.converged ? "all slices converged" : "slices masked");
        } else {
            std::printf("%-22s %-10s %12.8f %12.4e %6d %12.4e %12.4e %s\n", r.scenario.c_str(), r.algorithm.c_str(),
                        r.initial_error, r.final_error, r.iterations, r.beta2_error, r.beta3_error,
                        r.converged ? "converged" : "not converged");
        }
        if (!r.converged && code == exit_ok) code = exit_not_converged;
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HOM visibility simulation and phase-constant retrieval"};
    app.set_version_flag("--version", std::string(hompr::version));
    app.require_subcommand(1);

    CommonOptions sim_opts, ret_opts, ana_opts, swp_opts, rep_opts;
    auto* sim = app.add_subcommand("simulate", "write visibility, coincidence, spectrum and beta traces");
    sim_opts.attach(sim, true);

    auto* ret = app.add_subcommand("retrieve", "recover beta(omega) from a visibility trace and spectrum");
    ret_opts.attach(ret, true);
    std::string vis_file, spec_file;
    ret->add_option("--visibility", vis_file, "visibility trace (default: simulate from the config)")
        ->check(CLI::ExistingFile);
    ret->add_option("--spectrum", spec_file, "spectrum (default: from the config)")->check(CLI::ExistingFile);

    auto* ana = app.add_subcommand("analyze", "beta2/beta3 from a phase-constant file");
    ana_opts.attach(ana, false);
    std::string beta_file, ana_spec, truth_file;
    ana->add_option("--beta", beta_file, "phase constant file")->required()->check(CLI::ExistingFile);
    ana->add_option("--spectrum", ana_spec, "spectrum used as weights")->required()->check(CLI::ExistingFile);
    ana->add_option("--truth", truth_file, "reference phase constant")->check(CLI::ExistingFile);

    auto* swp = app.add_subcommand("sweep", "assemble a joint spectral phase map");
    swp_opts.attach(swp, true);
    std::optional<unsigned> sweep_jobs;
    swp->add_option("--jobs", sweep_jobs, "slices retrieved concurrently")->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("reproduce", "run every scenario in a directory and print a summary");
    rep_opts.attach(rep, false);
    std::string scenario_dir = "scenarios";
    unsigned rep_jobs = 1;
    rep->add_option("--scenarios", scenario_dir, "directory of .cfg files")->check(CLI::ExistingDirectory);
    rep->add_option("--jobs", rep_jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    if (*sim) return cmd_simulate(sim_opts);
    if (*ret) return cmd_retrieve(ret_opts, vis_file, spec_file);
    if (*ana) return cmd_analyze(ana_opts, beta_file, ana_spec, truth_file);
    if (*swp) return cmd_sweep(swp_opts, sweep_jobs);
    return cmd_reproduce(rep_opts, scenario_dir, rep_jobs);
}
