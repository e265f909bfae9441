// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hompr/analysis/dispersion.hpp"
#include "hompr/analysis/jsp.hpp"
#include "hompr/app/pipeline.hpp"
#include "hompr/app/scenario.hpp"
#include "hompr/fourier.hpp"
#include "hompr/io/traces.hpp"
#include "hompr/retrieval/run.hpp"

namespace {

using namespace hompr;
namespace fs = std::filesystem;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

const fs::path scenario_dir{HOMPR_SCENARIO_DIR};

app::ScenarioConfig scenario(const std::string& name, std::vector<std::pair<std::string, std::string>> overrides = {}) {
    const auto out = fs::temp_directory_path() / "hompr_acceptance" / name;
    overrides.emplace_back("output.dir", out.string());
    return app::load_scenario(scenario_dir / (name + ".cfg"), overrides);
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(scenario_dir))
        if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- sweep helpers -----------------------------------------------------------

struct SweepInputs {
    ConjugateGrids grids;
    SpectralTrace alpha;
    std::vector<double> offsets;
    std::vector<SpectralTrace> slices;
    std::vector<double> presets;
};

SweepInputs sweep_inputs(const app::ScenarioConfig& c) {
    const auto& s = *c.sweep;
    auto grids = c.grids();
    const double center = c.medium_center();
    auto alpha = app::detail::gaussian_amplitude(grids.frequency, center,
                                                 angular_fwhm(c.source.center_nm, s.reference_fwhm_nm), 0.0, 0.0);
    SweepInputs in{grids, alpha, {}, {}, {}};
    for (double thz : s.idler_offsets_thz) {
        const double d = units::angular_from_thz(thz);
        const double q = s.quadratic + s.quadratic_slope * d;
        in.offsets.push_back(d);
        in.presets.push_back(q);
        in.slices.push_back(app::detail::gaussian_amplitude(
            grids.frequency, center - d, angular_fwhm(c.source.center_nm, s.slice_fwhm_nm), q, s.cubic));
    }
    return in;
}

// --- C1 ------------------------------------------------------------------------

Verdict round_trip_closure() {
    Verdict v{true, ""};
    for (const auto& name : scenario_names()) {
        const auto c = scenario(name, {{"retrieval.algorithm", "composite"},
                                       {"retrieval.max_iterations", "5000"},
                                       {"retrieval.error_tolerance", "1e-10"}});
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        int iterations = 0;
        bool ok = true;
        if (c.sweep) {
            // Sweeps have no trace files; every slice goes through the same retrieval.
            const auto o = app::sweep(c);
            for (const auto& s : o.map.slices) {
                worst = std::max(worst, s.final_error);
                iterations = std::max(iterations, s.iterations);
                ok = ok && s.converged;
            }
        } else {
            const auto sim = app::simulate(c);
            app::write_simulation(sim, c, c.output_dir);
            const auto g = c.grids();
            const auto vis = io::read_visibility(c.output_dir / "visibility.dat", g.delay);
            const auto spec = io::read_spectrum(c.output_dir / "spectrum.dat", g.frequency);
            const auto o = app::retrieve(c, vis.trace, spec, &sim.beta);
            worst = o.result.final_state.error();
            iterations = o.result.final_state.iteration;
            ok = o.result.converged;
        }
        const double t = seconds_since(t0);
        const bool pass = ok && worst < 1e-10 && iterations <= 5000 && t < 60.0;
        v.pass = v.pass && pass;
        v.detail += fmt("%s%s E=%.2e k=%d %.2fs", v.detail.empty() ? "" : "; ", name.c_str(), worst, iterations, t);
    }
    return v;
}

// --- C2 ------------------------------------------------------------------------

Verdict fig4_gs_accuracy() {
    const auto c = scenario("fig4_gaussian_gs");
    const auto sim = app::simulate(c);
    const auto o = app::retrieve(c, sim.visibility, sim.spectrum, &sim.beta);
    const auto& r = *o.report;
    return {o.result.converged && r.beta2_error < 1e-4 && r.beta3_error < 1e-3,
            fmt("beta2 err %.3e (tol 1e-4), beta3 err %.3e (tol 1e-3), E=%.2e k=%d", r.beta2_error, r.beta3_error,
                o.result.final_state.error(), o.result.final_state.iteration)};
}

// --- C3 ------------------------------------------------------------------------

Verdict composite_superiority() {
    // Composite uses the switching schedule of fig6_composite; both runs share
    // its Taylor seed, budget and tolerance.
    const auto comp_cfg = scenario("fig6_composite", {{"retrieval.max_iterations", "300"}});
    auto gs_cfg = comp_cfg;
    gs_cfg.retrieval.algorithm = Algorithm::gs;
    const auto sim = app::simulate(comp_cfg);
    const auto comp = app::retrieve(comp_cfg, sim.visibility, sim.spectrum, &sim.beta);
    const auto gs = app::retrieve(gs_cfg, sim.visibility, sim.spectrum, &sim.beta);
    const double ec = comp.result.final_state.error(), eg = gs.result.final_state.error();
    const bool pass = ec <= eg && comp.report->beta2_error <= gs.report->beta2_error &&
                      comp.report->beta3_error <= gs.report->beta3_error;
    return {pass, fmt("composite E=%.2e b2 %.2e b3 %.2e (k=%d) vs G-S E=%.2e b2 %.2e b3 %.2e (k=%d)", ec,
                      comp.report->beta2_error, comp.report->beta3_error, comp.result.final_state.iteration, eg,
                      gs.report->beta2_error, gs.report->beta3_error, gs.result.final_state.iteration)};
}

// --- C4 ------------------------------------------------------------------------

Verdict gp2_accuracy() {
    const auto c = scenario("fig5_gp2");
    const auto sim = app::simulate(c);
    const auto o = app::retrieve(c, sim.visibility, sim.spectrum, &sim.beta);
    return {o.report->beta2_error < 1e-6,
            fmt("beta2 err %.3e (tol 1e-6), E=%.2e k=%d", o.report->beta2_error, o.result.final_state.error(),
                o.result.final_state.iteration)};
}

// --- C5 ------------------------------------------------------------------------

Verdict robustness() {
    const auto c = scenario("fig7_hg3_cosine", {{"retrieval.max_iterations", "3000"}});
    const auto sim = app::simulate(c);
    const auto o = app::retrieve(c, sim.visibility, sim.spectrum, &sim.beta);
    const double e0 = o.result.final_state.error_history.front();
    const double e = o.result.final_state.error();
    const int k = o.result.final_state.iteration;
    return {std::abs(e0 - 0.9) <= 0.15 && e < 1e-9 && k <= 3000,
            fmt("E0=%.4f (|E0-0.9| <= 0.15), final E=%.2e in %d iterations", e0, e, k)};
}

// --- C6 ------------------------------------------------------------------------

Verdict gs_monotonicity() {
    std::vector<RetrievalProblem> problems;
    std::vector<RetrievalConfig> configured;
    for (const auto& name : scenario_names()) {
        const auto c = scenario(name);
        if (c.sweep) {
            const auto in = sweep_inputs(c);
            for (std::size_t k = 0; k < in.slices.size(); ++k) {
                const auto v = jsp_visibility(in.alpha, in.slices[k], c.sweep->mean_photon_number, in.grids.delay);
                std::vector<double> m(v.size());
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(in.alpha[i]) * std::abs(in.slices[k][i]);
                problems.emplace_back(v, SpectralMagnitude(in.grids.frequency, m), -1.0, c.medium_center());
                configured.push_back(c.retrieval);
            }
        } else {
            const auto sim = app::simulate(c);
            problems.push_back(RetrievalProblem::for_spectrum(sim.visibility, sim.spectrum, c.medium.z_km));
            configured.push_back(c.retrieval);
        }
    }
    double worst = -1.0;
    int runs = 0;
    long steps = 0;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        std::vector<RetrievalConfig> starts{configured[p]};
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            RetrievalConfig r;
            r.initial_guess = InitialGuess::random_phase(seed);
            starts.push_back(r);
        }
        for (auto r : starts) {
            r.algorithm = Algorithm::gs;
            r.max_iterations = 200;
            r.error_tolerance = 1e-300;
            r.stall_window = 1000000;
            const auto res = run(problems[p], r);
            const auto& h = res.final_state.error_history;
            for (std::size_t k = 1; k < h.size(); ++k) worst = std::max(worst, h[k] - h[k - 1]);
            steps += static_cast<long>(h.size()) - 1;
            ++runs;
        }
    }
    return {worst <= 1e-14, fmt("%d runs over %zu problems, %ld steps, max E_{k+1}-E_k = %.3e", runs, problems.size(),
                                steps, worst)};
}

// --- C7 ------------------------------------------------------------------------

Verdict gradient_oracles() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_phase = 0.0, worst_coeff = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 16 + 2 * static_cast<std::size_t>(rng() % 57);
        const auto g = build_conjugate_grids(n, 0.02 + 0.05 * (u(rng) + 1.0), 1000.0 + 300.0 * u(rng));
        std::vector<double> m(n), phi(n);
        std::vector<Complex> gp(n);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = std::abs(u(rng)) * 2.0;
            phi[i] = 4.0 * u(rng);
            gp[i] = {u(rng), u(rng)};
        }
        // Phase gradient against Z.
        const auto grad = gp_phase_gradient(gp, m, phi);
        double scale = 0.0, err = 0.0;
        const double h = 1e-5;
        for (std::size_t i = 0; i < n; ++i) {
            auto up = phi, down = phi;
            up[i] += h;
            down[i] -= h;
            const double fd = (projection_distance(up, gp, m) - projection_distance(down, gp, m)) / (2 * h);
            scale = std::max(scale, std::abs(fd));
            err = std::max(err, std::abs(fd - grad[i]));
        }
        worst_phase = std::max(worst_phase, err / scale);

        // Coefficient gradient against Z / sum 4m.
        const std::size_t order = 2 + rng() % 4;
        std::vector<double> beta(order + 1);
        for (double& b : beta) b = 5.0 * u(rng);
        const double center = g.frequency.center() + 0.1 * u(rng) * g.frequency.span();
        const double z = (rng() % 2 ? 1.0 : -1.0) * (0.5 + 4.0 * std::abs(u(rng)));
        double denom = 0.0;
        for (double x : m) denom += 4.0 * x;
        auto objective = [&](const std::vector<double>& b) {
            return projection_distance(taylor_phase(g.frequency, b, center, z), gp, m) / denom;
        };
        const auto cg = gp_coeff_gradient(gp, m, beta, g.frequency, center, z, 0);
        scale = 0.0;
        err = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) {
            const double hj = 1e-6;
            auto up = beta, down = beta;
            up[j] += hj;
            down[j] -= hj;
            const double fd = (objective(up) - objective(down)) / (2 * hj);
            scale = std::max(scale, std::abs(fd));
            err = std::max(err, std::abs(fd - cg[j]));
        }
        worst_coeff = std::max(worst_coeff, err / scale);
    }
    return {worst_phase < 1e-6 && worst_coeff < 1e-6,
            fmt("1000 instances; worst relative error: phase %.2e, coefficients %.2e", worst_phase, worst_coeff)};
}

// --- C8 ------------------------------------------------------------------------

Verdict gauge_invariance() {
    Verdict v{true, ""};
    for (const auto& name : scenario_names()) {
        const auto c = scenario(name);
        if (c.sweep) continue;
        const auto sim = app::simulate(c);
        const auto shifted = sim.beta.plus_affine(1e3, 10.0, c.medium_center());
        const auto v2 = visibility(sim.spectrum, shifted, c.medium.z_km, sim.grids.delay);
        const auto a = app::retrieve(c, sim.visibility, sim.spectrum, &sim.beta);
        const auto b = app::retrieve(c, v2, sim.spectrum, &shifted);
        const double d2 = std::abs(a.estimate.beta2 - b.estimate.beta2);
        const double d3 = std::abs(a.estimate.beta3 - b.estimate.beta3);
        const bool pass = d2 < c.acceptance.beta2_tolerance && d3 < c.acceptance.beta3_tolerance;
        v.pass = v.pass && pass;
        v.detail += fmt("%s%s d2 %.1e/%.0e d3 %.1e/%.0e%s", v.detail.empty() ? "" : "; ", name.c_str(), d2,
                        c.acceptance.beta2_tolerance, d3, c.acceptance.beta3_tolerance, pass ? "" : " FAIL");
    }
    return v;
}

// --- C9 ------------------------------------------------------------------------

Verdict transform_correctness() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_round = 0.0, worst_parseval = 0.0;
    int traces = 0;
    for (std::size_t n : {8u, 16u, 64u, 250u, 1024u, 4096u}) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto g = build_conjugate_grids(n, 0.001 + 0.1 * std::abs(u(rng)), 1000.0 + 500.0 * u(rng));
            FourierTransform ft(g.frequency, g.delay);
            SpectralTrace a(g.frequency);
            double peak = 0.0, energy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = {u(rng), u(rng)};
                peak = std::max(peak, std::abs(a[i]));
                energy += std::norm(a[i]);
            }
            const auto big = ft.forward(a);
            const auto back = ft.inverse(big);
            double err = 0.0, big_energy = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - a[i]));
            for (std::size_t j = 0; j < n; ++j) big_energy += std::norm(big[j]);
            worst_round = std::max(worst_round, err / peak);
            const double lhs = energy * g.frequency.spacing();
            const double rhs = big_energy * g.delay.spacing() / units::two_pi;
            worst_parseval = std::max(worst_parseval, std::abs(lhs - rhs) / lhs);
            ++traces;
        }
    }
    return {worst_round < 1e-10 && worst_parseval < 1e-10,
            fmt("%d traces; round trip %.2e, Parseval %.2e", traces, worst_round, worst_parseval)};
}

// --- C10 -----------------------------------------------------------------------

Verdict jsp_slices() {
    const auto c = scenario("jsp_sweep");
    const auto o = app::sweep(c);
    double worst_rel = 0.0;
    bool all_converged = true;
    for (std::size_t k = 0; k < o.map.slices.size(); ++k) {
        const auto& s = o.map.slices[k];
        all_converged = all_converged && s.converged;
        worst_rel = std::max(worst_rel, std::abs(s.quadratic - o.presets[k]) / std::abs(o.presets[k]));
    }
    // Peak scaling, for a transform-limited pair and for each chirped slice.
    const auto in = sweep_inputs(c);
    double worst_peak = 0.0;
    for (double a2 : {0.0, 1.0, 2.0}) {
        const double expected = 2.0 / (a2 + 2.0);
        worst_peak = std::max(worst_peak,
                              std::abs(jsp_visibility(in.alpha, in.alpha, a2, in.grids.delay).peak() - expected));
        for (const auto& phi : in.slices) {
            const double p0 = jsp_visibility(in.alpha, phi, 0.0, in.grids.delay).peak();
            const double pa = jsp_visibility(in.alpha, phi, a2, in.grids.delay).peak();
            worst_peak = std::max(worst_peak, std::abs(pa / p0 - expected));
        }
    }
    return {all_converged && worst_rel < 1e-3 && worst_peak < 1e-12,
            fmt("%zu slices, worst quadratic rel err %.2e (tol 1e-3); peak scaling err %.1e (tol 1e-12)",
                o.map.slices.size(), worst_rel, worst_peak)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"C1 round-trip closure", round_trip_closure},
        {"C2 G-S accuracy on the Gaussian fiber", fig4_gs_accuracy},
        {"C3 composite vs G-S at 300 iterations", composite_superiority},
        {"C4 GP2 coefficient accuracy", gp2_accuracy},
        {"C5 Hermite-Gaussian / cosine robustness", robustness},
        {"C6 G-S monotonicity", gs_monotonicity},
        {"C7 gradient oracles", gradient_oracles},
        {"C8 gauge invariance", gauge_invariance},
        {"C9 transform correctness", transform_correctness},
        {"C10 JSP slice retrieval", jsp_slices},
    };
    int failures = 0;
    for (const auto& [label, check] : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", label, v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
