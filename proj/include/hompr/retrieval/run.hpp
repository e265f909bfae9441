#pragma once

// Drivers: single-algorithm runs, the composite scheduler and the
// two-field phase-difference retrieval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "hompr/forward_model.hpp"
#include "hompr/retrieval/config.hpp"
#include "hompr/retrieval/engine.hpp"
#include "hompr/retrieval/problem.hpp"

namespace hompr {

struct IterationRecord {
    int k = 0;
    double error = 0.0;
    Stage stage = Stage::gs;
};

/// Receives one record per iteration, starting with k = 0 (the initial guess).
using IterationSink = std::function<void(const IterationRecord&)>;

struct StageSpan {
    Stage stage = Stage::gs;
    int first_iteration = 1;
    int iterations = 0;
};

enum class StopReason { tolerance_met, max_iterations, stalled };

inline std::string_view to_string(StopReason r) noexcept {
    switch (r) {
    case StopReason::tolerance_met: return "tolerance_met";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::stalled: return "stalled";
    }
    return "stalled";
}

struct RetrievalResult {
    RetrievalState final_state;
    bool converged = false;
    StopReason reason = StopReason::max_iterations;
    /// |G_k|^2 of the final guess.
    VisibilityTrace recovered_visibility;
    std::vector<StageSpan> stages;
    /// beta_k(omega) of the final guess.
    PhaseConstant recovered_beta;
};

namespace detail {

inline Stage stage_of(Algorithm a) {
    switch (a) {
    case Algorithm::gp_phase: return Stage::gp_phase;
    case Algorithm::gp_coeff: return Stage::gp_coeff;
    default: return Stage::gs;
    }
}

/// Tracks the best error seen so far and flags a stall when it has improved
/// by less than `tolerance` (relative) over the last `window` iterations.
class StallMonitor {
public:
    StallMonitor(double first, double tolerance, int window)
        : best_{first}, tolerance_(tolerance), window_(static_cast<std::size_t>(window)) {}

    bool update(double error) {
        best_.push_back(std::min(best_.back(), error));
        if (best_.size() <= window_) return false;
        const double before = best_[best_.size() - 1 - window_];
        const double now = best_.back();
        return before - now <= tolerance_ * before;
    }

private:
    std::vector<double> best_;
    double tolerance_;
    std::size_t window_;
};

inline VisibilityTrace recovered_visibility(const RetrievalState& s) {
    std::vector<double> v(s.correlation.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::norm(s.correlation[j]);
    return VisibilityTrace(s.correlation.grid(), std::move(v));
}

inline RetrievalResult finish(const RetrievalProblem& problem, RetrievalState s, StopReason reason,
                              std::vector<StageSpan> stages) {
    auto v = recovered_visibility(s);
    auto beta = s.current_beta(problem);
    const bool ok = reason == StopReason::tolerance_met;
    return RetrievalResult{std::move(s), ok, reason, std::move(v), std::move(stages), std::move(beta)};
}

inline void emit(const IterationSink& sink, const RetrievalState& s, Stage stage) {
    if (sink) sink(IterationRecord{s.iteration, s.error(), stage});
}

} // namespace detail

/// Composite scheduler: gs and gp-coeff stages alternate. A stage is left
/// after `min_stage_iterations` once its per-iteration relative improvement
/// falls below `stall_tolerance`, or as soon as a line search fails. A
/// gp-coeff stage that ends above its entry error is undone (the undo is
/// one counted iteration that restores the entry guess).
inline RetrievalResult composite_run(const RetrievalProblem& problem, const RetrievalConfig& config,
                                     const IterationSink& sink = {}) {
    config.validate();
    RetrievalEngine engine(problem);
    RetrievalState s = engine.initial_state(config);
    std::vector<StageSpan> stages;
    Stage stage = Stage::gs;
    detail::emit(sink, s, stage);
    if (s.error() <= config.error_tolerance) return detail::finish(problem, std::move(s), StopReason::tolerance_met, {});

    detail::StallMonitor monitor(s.error(), config.stall_tolerance, config.stall_window);
    stages.push_back({stage, 1, 0});
    RetrievalState entry = s;

    auto switch_stage = [&] {
        stage = (stage == Stage::gs) ? Stage::gp_coeff : Stage::gs;
        stages.push_back({stage, s.iteration + 1, 0});
        entry = s;
        s.step = config.line_search.initial_step;
    };

    while (s.iteration < config.max_iterations) {
        const double before = s.error();
        const auto outcome = engine.step(s, stage, config);
        ++stages.back().iterations;
        detail::emit(sink, s, stage);
        if (s.error() <= config.error_tolerance)
            return detail::finish(problem, std::move(s), StopReason::tolerance_met, std::move(stages));
        const bool stalled = monitor.update(s.error());

        const double gain = before > 0.0 ? (before - s.error()) / before : 0.0;
        const bool slow = stages.back().iterations >= config.min_stage_iterations && gain < config.stall_tolerance;
        if (outcome == StepOutcome::line_search_failed || slow) {
            if (stage == Stage::gp_coeff && s.error() > entry.error() && s.iteration < config.max_iterations) {
                const int k = s.iteration;
                auto history = std::move(s.error_history);
                s = entry;
                s.iteration = k + 1;
                history.push_back(entry.error());
                s.error_history = std::move(history);
                ++stages.back().iterations;
                detail::emit(sink, s, stage);
                monitor.update(s.error());
            }
            if (s.iteration < config.max_iterations) switch_stage();
        }
        if (stalled) return detail::finish(problem, std::move(s), StopReason::stalled, std::move(stages));
    }
    if (stages.back().iterations == 0) stages.pop_back();
    return detail::finish(problem, std::move(s), StopReason::max_iterations, std::move(stages));
}

/// Runs the configured algorithm until the error tolerance, a stall or the
/// iteration budget. A failed line search in a GP run counts as a stall.
inline RetrievalResult run(const RetrievalProblem& problem, const RetrievalConfig& config,
                           const IterationSink& sink = {}) {
    config.validate();
    if (config.algorithm == Algorithm::composite) return composite_run(problem, config, sink);
    RetrievalEngine engine(problem);
    RetrievalState s = engine.initial_state(config);
    const Stage stage = detail::stage_of(config.algorithm);
    detail::emit(sink, s, stage);
    if (s.error() <= config.error_tolerance) return detail::finish(problem, std::move(s), StopReason::tolerance_met, {});

    std::vector<StageSpan> stages{{stage, 1, 0}};
    detail::StallMonitor monitor(s.error(), config.stall_tolerance, config.stall_window);
    while (s.iteration < config.max_iterations) {
        const auto outcome = engine.step(s, stage, config);
        ++stages.back().iterations;
        detail::emit(sink, s, stage);
        if (s.error() <= config.error_tolerance)
            return detail::finish(problem, std::move(s), StopReason::tolerance_met, std::move(stages));
        const bool stalled = monitor.update(s.error());
        if (outcome == StepOutcome::line_search_failed && stage != Stage::gp_coeff)
            return detail::finish(problem, std::move(s), StopReason::stalled, std::move(stages));
        if (stalled) return detail::finish(problem, std::move(s), StopReason::stalled, std::move(stages));
    }
    return detail::finish(problem, std::move(s), StopReason::max_iterations, std::move(stages));
}

inline RetrievalResult run(const VisibilityTrace& v, const Spectrum& spectrum, double z, const RetrievalConfig& config,
                           const IterationSink& sink = {}) {
    const auto problem = RetrievalProblem::for_spectrum(v, spectrum, z);
    return run(problem, config, sink);
}

struct PhaseDifferenceResult {
    FrequencyGrid grid;
    /// phi_2 - phi_1 (rad), unwrapped from the peak of |E1||E2|; defined up
    /// to a constant and a linear term.
    std::vector<double> phase;
    /// Expansion center used for Taylor seeds (magnitude-weighted centroid).
    double center = 0.0;
    RetrievalResult result;
};

/// Two-field retrieval: the iterated object is E1*(omega) E2(omega) with
/// modulus |E1||E2|. V is rescaled so both constraints carry the same
/// energy, which lets traces with an arbitrary overall scale (for instance
/// 2/(|A|^2+2)) be used directly. Taylor seeds are phase coefficients
/// (rad ps^j).
inline PhaseDifferenceResult phase_difference_retrieval(const VisibilityTrace& v, const SpectralMagnitude& mag1,
                                                        const SpectralMagnitude& mag2, const RetrievalConfig& config,
                                                        const IterationSink& sink = {}) {
    detail::require(mag1.grid == mag2.grid, "the two spectral magnitudes live on different grids");
    const auto& grid = mag1.grid;
    std::vector<double> m(grid.size());
    double energy = 0.0;
    double weight = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = mag1.values[i] * mag2.values[i];
        energy += m[i] * m[i] * grid.spacing();
        weight += m[i];
        moment += m[i] * grid[i];
    }
    detail::require(weight > 0.0, "the product of the spectral magnitudes is identically zero");
    double v_energy = v.sum() * v.grid().spacing() / units::two_pi;
    detail::require(v_energy > 0.0, "visibility trace is identically zero");
    std::vector<double> scaled(v.values().begin(), v.values().end());
    for (double& x : scaled) x *= energy / v_energy;

    const double center = moment / weight;
    // z = -1 makes the reported "beta" equal to the phase itself.
    RetrievalProblem problem(VisibilityTrace(v.grid(), std::move(scaled)), SpectralMagnitude(grid, std::move(m)), -1.0,
                             center);
    auto result = run(problem, config, sink);
    auto phase = result.recovered_beta.values();
    return PhaseDifferenceResult{grid, std::move(phase), center, std::move(result)};
}

} // namespace hompr
