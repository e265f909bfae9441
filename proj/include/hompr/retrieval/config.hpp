#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hompr/error.hpp"

namespace hompr {

enum class Algorithm { gs, gp_phase, gp_coeff, composite };

/// One iteration kind; the composite scheduler switches between these.
enum class Stage { gs, gp_phase, gp_coeff };

inline std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::gs: return "gs";
    case Algorithm::gp_phase: return "gp-phase";
    case Algorithm::gp_coeff: return "gp-coeff";
    case Algorithm::composite: return "composite";
    }
    return "gs";
}

inline std::string_view to_string(Stage s) noexcept {
    switch (s) {
    case Stage::gs: return "gs";
    case Stage::gp_phase: return "gp-phase";
    case Stage::gp_coeff: return "gp-coeff";
    }
    return "gs";
}

/// Accepts both dash and underscore spellings ("gp-coeff", "gp_coeff").
inline Algorithm parse_algorithm(std::string_view name) {
    std::string n(name);
    for (char& c : n)
        if (c == '_') c = '-';
    if (n == "gs") return Algorithm::gs;
    if (n == "gp-phase") return Algorithm::gp_phase;
    if (n == "gp-coeff") return Algorithm::gp_coeff;
    if (n == "composite") return Algorithm::composite;
    throw InputError("unknown algorithm '" + std::string(name) + "' (expected gs, gp-phase, gp-coeff or composite)");
}

struct InitialGuess {
    enum class Kind { zero_phase, random_phase, taylor_seed };

    Kind kind = Kind::zero_phase;
    std::uint64_t seed = 0;
    /// beta_j seed in ps^j/km, index j; used by taylor_seed.
    std::vector<double> taylor;

    static InitialGuess zero_phase() { return {}; }
    static InitialGuess random_phase(std::uint64_t seed) { return {Kind::random_phase, seed, {}}; }
    static InitialGuess taylor_seed(std::vector<double> beta) { return {Kind::taylor_seed, 0, std::move(beta)}; }
};

inline std::string_view to_string(InitialGuess::Kind k) noexcept {
    switch (k) {
    case InitialGuess::Kind::zero_phase: return "zero_phase";
    case InitialGuess::Kind::random_phase: return "random_phase";
    case InitialGuess::Kind::taylor_seed: return "taylor_seed";
    }
    return "zero_phase";
}

inline InitialGuess::Kind parse_initial_guess_kind(std::string_view name) {
    if (name == "zero_phase") return InitialGuess::Kind::zero_phase;
    if (name == "random_phase") return InitialGuess::Kind::random_phase;
    if (name == "taylor_seed") return InitialGuess::Kind::taylor_seed;
    throw InputError("unknown initial guess '" + std::string(name) +
                     "' (expected zero_phase, random_phase or taylor_seed)");
}

/// Adaptive step for the one-dimensional descent of the GP projections:
/// the step grows by `growth` while the objective keeps falling and shrinks
/// by `shrink` after an overshoot. The accepted step seeds the next search.
struct LineSearchConfig {
    double initial_step = 1.0;
    double growth = 2.0;
    double shrink = 0.5;
    int max_probes = 20;
};

struct RetrievalConfig {
    Algorithm algorithm = Algorithm::gs;
    int max_iterations = 5000;
    /// Stop as converged once E_k <= error_tolerance.
    double error_tolerance = 1e-12;
    /// Relative decrease of E per iteration below which the composite
    /// scheduler leaves its current stage. Single-algorithm runs stop as
    /// stalled when the best E improves by less than this fraction over
    /// `stall_window` iterations.
    double stall_tolerance = 1e-3;
    int stall_window = 200;
    /// Iterations a composite stage runs before it may be left.
    int min_stage_iterations = 5;
    InitialGuess initial_guess;
    /// Highest Taylor order J optimized by gp_coeff (orders 2..J).
    int gp_coeff_order = 3;
    LineSearchConfig line_search;

    void validate() const {
        detail::require(max_iterations >= 1, "max_iterations must be at least 1");
        detail::require(std::isfinite(error_tolerance) && error_tolerance > 0.0, "error_tolerance must be positive");
        detail::require(std::isfinite(stall_tolerance) && stall_tolerance > 0.0, "stall_tolerance must be positive");
        detail::require(stall_window >= 1, "stall_window must be at least 1");
        detail::require(min_stage_iterations >= 1, "min_stage_iterations must be at least 1");
        detail::require(gp_coeff_order >= 2, "gp_coeff_order must be at least 2");
        detail::require(std::isfinite(line_search.initial_step) && line_search.initial_step > 0.0,
                        "line_search.initial_step must be positive");
        detail::require(line_search.growth > 1.0, "line_search.growth must exceed 1");
        detail::require(line_search.shrink > 0.0 && line_search.shrink < 1.0, "line_search.shrink must lie in (0, 1)");
        detail::require(line_search.max_probes >= 1, "line_search.max_probes must be at least 1");
        for (double b : initial_guess.taylor) detail::require(std::isfinite(b), "taylor_seed must be finite");
    }
};

} // namespace hompr
