#pragma once

// Iteration machinery shared by all algorithms.
//
// Every step starts from the cached correlation G_k = FT g_k, applies the
// delay-domain magnitude substitution G'_k = sqrt(V) G_k / |G_k|, brings it
// back as g'_k and then projects onto the spectral constraint |g| = m:
//
//   gs        g_{k+1} = m g'_k / |g'_k|                 (exact projection)
//   gp-phase  one line-searched descent of Z over the sample phases
//   gp-coeff  one line-searched descent of Z / sum 4m over beta_2..beta_J,
//             after refitting the unobservable offset and slope (beta_0,
//             beta_1) by weighted least squares on the residual phase
//
// The new guess is always rebuilt as m exp(i phi), so |g_{k+1}| = m exactly.
// Deterministic starts (zero phase, Taylor seed) get the slope beta_1 that
// puts their correlation on the centroid of V.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hompr/fourier.hpp"
#include "hompr/phase_constant.hpp"
#include "hompr/retrieval/config.hpp"
#include "hompr/retrieval/line_search.hpp"
#include "hompr/retrieval/objective.hpp"
#include "hompr/retrieval/problem.hpp"
#include "hompr/unwrap.hpp"

namespace hompr {

/// Moduli below this are treated as zero: the unit phase factor there is 1
/// in the delay domain and the previous phase in the frequency domain.
inline constexpr double zero_modulus = 1e-300;

struct RetrievalState {
    int iteration = 0;
    /// g_k
    SpectralTrace guess;
    /// phi_k, kept explicitly so zero-magnitude samples keep a phase.
    std::vector<double> phase;
    /// G_k = FT g_k
    DelayTrace correlation;
    /// E_0 .. E_k
    std::vector<double> error_history;
    /// beta_0..beta_J (ps^j/km) when the guess is a Taylor phase.
    std::optional<std::vector<double>> coefficients;
    /// Step carried between line searches.
    double step = 1.0;

    double error() const noexcept { return error_history.back(); }

    /// beta_k(omega) = -unwrap(arg g_k) / z, unwrapped from the spectral peak.
    PhaseConstant current_beta(const RetrievalProblem& problem) const {
        std::vector<double> wrapped(phase.size());
        for (std::size_t i = 0; i < phase.size(); ++i) wrapped[i] = wrap_phase(phase[i]);
        auto unwrapped = unwrap_from(wrapped, problem.reference_index());
        for (double& p : unwrapped) p /= -problem.z();
        return PhaseConstant(problem.frequency_grid(), std::move(unwrapped));
    }
};

enum class StepOutcome { accepted, line_search_failed };

class RetrievalEngine {
public:
    explicit RetrievalEngine(const RetrievalProblem& problem)
        : problem_(&problem), ft_(problem.frequency_grid(), problem.delay_grid()), g_prime_(problem.size()),
          scratch_(problem.size()) {}

    const RetrievalProblem& problem() const noexcept { return *problem_; }

    /// Builds g_0 from the configured initial guess and records E_0.
    RetrievalState initial_state(const RetrievalConfig& config) {
        const auto& p = *problem_;
        const std::size_t n = p.size();
        std::vector<double> phase(n, 0.0);
        std::optional<std::vector<double>> coeffs;
        const std::size_t order = static_cast<std::size_t>(config.gp_coeff_order);
        switch (config.initial_guess.kind) {
        case InitialGuess::Kind::zero_phase:
            coeffs = std::vector<double>(order + 1, 0.0);
            (*coeffs)[1] = centring_slope();
            phase = taylor_phase(p.frequency_grid(), *coeffs, p.expansion_center(), p.z());
            break;
        case InitialGuess::Kind::random_phase: {
            std::mt19937_64 rng(config.initial_guess.seed);
            std::uniform_real_distribution<double> dist(-units::pi, units::pi);
            for (double& ph : phase) ph = dist(rng);
            break;
        }
        case InitialGuess::Kind::taylor_seed: {
            std::vector<double> beta = config.initial_guess.taylor;
            if (beta.size() < order + 1) beta.resize(order + 1, 0.0);
            beta[1] += centring_slope();
            phase = taylor_phase(p.frequency_grid(), beta, p.expansion_center(), p.z());
            coeffs = std::move(beta);
            break;
        }
        }
        RetrievalState s = state_from_phase(std::move(phase));
        s.coefficients = std::move(coeffs);
        s.step = config.line_search.initial_step;
        return s;
    }

    /// beta_1 that moves the correlation of a deterministic start onto the
    /// centroid of V: a slope b in beta moves V to delay -b z.
    double centring_slope() const {
        const auto& p = *problem_;
        const auto& v = p.visibility();
        double moment = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) moment += v[j] * v.grid()[j];
        return -moment / p.visibility_sum() / p.z();
    }

    /// State whose guess is m exp(i phase), with E_0 recorded.
    RetrievalState state_from_phase(std::vector<double> phase) {
        const auto& p = *problem_;
        detail::require(phase.size() == p.size(), "phase length does not match the grid");
        RetrievalState s{0, SpectralTrace(p.frequency_grid()), std::move(phase), DelayTrace(p.delay_grid()), {}, {}, 1.0};
        rebuild_guess(s);
        s.error_history.push_back(refresh_correlation(s));
        return s;
    }

    /// g'_k for the current state (the delay-domain projection brought back).
    const std::vector<Complex>& fourier_projection(const RetrievalState& s) {
        const auto& p = *problem_;
        const auto& big_g = s.correlation.values();
        const auto& sv = p.sqrt_visibility();
        for (std::size_t j = 0; j < scratch_.size(); ++j) {
            const double a = std::abs(big_g[j]);
            scratch_[j] = (a > zero_modulus) ? sv[j] * (big_g[j] / a) : Complex(sv[j], 0.0);
        }
        ft_.inverse(scratch_, g_prime_);
        return g_prime_;
    }

    StepOutcome gs_step(RetrievalState& s) {
        const auto& gp = fourier_projection(s);
        for (std::size_t i = 0; i < s.phase.size(); ++i)
            if (std::abs(gp[i]) > zero_modulus) s.phase[i] = std::arg(gp[i]);
        s.coefficients.reset();
        finish_step(s);
        return StepOutcome::accepted;
    }

    StepOutcome gp_phase_step(RetrievalState& s, const LineSearchConfig& ls) {
        const auto& p = *problem_;
        const auto& gp = fourier_projection(s);
        const auto& m = p.magnitude();
        auto grad = gp_phase_gradient(gp, m, s.phase);
        for (double& g : grad) g = -g;
        const double z0 = projection_distance(s.phase, gp, m);
        auto objective = [&](std::span<const double> phi) { return projection_distance(phi, gp, m); };
        auto r = line_search(objective, s.phase, grad, z0, s.step, ls);
        s.step = r.step;
        if (!r.improved) return keep_step(s);
        s.phase = std::move(r.point);
        s.coefficients.reset();
        finish_step(s);
        return StepOutcome::accepted;
    }

    StepOutcome gp_coeff_step(RetrievalState& s, const LineSearchConfig& ls, int order) {
        const auto& p = *problem_;
        const auto& gp = fourier_projection(s);
        const auto& m = p.magnitude();
        const std::size_t j_max = static_cast<std::size_t>(order);
        if (!s.coefficients) s.coefficients = fit_taylor(s.phase, j_max);
        std::vector<double> beta = *s.coefficients;
        beta.resize(std::max(beta.size(), j_max + 1), 0.0);

        refit_gauge(beta, gp);

        double denom = 0.0;
        for (double v : m) denom += 4.0 * v;
        auto objective = [&](std::span<const double> b) {
            const auto phi = taylor_phase(p.frequency_grid(), b, p.expansion_center(), p.z());
            return projection_distance(phi, gp, m) / denom;
        };
        auto dir = gp_coeff_gradient(gp, m, beta, p.frequency_grid(), p.expansion_center(), p.z(), 2);
        for (double& d : dir) d = -d;
        const double z0 = objective(beta);
        auto r = line_search(objective, beta, dir, z0, s.step, ls);
        s.step = r.step;
        if (r.improved) beta = std::move(r.point);
        // The gauge refit alone may already have lowered Z.
        const bool moved = r.improved || objective(beta) < objective(*s.coefficients);
        if (!moved) return keep_step(s);
        s.phase = taylor_phase(p.frequency_grid(), beta, p.expansion_center(), p.z());
        s.coefficients = std::move(beta);
        finish_step(s);
        return r.improved ? StepOutcome::accepted : StepOutcome::line_search_failed;
    }

    StepOutcome step(RetrievalState& s, Stage stage, const RetrievalConfig& config) {
        switch (stage) {
        case Stage::gs: return gs_step(s);
        case Stage::gp_phase: return gp_phase_step(s, config.line_search);
        case Stage::gp_coeff: return gp_coeff_step(s, config.line_search, config.gp_coeff_order);
        }
        return gs_step(s);
    }

    /// Weighted least-squares Taylor fit (orders 0..order) of the unwrapped
    /// phase, weights m over the support.
    std::vector<double> fit_taylor(std::span<const double> phase, std::size_t order) const {
        const auto& p = *problem_;
        std::vector<double> wrapped(phase.size());
        for (std::size_t i = 0; i < phase.size(); ++i) wrapped[i] = wrap_phase(phase[i]);
        const auto unwrapped = unwrap_from(wrapped, p.reference_index());
        std::vector<double> x(phase.size());
        std::vector<double> w(phase.size());
        for (std::size_t i = 0; i < phase.size(); ++i) {
            x[i] = p.frequency_grid().offset(i, p.expansion_center());
            w[i] = p.support()[i] ? p.magnitude()[i] : 0.0;
        }
        auto c = weighted_polyfit(x, unwrapped, w, order);
        // phi = sum c_k x^k = -z sum beta_k x^k / k!
        double fact = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            c[k] *= -fact / p.z();
        }
        return c;
    }

private:
    /// Shifts beta_0, beta_1 by the weighted linear fit of the residual
    /// phase arg(g') - phi(beta), unwrapped from the spectral peak.
    void refit_gauge(std::vector<double>& beta, std::span<const Complex> gp) const {
        const auto& p = *problem_;
        const auto phi = taylor_phase(p.frequency_grid(), beta, p.expansion_center(), p.z());
        const std::size_t n = phi.size();
        std::vector<double> residual(n), x(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] = wrap_phase(std::arg(gp[i]) - phi[i]);
            x[i] = p.frequency_grid().offset(i, p.expansion_center());
            w[i] = p.support()[i] ? p.magnitude()[i] * std::abs(gp[i]) : 0.0;
        }
        const auto unwrapped = unwrap_from(residual, p.reference_index());
        const auto c = weighted_polyfit(x, unwrapped, w, 1);
        beta[0] -= c[0] / p.z();
        beta[1] -= c[1] / p.z();
    }

    void rebuild_guess(RetrievalState& s) const {
        const auto& m = problem_->magnitude();
        for (std::size_t i = 0; i < m.size(); ++i) s.guess[i] = std::polar(m[i], s.phase[i]);
    }

    double refresh_correlation(RetrievalState& s) {
        ft_.forward(s.guess.values(), s.correlation.values());
        return retrieval_error(s.correlation.values(), problem_->sqrt_visibility(), problem_->visibility_sum());
    }

    void finish_step(RetrievalState& s) {
        rebuild_guess(s);
        s.error_history.push_back(refresh_correlation(s));
        ++s.iteration;
    }

    StepOutcome keep_step(RetrievalState& s) {
        s.error_history.push_back(s.error_history.back());
        ++s.iteration;
        return StepOutcome::line_search_failed;
    }

    const RetrievalProblem* problem_;
    FourierTransform ft_;
    std::vector<Complex> g_prime_;
    std::vector<Complex> scratch_;
};

} // namespace hompr
