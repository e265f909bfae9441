#pragma once

// Discretized transform pair between a frequency grid and its conjugate
// delay grid:
//
//     G(tau_j)   =          sum_i g(omega_i) exp(-i omega_i tau_j) d_omega
//     g(omega_i) = (1/2pi)  sum_j G(tau_j)   exp(+i omega_i tau_j) d_tau
//
// With omega_i = w_c + m_i d_omega, tau_j = t_c + n_j d_tau, m_i = i - N/2,
// n_j = j - N/2 and d_omega d_tau = 2pi/N, the kernel splits as
//
//     exp(-i omega_i tau_j) = exp(-i w_c tau_j) exp(-i m_i d_omega t_c)
//                             (-1)^(i + j + N/2) exp(-2 pi i i j / N)
//
// so each direction is one unshifted FFT wrapped by diagonal phase factors.
// Because d_omega d_tau N = 2 pi, the pair is an exact inverse.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "hompr/grid.hpp"

namespace hompr {

namespace detail {

// FFTW's planner is not reentrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept {
        if (p != nullptr) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(p);
        }
    }
};

struct FftwBufferDeleter {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwBufferDeleter>;

} // namespace detail

/// Reusable transform between a frequency grid and its conjugate delay grid.
/// Owns its FFTW plans and scratch buffers, so one instance must not be used
/// from two threads at once; create one per thread instead.
class FourierTransform {
public:
    FourierTransform(const FrequencyGrid& freq, const DelayGrid& delay)
        : freq_(freq), delay_(delay), n_(freq.size()), pre_(n_), post_(n_) {
        detail::require(are_conjugate(freq, delay), "frequency and delay grids are not conjugate");

        const double half_sign = ((n_ / 2) % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double alt = (i % 2 == 0) ? 1.0 : -1.0;
            const double m = static_cast<double>(i) - static_cast<double>(n_ / 2);
            pre_[i] = alt * std::polar(1.0, -m * freq.spacing() * delay.origin());
            post_[i] = alt * half_sign * std::polar(1.0, -freq.center() * delay[i]);
        }

        in_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_)));
        out_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_)));
        const int n = static_cast<int>(n_);
        std::lock_guard lock(detail::fftw_planner_mutex());
        forward_plan_.reset(fftw_plan_dft_1d(n, in_.get(), out_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        backward_plan_.reset(fftw_plan_dft_1d(n, in_.get(), out_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    }

    FourierTransform(FourierTransform&&) noexcept = default;
    FourierTransform& operator=(FourierTransform&&) noexcept = default;

    const FrequencyGrid& frequency_grid() const noexcept { return freq_; }
    const DelayGrid& delay_grid() const noexcept { return delay_; }
    std::size_t size() const noexcept { return n_; }

    /// Frequency samples -> delay samples.
    void forward(std::span<const Complex> g, std::span<Complex> out) {
        check_lengths(g.size(), out.size());
        auto* in = reinterpret_cast<Complex*>(in_.get());
        for (std::size_t i = 0; i < n_; ++i) in[i] = g[i] * pre_[i];
        fftw_execute(forward_plan_.get());
        const auto* res = reinterpret_cast<const Complex*>(out_.get());
        const double w = freq_.spacing();
        for (std::size_t j = 0; j < n_; ++j) out[j] = w * post_[j] * res[j];
    }

    /// Delay samples -> frequency samples.
    void inverse(std::span<const Complex> big_g, std::span<Complex> out) {
        check_lengths(big_g.size(), out.size());
        auto* in = reinterpret_cast<Complex*>(in_.get());
        for (std::size_t j = 0; j < n_; ++j) in[j] = big_g[j] * std::conj(post_[j]);
        fftw_execute(backward_plan_.get());
        const auto* res = reinterpret_cast<const Complex*>(out_.get());
        const double w = delay_.spacing() / units::two_pi;
        for (std::size_t i = 0; i < n_; ++i) out[i] = w * std::conj(pre_[i]) * res[i];
    }

    DelayTrace forward(const SpectralTrace& g) {
        detail::require(g.grid() == freq_, "trace is not on this transform's frequency grid");
        DelayTrace out(delay_);
        forward(g.values(), out.values());
        return out;
    }

    SpectralTrace inverse(const DelayTrace& big_g) {
        detail::require(big_g.grid() == delay_, "trace is not on this transform's delay grid");
        SpectralTrace out(freq_);
        inverse(big_g.values(), out.values());
        return out;
    }

private:
    void check_lengths(std::size_t a, std::size_t b) const {
        detail::require(a == n_ && b == n_, "transform input/output length does not match the grid");
    }

    FrequencyGrid freq_;
    DelayGrid delay_;
    std::size_t n_;
    std::vector<Complex> pre_;
    std::vector<Complex> post_;
    detail::FftwBuffer in_;
    detail::FftwBuffer out_;
    detail::FftwPlan forward_plan_;
    detail::FftwPlan backward_plan_;
};

/// One-shot forward transform onto `delay` (the conjugate of g's grid).
inline DelayTrace forward_transform(const SpectralTrace& g, const DelayGrid& delay) {
    FourierTransform ft(g.grid(), delay);
    return ft.forward(g);
}

/// One-shot forward transform onto the conjugate grid centred on tau = 0.
inline DelayTrace forward_transform(const SpectralTrace& g) {
    const auto grids = build_conjugate_grids(g.grid().size(), g.grid().spacing(), g.grid().center());
    return forward_transform(g, grids.delay);
}

inline SpectralTrace inverse_transform(const DelayTrace& big_g, const FrequencyGrid& freq) {
    FourierTransform ft(freq, big_g.grid());
    return ft.inverse(big_g);
}

} // namespace hompr
