#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hompr/fourier.hpp"
#include "hompr/grid.hpp"
#include "hompr/resample.hpp"
#include "hompr/stencil.hpp"
#include "hompr/unwrap.hpp"
#include "support.hpp"

namespace hompr {
namespace {

TEST(Grid, ConjugateSpacingProduct) {
    const auto g = build_conjugate_grids(1024, 0.01, 1230.0);
    EXPECT_NEAR(g.frequency.spacing() * g.delay.spacing() * 1024.0, units::two_pi, 1e-12);
    EXPECT_TRUE(are_conjugate(g.frequency, g.delay));
    EXPECT_EQ(g.delay[g.delay.origin_index()], 0.0);
    EXPECT_DOUBLE_EQ(g.frequency[512], 1230.0);
}

TEST(Grid, EightPointsGiveUnitDelaySpacing) {
    const auto g = build_conjugate_grids(8, units::two_pi / 8.0, 0.0);
    EXPECT_EQ(g.delay.spacing(), 1.0);
    EXPECT_EQ(g.delay[0], -4.0);
    EXPECT_EQ(g.delay[7], 3.0);
}

TEST(Grid, RejectsBadSizes) {
    EXPECT_THROW(build_conjugate_grids(1023, 0.01, 0.0), InputError);
    EXPECT_THROW(build_conjugate_grids(6, 0.01, 0.0), InputError);
    EXPECT_THROW(build_conjugate_grids(64, 0.0, 0.0), InputError);
    EXPECT_THROW(build_conjugate_grids(64, -1.0, 0.0), InputError);
}

TEST(Grid, NearestIndexClamps) {
    const FrequencyGrid f(10.0, 0.5, 16);
    EXPECT_EQ(f.nearest_index(10.0), 8u);
    EXPECT_EQ(f.nearest_index(10.26), 9u);
    EXPECT_EQ(f.nearest_index(-100.0), 0u);
    EXPECT_EQ(f.nearest_index(100.0), 15u);
}

TEST(Transform, ConstantBecomesDelta) {
    const auto g = build_conjugate_grids(64, 0.05, 1200.0);
    SpectralTrace ones(g.frequency, std::vector<Complex>(64, 1.0));
    const auto big = forward_transform(ones, g.delay);
    for (std::size_t j = 0; j < 64; ++j) {
        const double expected = j == 32 ? 64 * 0.05 : 0.0;
        EXPECT_NEAR(std::abs(big[j]), expected, 1e-12) << j;
    }
    EXPECT_NEAR(big[32].real(), 64 * 0.05, 1e-12);
}

TEST(Transform, DeltaBecomesConstant) {
    const auto g = build_conjugate_grids(64, 0.05, 1200.0);
    DelayTrace delta(g.delay);
    delta[32] = 1.0;
    const auto small = inverse_transform(delta, g.frequency);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(std::abs(small[i]), g.delay.spacing() / units::two_pi, 1e-14);
}

TEST(Transform, GaussianMatchesClosedForm) {
    // g = exp(-(w - wc)^2 / 2 s^2)  ->  G = s sqrt(2 pi) exp(-s^2 tau^2 / 2) exp(-i wc tau)
    const std::size_t n = 512;
    const double dw = 0.02;
    const double wc = 1500.0;
    const double s = 12 * dw;
    const auto g = build_conjugate_grids(n, dw, wc);
    SpectralTrace tr(g.frequency);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (g.frequency[i] - wc) / s;
        tr[i] = std::exp(-0.5 * x * x);
    }
    const auto big = forward_transform(tr, g.delay);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = g.delay[j];
        const Complex expected = s * std::sqrt(units::two_pi) * std::exp(-0.5 * s * s * tau * tau) *
                                 std::polar(1.0, -wc * tau);
        EXPECT_LT(std::abs(big[j] - expected), 1e-10) << j;
    }
}

TEST(Transform, ShiftTheorem) {
    const auto g = test::small_grids(128);
    std::mt19937_64 rng(7);
    const auto re = test::random_values(rng, 128, -1, 1);
    const auto im = test::random_values(rng, 128, -1, 1);
    SpectralTrace a(g.frequency), b(g.frequency);
    const int k = 5;
    const double t0 = k * g.delay.spacing();
    for (std::size_t i = 0; i < 128; ++i) {
        a[i] = {re[i], im[i]};
        b[i] = a[i] * std::polar(1.0, -g.frequency[i] * t0);
    }
    const auto ga = forward_transform(a, g.delay);
    const auto gb = forward_transform(b, g.delay);
    for (std::size_t j = 0; j + k < 128; ++j) EXPECT_LT(std::abs(gb[j] - ga[j + k]), 1e-10) << j;
}

TEST(Transform, RoundTripAndParseval) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {8u, 64u, 1024u, 4096u}) {
        const auto g = build_conjugate_grids(n, 0.003, 1225.0);
        const auto re = test::random_values(rng, n, -1, 1);
        const auto im = test::random_values(rng, n, -1, 1);
        SpectralTrace a(g.frequency);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = {re[i], im[i]};
            norm += std::norm(a[i]);
        }
        FourierTransform ft(g.frequency, g.delay);
        const auto big = ft.forward(a);
        const auto back = ft.inverse(big);
        double err = 0.0;
        double big_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - a[i]));
        for (std::size_t j = 0; j < n; ++j) big_norm += std::norm(big[j]);
        EXPECT_LT(err, 1e-12) << n;
        const double lhs = norm * g.frequency.spacing();
        const double rhs = big_norm * g.delay.spacing() / units::two_pi;
        EXPECT_LT(std::abs(lhs - rhs) / lhs, 1e-12) << n;
    }
}

TEST(Transform, RejectsMismatchedGrids) {
    const auto g = test::small_grids(64);
    const auto h = test::small_grids(128);
    EXPECT_THROW(FourierTransform(g.frequency, h.delay), InputError);
    EXPECT_THROW(FourierTransform(g.frequency, DelayGrid(1.0, 64)), InputError);
}

TEST(Resample, GaussianOntoFinerGrid) {
    const double sigma = 5.0;
    std::vector<double> tau, v;
    for (double t = -60.0; t <= 60.0 + 1e-9; t += 0.25) {
        tau.push_back(t);
        v.push_back(std::exp(-0.5 * t * t / (sigma * sigma)));
    }
    const DelayGrid target(1.0 / 3.0, 300);
    const auto r = resample_trace(tau, v, target);
    EXPECT_EQ(r.zero_filled, 0u);
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double t = target[j];
        EXPECT_NEAR(r.values[j], std::exp(-0.5 * t * t / (sigma * sigma)), 1e-6) << t;
    }
}

TEST(Resample, IdentityOnSameGrid) {
    const DelayGrid grid(0.5, 32);
    const auto tau = grid.samples();
    std::vector<double> v(32);
    for (std::size_t j = 0; j < 32; ++j) v[j] = 1.0 + std::sin(0.3 * tau[j]);
    const auto r = resample_trace(tau, v, grid);
    EXPECT_LT(test::max_abs_diff(r.values, v), 1e-15);
}

TEST(Resample, ZeroFillsOutsideSpan) {
    std::vector<double> tau{-2, -1, 0, 1, 2};
    std::vector<double> v{0.1, 0.5, 1.0, 0.5, 0.1};
    const DelayGrid target(1.0, 16);
    const auto r = resample_trace(tau, v, target);
    EXPECT_EQ(r.zero_filled, 11u);
    EXPECT_EQ(r.values[0], 0.0);
    EXPECT_NEAR(r.values[8], 1.0, 1e-15);
}

TEST(Resample, RejectsBadInput) {
    const DelayGrid target(1.0, 16);
    EXPECT_THROW(resample_trace(std::vector<double>{0, 1, 2}, std::vector<double>{1, 1, 1}, target), InputError);
    EXPECT_THROW(resample_trace(std::vector<double>{0, 1, 1, 2}, std::vector<double>{1, 1, 1, 1}, target), InputError);
    EXPECT_THROW(resample_trace(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, NAN, 1, 1}, target),
                 InputError);
}

TEST(Resample, MonotoneBetweenMonotoneSamples) {
    std::vector<double> tau{0, 1, 2, 3, 4, 5};
    std::vector<double> v{0, 0, 0, 1, 1, 1};
    MonotoneCubic m(tau, v);
    double prev = -1.0;
    for (double t = 0; t <= 5.0; t += 0.01) {
        const double y = m(t);
        EXPECT_GE(y, prev - 1e-15);
        EXPECT_GE(y, 0.0);
        EXPECT_LE(y, 1.0);
        prev = y;
    }
}

TEST(Unwrap, RecoversSmoothPhase) {
    std::vector<double> truth(200), wrapped(200);
    for (std::size_t i = 0; i < 200; ++i) {
        const double x = (static_cast<double>(i) - 80.0) * 0.05;
        truth[i] = 3.0 * x * x - 2.0 * x;
        wrapped[i] = wrap_phase(truth[i]);
    }
    const auto u = unwrap_from(wrapped, 80);
    EXPECT_LT(test::max_abs_diff(u, truth), 1e-12);
}

TEST(Stencil, ExactOnPolynomials) {
    const std::vector<double> nodes{0, 1, 2, 3, 4};
    const auto w = finite_difference_weights(2.0, nodes, 2);
    // d2/dx2 of x^3 at x = 2 is 12.
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) acc += w[k] * nodes[k] * nodes[k] * nodes[k];
    EXPECT_NEAR(acc, 12.0, 1e-12);
    const std::vector<double> expected{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(w[k], expected[k], 1e-14);
}

} // namespace
} // namespace hompr
