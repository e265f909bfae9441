#pragma once

// Finite-difference weights on arbitrary nodes (Fornberg's recursion).

#include <cstddef>
#include <span>
#include <vector>

namespace hompr {

/// Weights w_k such that sum_k w_k f(nodes[k]) approximates the
/// `derivative`-th derivative of f at `x0`. Exact for polynomials of degree
/// below nodes.size().
inline std::vector<double> finite_difference_weights(double x0, std::span<const double> nodes, int derivative) {
    const std::size_t n = nodes.size();
    const auto m = static_cast<std::size_t>(derivative);
    // c[j][k]: weight of node j for the k-th derivative.
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
    return w;
}

} // namespace hompr
