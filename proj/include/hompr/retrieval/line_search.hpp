#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hompr/retrieval/config.hpp"

namespace hompr {

struct LineSearchResult {
    bool improved = false;
    /// Accepted step, or the last probed step when nothing improved.
    double step = 0.0;
    double value = 0.0;
    std::vector<double> point;
    int probes = 0;
};

/// One-dimensional descent from `x` along `direction`, starting at `step`.
///
/// If the first probe lowers f the step keeps growing while f keeps
/// falling; otherwise it shrinks until f drops below f(x). At most
/// `cfg.max_probes` evaluations of f are made.
template <class Objective>
LineSearchResult line_search(Objective&& f, std::span<const double> x, std::span<const double> direction, double fx,
                             double step, const LineSearchConfig& cfg) {
    LineSearchResult r;
    r.value = fx;
    r.step = step;
    bool nonzero = false;
    for (double d : direction) nonzero = nonzero || d != 0.0;
    if (!nonzero) return r;

    std::vector<double> trial(x.size());
    auto probe = [&](double t) {
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * direction[i];
        ++r.probes;
        return f(std::span<const double>(trial));
    };

    double t = step;
    bool first = true;
    bool first_hit = false;
    while (r.probes < cfg.max_probes) {
        const double ft = probe(t);
        if (ft < r.value) {
            r.improved = true;
            r.value = ft;
            r.step = t;
            r.point = trial;
            first_hit = first;
            break;
        }
        first = false;
        t *= cfg.shrink;
    }
    if (!r.improved) {
        r.step = t;
        return r;
    }
    if (first_hit) {
        while (r.probes < cfg.max_probes) {
            const double t2 = r.step * cfg.growth;
            const double ft = probe(t2);
            if (!(ft < r.value)) break;
            r.value = ft;
            r.step = t2;
            r.point = trial;
        }
    }
    return r;
}

} // namespace hompr
