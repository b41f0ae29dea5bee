#pragma once

// Best-case probability that at least K of n events occur given only their
// marginal probabilities, and an explicit coupling attaining it.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"

namespace persuade {

/// min{ min_{m<K} (sum of the n-m smallest marginals)/(K-m), 1 }.
inline double max_coverage_probability(std::span<const double> probabilities, std::size_t k) {
    const std::size_t n = probabilities.size();
    if (k == 0) throw InputError("K must be positive");
    if (k > n) throw InputError("K = " + std::to_string(k) + " exceeds number of events " + std::to_string(n));
    std::vector<double> p(probabilities.begin(), probabilities.end());
    for (double x : p)
        if (!(x >= 0.0 && x <= 1.0)) throw InputError("marginal outside [0,1]");
    std::sort(p.begin(), p.end(), std::greater<>());
    // tail[m] = sum of the n-m smallest, accumulated from the small end so
    // that all-zero tails stay exactly zero
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + p[i];
    double best = 1.0;
    for (std::size_t m = 0; m < k; ++m) best = std::min(best, tail[m] / static_cast<double>(k - m));
    return best;
}

/// Interval layout on [0,1) realizing the optimal coupling. Event i occurs
/// iff u falls in one of arcs[i]. On [0, win_mass) every point lies in at
/// least K arcs; the portion of an arc that does not fit there (only when
/// p_i > win_mass) is placed at [win_mass, win_mass + p_i - win_mass).
struct CouplingLayout {
    std::size_t k = 0;
    double win_mass = 0.0;
    std::vector<std::vector<std::pair<double, double>>> arcs;

    std::vector<std::size_t> covered(double u) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < arcs.size(); ++i)
            for (const auto& [lo, hi] : arcs[i])
                if (u >= lo && u < hi) {
                    out.push_back(i);
                    break;
                }
        return out;
    }

    /// Map v in [0,1) into the winning (or losing) region and return the
    /// covered set; used to sample conditionally on the >=K event.
    std::vector<std::size_t> covered_given(bool win, double v) const {
        const double u = win ? v * win_mass : win_mass + v * (1.0 - win_mass);
        return covered(u);
    }
};

inline CouplingLayout coupling_layout(std::span<const double> probabilities, std::size_t k) {
    CouplingLayout layout;
    layout.k = k;
    layout.win_mass = max_coverage_probability(probabilities, k);
    const double a = layout.win_mass;
    const std::size_t n = probabilities.size();
    layout.arcs.resize(n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return probabilities[x] > probabilities[y]; });

    double pos = 0.0;
    for (std::size_t i : order) {
        const double p = probabilities[i];
        auto& arc = layout.arcs[i];
        if (a <= 0.0) {
            if (p > 0.0) arc.emplace_back(0.0, p);
            continue;
        }
        const double inside = std::min(p, a);
        if (inside > 0.0) {
            // wrap-around placement on the sub-circle [0, a)
            if (pos + inside <= a) {
                arc.emplace_back(pos, pos + inside);
                pos += inside;
            } else {
                arc.emplace_back(pos, a);
                pos = pos + inside - a;
                arc.emplace_back(0.0, pos);
            }
            if (pos >= a) pos -= a;
        }
        if (p > a) arc.emplace_back(a, p);
    }
    return layout;
}

/// Indices realized by the uniform draw u in [0,1). Index i is included with
/// probability exactly probabilities[i]; Pr(|set| >= K) is maximal.
inline std::vector<std::size_t> couple_marginals(std::span<const double> probabilities, std::size_t k, double u) {
    return coupling_layout(probabilities, k).covered(u);
}

}  // namespace persuade
