#pragma once

// Public signaling over q-uniform posteriors. A public scheme is a
// Bayes-plausible distribution over posteriors; restricting the support to
// the q-grid turns the search into an LP with one column per grid point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/lp.hpp"
#include "persuade/parallel.hpp"
#include "persuade/private_solver.hpp"

namespace persuade {

inline constexpr std::size_t kDefaultGridCap = 2'000'000;

/// binomial(q + n - 1, n - 1), saturating at SIZE_MAX.
inline std::size_t grid_size(std::uint32_t q, std::size_t n_states) {
    if (n_states == 0) return 0;
    long double acc = 1.0L;
    const std::size_t k = n_states - 1;
    for (std::size_t i = 1; i <= k; ++i) {
        acc = acc * static_cast<long double>(q + i) / static_cast<long double>(i);
        if (acc > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
            return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(std::llround(acc));
}

/// All q-uniform posteriors over n states as integer count vectors.
struct QGrid {
    std::uint32_t q = 0;
    std::size_t n_states = 0;
    std::vector<std::vector<std::uint32_t>> counts;

    std::size_t size() const { return counts.size(); }
    Posterior posterior(std::size_t i) const { return Posterior::from_counts(counts[i]); }
};

/// Compositions of q into n_states parts, in decreasing lexicographic order
/// (q,0,...,0) first.
inline QGrid enumerate_q_uniform(std::uint32_t q, std::size_t n_states, std::size_t cap = kDefaultGridCap) {
    if (q < 1) throw InputError("q must be >= 1");
    if (n_states < 1) throw InputError("need at least one state");
    const std::size_t size = grid_size(q, n_states);
    if (size > cap)
        throw CapExceeded("q-grid with q=" + std::to_string(q) + " over " + std::to_string(n_states) +
                          " states has " + std::to_string(size) + " points, above the cap " + std::to_string(cap));
    QGrid grid{q, n_states, {}};
    grid.counts.reserve(size);
    std::vector<std::uint32_t> cur(n_states, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::uint32_t left) -> void {
        if (pos + 1 == n_states) {
            cur[pos] = left;
            grid.counts.push_back(cur);
            return;
        }
        for (std::uint32_t c = left + 1; c-- > 0;) {
            cur[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    rec(rec, 0, q);
    return grid;
}

/// 32 ln(4 / (eta min{1, 1/beta})) / eps^2, rounded up. With beta = 1/delta
/// this is also the per-state decomposition bound used by the semi-public LP.
inline std::uint64_t theoretical_q(double eta, double beta, double epsilon) {
    if (!(eta > 0.0 && eta <= 1.0)) throw InputError("eta must lie in (0,1]");
    if (!(beta > 0.0)) throw InputError("beta must be positive");
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    const double scale = eta * std::min(1.0, 1.0 / beta);
    return static_cast<std::uint64_t>(std::ceil(32.0 * std::log(4.0 / scale) / (epsilon * epsilon) - 1e-9));
}

struct WeightedPosterior {
    std::vector<std::uint32_t> counts;
    double weight = 0.0;
};

struct Decomposition {
    std::uint32_t q = 0;
    std::vector<WeightedPosterior> parts;
    double truncated_mass = 0.0;
    double residual = 0.0;  // max_theta |sum gamma_p p_theta - p*_theta|
};

/// Law of the empirical distribution of q i.i.d. draws from p*: the
/// multinomial pmf over the q-grid. Support below `floor` is dropped and the
/// rest renormalized.
inline Decomposition decompose_posterior(const Posterior& target, std::uint32_t q, double floor = 1e-12,
                                         std::size_t cap = kDefaultGridCap) {
    const std::size_t n = target.size();
    const QGrid grid = enumerate_q_uniform(q, n, cap);
    Decomposition out;
    out.q = q;
    const long double log_qfact = std::lgamma(static_cast<long double>(q) + 1.0L);
    long double kept = 0.0L, total = 0.0L;
    std::vector<long double> weights;
    for (const auto& c : grid.counts) {
        long double lw = log_qfact;
        bool zero = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (c[s] == 0) continue;
            if (target[s] <= 0.0) {
                zero = true;
                break;
            }
            lw += static_cast<long double>(c[s]) * std::log(static_cast<long double>(target[s])) -
                  std::lgamma(static_cast<long double>(c[s]) + 1.0L);
        }
        const long double w = zero ? 0.0L : std::exp(lw);
        total += w;
        if (w >= floor) {
            out.parts.push_back({c, 0.0});
            weights.push_back(w);
            kept += w;
        }
    }
    out.truncated_mass = static_cast<double>(total - kept);
    std::vector<long double> bary(n, 0.0L);
    for (std::size_t i = 0; i < out.parts.size(); ++i) {
        const long double w = weights[i] / kept;
        out.parts[i].weight = static_cast<double>(w);
        for (std::size_t s = 0; s < n; ++s)
            bary[s] += w * static_cast<long double>(out.parts[i].counts[s]) / static_cast<long double>(q);
    }
    for (std::size_t s = 0; s < n; ++s)
        out.residual = std::max(out.residual, static_cast<double>(std::fabs(bary[s] - static_cast<long double>(target[s]))));
    return out;
}

struct SupportPoint {
    std::vector<std::uint32_t> counts;
    double weight = 0.0;
    VoteProfile profile;  // cached best response
    int value = 0;

    Posterior posterior() const { return Posterior::from_counts(counts); }
};

struct PublicScheme {
    std::uint32_t q = 0;
    RelaxationParams relax;
    std::vector<SupportPoint> support;
};

struct PublicSolveReport {
    double value = 0.0;
    PublicScheme scheme;
    std::size_t grid_size = 0;
    std::size_t grid_winning = 0;
    LpDiagnostics lp;
};

/// max_x sum_p x_p value_p  s.t.  sum_p x_p p_theta = mu_theta, x >= 0.
/// Returns the LP solution weights per grid point.
inline std::vector<double> solve_grid_lp(const QGrid& grid, const std::vector<double>& values,
                                         const std::vector<double>& prior, LpDiagnostics& diag) {
    lp::LpModel m;
    std::vector<int> var(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        var[i] = m.add_variable("g_" + std::to_string(i));
        if (values[i] != 0.0) m.set_objective_coef(var[i], values[i]);
    }
    const double q = grid.q;
    for (std::size_t s = 0; s < grid.n_states; ++s) {
        std::vector<lp::Term> row;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid.counts[i][s] != 0) row.push_back({var[i], grid.counts[i][s] / q});
        m.add_constraint(std::move(row), lp::Sense::eq, prior[s], "bayes_" + std::to_string(s));
    }
    const auto sol = lp::solve_lp(m);
    diag = diagnostics_of(m, sol);
    if (!sol.optimal()) throw NumericalFailure("public LP ended with status " + diag.status + " " + sol.message);
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = sol.x[static_cast<std::size_t>(var[i])];
    return w;
}

inline PublicSolveReport solve_public(const ElectionInstance& inst, std::uint32_t q, const RelaxationParams& relax,
                                      std::size_t cap = kDefaultGridCap) {
    relax.validate();
    const QGrid grid = enumerate_q_uniform(q, inst.num_states(), cap);
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = posterior_value(inst, grid.posterior(i), relax); });

    PublicSolveReport report;
    report.grid_size = grid.size();
    report.grid_winning = static_cast<std::size_t>(std::count(values.begin(), values.end(), 1.0));
    const auto weights = solve_grid_lp(grid, values, inst.prior(), report.lp);

    report.scheme.q = q;
    report.scheme.relax = relax;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (weights[i] <= 1e-12) continue;
        const Posterior p = grid.posterior(i);
        SupportPoint pt{grid.counts[i], weights[i], best_response(inst, p, relax.epsilon), 0};
        pt.value = eval_election(inst, pt.profile, relax);
        report.value += pt.weight * pt.value;
        report.scheme.support.push_back(std::move(pt));
    }
    report.value = std::clamp(report.value, 0.0, 1.0);
    return report;
}

/// max_theta |sum_p gamma_p p_theta - mu_theta|.
inline double bayes_residual(const std::vector<SupportPoint>& support, std::uint32_t q, const std::vector<double>& prior) {
    double worst = 0.0;
    for (std::size_t s = 0; s < prior.size(); ++s) {
        double acc = 0.0;
        for (const auto& pt : support) acc += pt.weight * pt.counts[s] / static_cast<double>(q);
        worst = std::max(worst, std::abs(acc - prior[s]));
    }
    return worst;
}

/// Per-state recommendation distribution phi(theta, c) / mu_theta.
struct DirectScheme {
    std::vector<std::vector<ProfileMass>> per_state;
};

inline DirectScheme recover_direct_scheme(const PublicScheme& scheme, const ElectionInstance& inst) {
    DirectScheme out;
    out.per_state.resize(inst.num_states());
    for (std::size_t s = 0; s < inst.num_states(); ++s) {
        const double mu = inst.prior()[s];
        std::map<std::string, std::size_t> slot;
        double mass = 0.0;
        for (const auto& pt : scheme.support) {
            const double joint = pt.weight * pt.counts[s] / static_cast<double>(scheme.q);
            if (joint == 0.0) continue;
            mass += joint;
            if (mu <= 0.0) continue;
            const auto key = profile_string(pt.profile);
            auto [it, fresh] = slot.emplace(key, out.per_state[s].size());
            if (fresh) out.per_state[s].push_back({pt.profile, 0.0});
            out.per_state[s][it->second].probability += joint / mu;
        }
        if (mu <= 0.0 && mass > 1e-9)
            throw InconsistencyError("state '" + inst.states()[s] + "' has zero prior but receives posterior mass " +
                                     format_real(mass));
    }
    return out;
}

}  // namespace persuade
