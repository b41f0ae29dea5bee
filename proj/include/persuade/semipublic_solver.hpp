#pragma once

// Semi-public signaling: one public channel per district. Each district gets
// its own Bayes-plausible distribution over q-uniform posteriors; district
// win probabilities are aggregated across districts through the same
// coverage block as the private LP (unrelaxed K_D).
//
// Joint scheme: in state theta a single uniform u decides which districts
// win via the optimal coupling of the a_{d,theta}. Each district then draws
// a posterior conditioned on its win flag with a uniform keyed on
// (seed, theta, d, bits of u).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "persuade/coverage.hpp"
#include "persuade/coverage_lp.hpp"
#include "persuade/election.hpp"
#include "persuade/lp.hpp"
#include "persuade/parallel.hpp"
#include "persuade/public_solver.hpp"
#include "persuade/random.hpp"

namespace persuade {

struct DistrictPoint {
    std::vector<std::uint32_t> counts;
    double weight = 0.0;
    bool wins = false;  // W^d_delta of the district's eps-best response

    Posterior posterior() const { return Posterior::from_counts(counts); }
};

struct DistrictScheme {
    std::vector<DistrictPoint> support;
};

struct SemiPublicScheme {
    std::uint32_t q = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<DistrictScheme> districts;
    std::vector<std::vector<double>> district_win_probs;  // [d][theta]
    std::vector<double> aggregate_win_probs;              // [theta]
};

struct SemiPublicSolveReport {
    double value = 0.0;
    SemiPublicScheme scheme;
    std::size_t grid_size = 0;
    LpDiagnostics lp;
};

/// Conditional probability of district d's support points under state theta.
inline std::vector<double> district_state_weights(const DistrictScheme& ds, std::uint32_t q, std::size_t theta,
                                                  double mu) {
    std::vector<double> pi(ds.support.size(), 0.0);
    if (mu <= 0.0) return pi;
    for (std::size_t i = 0; i < ds.support.size(); ++i)
        pi[i] = ds.support[i].weight * ds.support[i].counts[theta] / static_cast<double>(q) / mu;
    return pi;
}

inline void fill_semipublic_win_probabilities(const ElectionInstance& inst, SemiPublicSolveReport& report) {
    auto& sc = report.scheme;
    const std::size_t S = inst.num_states(), D = inst.num_districts();
    sc.district_win_probs.assign(D, std::vector<double>(S, 0.0));
    sc.aggregate_win_probs.assign(S, 0.0);
    report.value = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        const double mu = inst.prior()[s];
        if (mu <= 0.0) continue;
        std::vector<double> a(D, 0.0);
        for (std::size_t d = 0; d < D; ++d) {
            const auto pi = district_state_weights(sc.districts[d], sc.q, s, mu);
            for (std::size_t i = 0; i < pi.size(); ++i)
                if (sc.districts[d].support[i].wins) a[d] += pi[i];
            a[d] = std::clamp(a[d], 0.0, 1.0);
            sc.district_win_probs[d][s] = a[d];
        }
        sc.aggregate_win_probs[s] = max_coverage_probability(a, majority(D));
        report.value += mu * sc.aggregate_win_probs[s];
    }
}

inline SemiPublicSolveReport solve_semipublic(const ElectionInstance& inst, std::uint32_t q, double epsilon,
                                              double delta, std::size_t cap = kDefaultGridCap) {
    using lp::Sense;
    RelaxationParams{delta, 0.0, epsilon}.validate();
    const QGrid grid = enumerate_q_uniform(q, inst.num_states(), cap);
    const std::size_t S = inst.num_states(), D = inst.num_districts(), G = grid.size();
    if (G > cap / std::max<std::size_t>(D, 1))
        throw CapExceeded("semi-public LP needs " + std::to_string(G) + " x " + std::to_string(D) +
                          " posterior columns, above the cap " + std::to_string(cap));

    // wins[d][i]: district d elects c0 under the eps-best response to grid point i
    std::vector<std::vector<char>> wins(D, std::vector<char>(G, 0));
    parallel_for(G, [&](std::size_t i) {
        const Posterior p = grid.posterior(i);
        for (std::size_t d = 0; d < D; ++d) wins[d][i] = district_wins(inst, d, p, epsilon, delta) ? 1 : 0;
    });

    lp::LpModel m;
    std::vector<int> alpha(S);
    std::vector<std::vector<int>> a(D, std::vector<int>(S));
    std::vector<std::vector<int>> gamma(D, std::vector<int>(G));
    for (std::size_t s = 0; s < S; ++s) {
        alpha[s] = m.add_variable("alpha_" + std::to_string(s), 0.0, 1.0);
        m.set_objective_coef(alpha[s], inst.prior()[s]);
    }
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t s = 0; s < S; ++s)
            a[d][s] = m.add_variable("a_" + std::to_string(d) + "_" + std::to_string(s), 0.0, 1.0);
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t i = 0; i < G; ++i)
            gamma[d][i] = m.add_variable("g_" + std::to_string(d) + "_" + std::to_string(i));

    for (std::size_t s = 0; s < S; ++s) {
        std::vector<int> inputs;
        for (std::size_t d = 0; d < D; ++d) inputs.push_back(a[d][s]);
        add_coverage_block(m, inputs, alpha[s], majority(D), "agg_s" + std::to_string(s));
    }
    const double qd = q;
    for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t s = 0; s < S; ++s) {
            const double mu = inst.prior()[s];
            // mu a_{d,theta} <= sum_p gamma_p p_theta [district wins at p]
            if (mu > 0.0) {
                std::vector<lp::Term> row{{a[d][s], mu}};
                for (std::size_t i = 0; i < G; ++i)
                    if (wins[d][i] && grid.counts[i][s] != 0) row.push_back({gamma[d][i], -static_cast<double>(grid.counts[i][s]) / qd});
                m.add_constraint(std::move(row), Sense::le, 0.0, "win_d" + std::to_string(d) + "_s" + std::to_string(s));
            }
            std::vector<lp::Term> bayes;
            for (std::size_t i = 0; i < G; ++i)
                if (grid.counts[i][s] != 0) bayes.push_back({gamma[d][i], grid.counts[i][s] / qd});
            m.add_constraint(std::move(bayes), Sense::eq, mu, "bayes_d" + std::to_string(d) + "_s" + std::to_string(s));
        }
    }

    const auto sol = lp::solve_lp(m);
    SemiPublicSolveReport report;
    report.lp = diagnostics_of(m, sol);
    report.grid_size = G;
    if (!sol.optimal()) throw NumericalFailure("semi-public LP ended with status " + report.lp.status + " " + sol.message);

    auto& sc = report.scheme;
    sc.q = q;
    sc.epsilon = epsilon;
    sc.delta = delta;
    sc.districts.resize(D);
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t i = 0; i < G; ++i) {
            const double w = sol.x[static_cast<std::size_t>(gamma[d][i])];
            if (w > 1e-12) sc.districts[d].support.push_back({grid.counts[i], w, wins[d][i] != 0});
        }
    // District win probabilities sit at their upper bound, so the coupled
    // win flag of a district coincides with its realized outcome.
    fill_semipublic_win_probabilities(inst, report);
    return report;
}

struct DistrictDraw {
    std::size_t support_index = 0;
    bool wins = false;
};

/// Pick index by inverse CDF over nonnegative weights with total `total`.
inline std::size_t pick_weighted(const std::vector<double>& w, double target) {
    std::size_t last = w.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        last = i;
        acc += w[i];
        if (target < acc) return i;
    }
    return last;
}

inline std::vector<DistrictDraw> couple_district_schemes(const SemiPublicScheme& scheme, const ElectionInstance& inst,
                                                         std::size_t theta, double u, std::uint64_t seed) {
    const double mu = inst.prior().at(theta);
    if (!(mu > 0.0)) throw InputError("state '" + inst.states()[theta] + "' has zero prior");
    const std::size_t D = inst.num_districts();
    std::vector<double> a(D);
    for (std::size_t d = 0; d < D; ++d) a[d] = scheme.district_win_probs[d][theta];
    std::vector<char> flag(D, 0);
    for (auto d : coupling_layout(a, majority(D)).covered(u)) flag[d] = 1;

    std::vector<DistrictDraw> out(D);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& ds = scheme.districts[d];
        const auto pi = district_state_weights(ds, scheme.q, theta, mu);
        double win_mass = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i)
            if (ds.support[i].wins) win_mass += pi[i];
        if (a[d] > win_mass + 1e-7)
            throw InconsistencyError("district " + std::to_string(d) + " win probability " + format_real(a[d]) +
                                     " exceeds its winning-posterior mass " + format_real(win_mass));
        CounterRng rng(seed, stream_key({theta, d, std::bit_cast<std::uint64_t>(u)}));
        const double v = rng.uniform();
        std::vector<double> w(pi.size(), 0.0);
        double total = 0.0;
        if (flag[d]) {
            for (std::size_t i = 0; i < pi.size(); ++i)
                if (ds.support[i].wins) total += (w[i] = pi[i]);
        } else {
            const double keep = win_mass > 0.0 ? std::max(0.0, 1.0 - a[d] / win_mass) : 0.0;
            for (std::size_t i = 0; i < pi.size(); ++i) total += (w[i] = ds.support[i].wins ? pi[i] * keep : pi[i]);
            if (total <= 0.0) {  // lose flag has probability zero here
                w = pi;
                total = 1.0;
            }
        }
        const std::size_t idx = pick_weighted(w, v * total);
        out[d] = {idx, ds.support.at(idx).wins};
    }
    return out;
}

/// Recommendation profile induced by one coupled draw: every voter plays
/// the eps-best response to the posterior drawn for its district.
inline VoteProfile profile_from_draws(const SemiPublicScheme& scheme, const ElectionInstance& inst,
                                      const std::vector<DistrictDraw>& draws) {
    VoteProfile profile(inst.num_voters(), Candidate::c1);
    for (std::size_t d = 0; d < inst.num_districts(); ++d) {
        const Posterior p = scheme.districts[d].support[draws[d].support_index].posterior();
        for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r)
            if (votes_c0(inst, r, p, scheme.epsilon)) profile[r] = Candidate::c0;
    }
    return profile;
}

}  // namespace persuade
