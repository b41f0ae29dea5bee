#pragma once

// Optimal private signaling. The LP works on per-voter marginals
// phi_r(theta, c0): an incentive row per voter, then two coverage blocks
// (voters -> district win probability a_{d,theta}, districts -> election win
// probability alpha_theta). Marginals are repaired so the c1 recommendation
// is persuasive too, and an explicit two-level coupling samples full
// recommendation profiles.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "persuade/coverage.hpp"
#include "persuade/coverage_lp.hpp"
#include "persuade/election.hpp"
#include "persuade/lp.hpp"
#include "persuade/random.hpp"

namespace persuade {

struct LpDiagnostics {
    std::string status;
    long iterations = 0;
    double max_violation = 0.0;
    double lp_objective = 0.0;
    std::size_t variables = 0;
    std::size_t constraints = 0;
};

inline LpDiagnostics diagnostics_of(const lp::LpModel& model, const lp::LpSolution& sol) {
    return {lp::to_string(sol.status), sol.iterations, sol.max_violation, sol.objective,
            model.num_variables(), model.num_constraints()};
}

/// phi[r][theta] = probability that voter r is recommended c0 in state theta.
struct PrivateMarginals {
    std::vector<std::vector<double>> phi;
};

struct PrivateSolveReport {
    double value = 0.0;
    PrivateMarginals marginals;                         // repaired
    std::vector<std::vector<double>> district_win_probs;  // [d][theta]
    std::vector<double> aggregate_win_probs;            // [theta]
    LpDiagnostics lp;
};

/// Variable handles of the private LP, for inspection and tests.
struct PrivateLp {
    lp::LpModel model;
    std::vector<std::vector<int>> phi;  // [r][theta]
    std::vector<std::vector<int>> a;    // [d][theta]
    std::vector<int> alpha;             // [theta]
};

inline PrivateLp build_private_lp(const ElectionInstance& inst) {
    using lp::Sense;
    PrivateLp out;
    auto& m = out.model;
    const std::size_t S = inst.num_states(), D = inst.num_districts(), R = inst.num_voters();

    out.phi.assign(R, std::vector<int>(S));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t s = 0; s < S; ++s)
            out.phi[r][s] = m.add_variable("phi_" + std::to_string(r) + "_" + std::to_string(s), 0.0, 1.0);
    out.a.assign(D, std::vector<int>(S));
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t s = 0; s < S; ++s)
            out.a[d][s] = m.add_variable("a_" + std::to_string(d) + "_" + std::to_string(s), 0.0, 1.0);
    out.alpha.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
        out.alpha[s] = m.add_variable("alpha_" + std::to_string(s), 0.0, 1.0);
        m.set_objective_coef(out.alpha[s], inst.prior()[s]);
    }

    // sum_theta mu_theta phi_r(theta) u_r(theta) >= 0
    for (std::size_t r = 0; r < R; ++r) {
        std::vector<lp::Term> terms;
        for (std::size_t s = 0; s < S; ++s) {
            const double c = inst.prior()[s] * inst.voter(r).net(s);
            if (c != 0.0) terms.push_back({out.phi[r][s], c});
        }
        m.add_constraint(std::move(terms), Sense::ge, 0.0, "ic_" + std::to_string(r));
    }

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t d = 0; d < D; ++d) {
            std::vector<int> inputs;
            for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r) inputs.push_back(out.phi[r][s]);
            add_coverage_block(m, inputs, out.a[d][s], majority(inst.district_size(d)),
                               "d" + std::to_string(d) + "_s" + std::to_string(s));
        }
        std::vector<int> districts;
        for (std::size_t d = 0; d < D; ++d) districts.push_back(out.a[d][s]);
        add_coverage_block(m, districts, out.alpha[s], majority(D), "agg_s" + std::to_string(s));
    }
    return out;
}

/// Raise phi_r(theta, c0) to 1 wherever voter r weakly prefers c0 in theta.
inline PrivateMarginals repair_marginals(const ElectionInstance& inst, const PrivateMarginals& marginals) {
    PrivateMarginals out = marginals;
    for (std::size_t r = 0; r < inst.num_voters(); ++r)
        for (std::size_t s = 0; s < inst.num_states(); ++s)
            if (inst.voter(r).net(s) >= 0.0) out.phi[r][s] = 1.0;
    return out;
}

/// District and election win probabilities implied by marginals under the
/// optimal coupling.
inline void fill_win_probabilities(const ElectionInstance& inst, const PrivateMarginals& marginals,
                                   PrivateSolveReport& report) {
    const std::size_t S = inst.num_states(), D = inst.num_districts();
    report.district_win_probs.assign(D, std::vector<double>(S, 0.0));
    report.aggregate_win_probs.assign(S, 0.0);
    report.value = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<double> a(D);
        for (std::size_t d = 0; d < D; ++d) {
            std::vector<double> p;
            for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r) p.push_back(marginals.phi[r][s]);
            a[d] = max_coverage_probability(p, majority(inst.district_size(d)));
            report.district_win_probs[d][s] = a[d];
        }
        report.aggregate_win_probs[s] = max_coverage_probability(a, majority(D));
        report.value += inst.prior()[s] * report.aggregate_win_probs[s];
    }
}

inline PrivateSolveReport solve_private(const ElectionInstance& inst) {
    PrivateLp built = build_private_lp(inst);
    const lp::LpSolution sol = lp::solve_lp(built.model);
    PrivateSolveReport report;
    report.lp = diagnostics_of(built.model, sol);
    if (!sol.optimal())
        throw NumericalFailure("private LP ended with status " + report.lp.status + " " + sol.message);

    PrivateMarginals raw;
    raw.phi.assign(inst.num_voters(), std::vector<double>(inst.num_states()));
    for (std::size_t r = 0; r < inst.num_voters(); ++r)
        for (std::size_t s = 0; s < inst.num_states(); ++s)
            raw.phi[r][s] = std::clamp(sol.x[static_cast<std::size_t>(built.phi[r][s])], 0.0, 1.0);
    report.marginals = repair_marginals(inst, raw);
    fill_win_probabilities(inst, report.marginals, report);
    return report;
}

/// Draw a full recommendation profile in state theta from the uniform u.
/// Level one couples district wins through the a_{d,theta} layout; level two
/// draws each district's recommendations from its voter layout conditioned
/// on the district's win flag, using a uniform keyed on (seed, theta, d, u).
inline VoteProfile sample_private_profile(const ElectionInstance& inst, const PrivateSolveReport& report,
                                          std::size_t theta, double u, std::uint64_t seed) {
    const std::size_t D = inst.num_districts();
    std::vector<double> a(D);
    for (std::size_t d = 0; d < D; ++d) a[d] = report.district_win_probs[d][theta];
    const auto winners = coupling_layout(a, majority(D)).covered(u);
    std::vector<char> wins(D, 0);
    for (auto d : winners) wins[d] = 1;

    VoteProfile profile(inst.num_voters(), Candidate::c1);
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<double> p;
        for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r)
            p.push_back(report.marginals.phi[r][theta]);
        const auto layout = coupling_layout(p, majority(inst.district_size(d)));
        CounterRng rng(seed, stream_key({theta, d, std::bit_cast<std::uint64_t>(u)}));
        for (auto i : layout.covered_given(wins[d] != 0, rng.uniform()))
            profile[inst.district_begin(d) + i] = Candidate::c0;
    }
    return profile;
}

inline constexpr std::size_t kPrivateOracleVoterCap = 14;

/// Exact optimum over full joint direct schemes phi(theta, c), c in {c0,c1}^R.
inline double exact_private_oracle(const ElectionInstance& inst, std::size_t voter_cap = kPrivateOracleVoterCap) {
    using lp::Sense;
    const std::size_t R = inst.num_voters(), S = inst.num_states();
    if (R > voter_cap)
        throw CapExceeded("exact private oracle enumerates 2^|R| profiles; |R| = " + std::to_string(R) +
                          " exceeds the cap " + std::to_string(voter_cap));
    const std::size_t P = std::size_t{1} << R;

    // bit r set <=> voter r is recommended c0
    std::vector<char> wins(P);
    VoteProfile profile(R);
    for (std::size_t c = 0; c < P; ++c) {
        for (std::size_t r = 0; r < R; ++r) profile[r] = (c >> r) & 1U ? Candidate::c0 : Candidate::c1;
        wins[c] = static_cast<char>(eval_election(inst, profile, {}));
    }

    lp::LpModel m;
    std::vector<int> var(S * P);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t c = 0; c < P; ++c) {
            var[s * P + c] = m.add_variable("x_" + std::to_string(s) + "_" + std::to_string(c));
            if (wins[c]) m.set_objective_coef(var[s * P + c], inst.prior()[s]);
        }
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<lp::Term> row;
        for (std::size_t c = 0; c < P; ++c) row.push_back({var[s * P + c], 1.0});
        m.add_constraint(std::move(row), Sense::eq, 1.0, "simplex_" + std::to_string(s));
    }
    for (std::size_t r = 0; r < R; ++r) {
        const Voter& v = inst.voter(r);
        std::vector<lp::Term> follow_c0, follow_c1;
        for (std::size_t s = 0; s < S; ++s) {
            const double gain0 = inst.prior()[s] * (v.utility_c0[s] - v.utility_c1[s]);
            const double gain1 = inst.prior()[s] * (v.utility_c1[s] - v.utility_c0[s]);
            for (std::size_t c = 0; c < P; ++c) {
                if ((c >> r) & 1U) {
                    if (gain0 != 0.0) follow_c0.push_back({var[s * P + c], gain0});
                } else if (gain1 != 0.0) {
                    follow_c1.push_back({var[s * P + c], gain1});
                }
            }
        }
        m.add_constraint(std::move(follow_c0), Sense::ge, 0.0, "ic0_" + std::to_string(r));
        m.add_constraint(std::move(follow_c1), Sense::ge, 0.0, "ic1_" + std::to_string(r));
    }
    const auto sol = lp::solve_lp(m);
    if (!sol.optimal()) throw NumericalFailure(std::string("private oracle LP: ") + lp::to_string(sol.status));
    return sol.objective;
}

}  // namespace persuade
