#pragma once

// Independent re-checks of returned schemes. Every check recomputes what it
// needs from raw candidate utilities and count vectors instead of reusing
// the solvers' cached quantities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/private_solver.hpp"
#include "persuade/public_solver.hpp"
#include "persuade/semipublic_solver.hpp"

namespace persuade {

struct AuditResult {
    bool passed = true;
    double worst_slack = 0.0;  // most negative margin seen (0 if none negative)
    std::size_t checks = 0;
    std::vector<std::string> failures;

    void record(double margin, double tol, const std::string& what) {
        ++checks;
        worst_slack = std::min(worst_slack, margin);
        if (margin < -tol) {
            passed = false;
            if (failures.size() < 20) failures.push_back(what + " (margin " + format_real(margin) + ")");
        }
    }
    void merge(const AuditResult& other) {
        passed = passed && other.passed;
        worst_slack = std::min(worst_slack, other.worst_slack);
        checks += other.checks;
        for (const auto& f : other.failures)
            if (failures.size() < 20) failures.push_back(f);
    }
};

/// Both recommendation constraints of every voter, prior-weighted:
/// following c0 and following c1 must each be weakly better than deviating.
inline AuditResult audit_private_marginals(const ElectionInstance& inst, const PrivateMarginals& m, double tol = 1e-9) {
    AuditResult out;
    for (std::size_t r = 0; r < inst.num_voters(); ++r) {
        const Voter& v = inst.voter(r);
        double follow_c0 = 0.0, follow_c1 = 0.0;
        for (std::size_t s = 0; s < inst.num_states(); ++s) {
            const double phi = m.phi.at(r).at(s);
            out.record(std::min(phi, 1.0 - phi), tol, "marginal of " + v.id + " outside [0,1]");
            follow_c0 += inst.prior()[s] * phi * (v.utility_c0[s] - v.utility_c1[s]);
            follow_c1 += inst.prior()[s] * (1.0 - phi) * (v.utility_c1[s] - v.utility_c0[s]);
        }
        out.record(follow_c0, tol, "voter " + v.id + " would ignore a c0 recommendation");
        out.record(follow_c1, tol, "voter " + v.id + " would ignore a c1 recommendation");
    }
    return out;
}

namespace detail {

/// Per-voter eps-persuasiveness of one recommended profile at a posterior
/// given by counts / q.
inline void audit_profile(const ElectionInstance& inst, const std::vector<std::uint32_t>& counts, std::uint32_t q,
                          const VoteProfile& profile, double epsilon, double tol, std::size_t first, std::size_t last,
                          const std::string& where, AuditResult& out) {
    for (std::size_t r = first; r < last; ++r) {
        const Voter& v = inst.voter(r);
        double gain = 0.0;  // expected u(c0) - u(c1)
        for (std::size_t s = 0; s < counts.size(); ++s)
            gain += (static_cast<double>(counts[s]) / q) * (v.utility_c0[s] - v.utility_c1[s]);
        const double margin = profile[r] == Candidate::c0 ? gain + epsilon : -gain + epsilon;
        out.record(margin, tol, where + ": voter " + v.id + " not eps-persuaded");
    }
}

inline void audit_bayes(const std::vector<std::vector<std::uint32_t>>& counts, const std::vector<double>& weights,
                        std::uint32_t q, const std::vector<double>& prior, double tol, const std::string& where,
                        AuditResult& out) {
    double total = 0.0;
    for (double w : weights) {
        out.record(w, tol, where + ": negative weight");
        total += w;
    }
    out.record(-std::abs(total - 1.0), 1e-9, where + ": weights do not sum to 1");
    for (std::size_t s = 0; s < prior.size(); ++s) {
        double bary = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) bary += weights[i] * counts[i][s] / static_cast<double>(q);
        out.record(-std::abs(bary - prior[s]), tol, where + ": Bayes plausibility fails in state " + std::to_string(s));
    }
}

}  // namespace detail

inline AuditResult audit_public_scheme(const ElectionInstance& inst, const PublicScheme& scheme, double tol = 1e-9,
                                       double bayes_tol = 1e-7) {
    AuditResult out;
    std::vector<std::vector<std::uint32_t>> counts;
    std::vector<double> weights;
    for (std::size_t i = 0; i < scheme.support.size(); ++i) {
        const auto& pt = scheme.support[i];
        detail::audit_profile(inst, pt.counts, scheme.q, pt.profile, scheme.relax.epsilon, tol, 0, inst.num_voters(),
                              "posterior " + std::to_string(i), out);
        counts.push_back(pt.counts);
        weights.push_back(pt.weight);
    }
    detail::audit_bayes(counts, weights, scheme.q, inst.prior(), bayes_tol, "public scheme", out);
    return out;
}

/// Each state's recommendation distribution must be a probability vector.
inline AuditResult audit_direct_scheme(const ElectionInstance& inst, const DirectScheme& direct, double tol = 1e-7) {
    AuditResult out;
    for (std::size_t s = 0; s < direct.per_state.size(); ++s) {
        if (inst.prior()[s] <= 0.0) continue;
        double total = 0.0;
        for (const auto& pm : direct.per_state[s]) {
            out.record(pm.probability, tol, "negative signal probability");
            total += pm.probability;
        }
        out.record(-std::abs(total - 1.0), tol, "signals of state " + inst.states()[s] + " do not sum to 1");
    }
    return out;
}

/// Per-district persuasiveness, Bayes plausibility, the win bound on
/// a_{d,theta}, and the aggregation bound on alpha_theta.
inline AuditResult audit_semipublic_scheme(const ElectionInstance& inst, const SemiPublicScheme& scheme,
                                           double tol = 1e-9, double lp_tol = 1e-7) {
    AuditResult out;
    const std::size_t S = inst.num_states(), D = inst.num_districts();
    for (std::size_t d = 0; d < D; ++d) {
        const auto& ds = scheme.districts.at(d);
        const std::size_t n = inst.district_size(d);
        const std::size_t need = static_cast<std::size_t>(std::ceil((1.0 - scheme.delta) * ((n + 1) / 2) - 1e-12));
        std::vector<std::vector<std::uint32_t>> counts;
        std::vector<double> weights;
        std::vector<double> win_mass(S, 0.0);
        for (std::size_t i = 0; i < ds.support.size(); ++i) {
            const auto& pt = ds.support[i];
            VoteProfile profile(inst.num_voters(), Candidate::c1);
            std::size_t c0 = 0;
            for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r) {
                double gain = 0.0;
                for (std::size_t s = 0; s < S; ++s)
                    gain += (static_cast<double>(pt.counts[s]) / scheme.q) *
                            (inst.voter(r).utility_c0[s] - inst.voter(r).utility_c1[s]);
                if (gain >= -scheme.epsilon - 1e-12) {
                    profile[r] = Candidate::c0;
                    ++c0;
                }
            }
            const std::string where = "district " + std::to_string(d) + " posterior " + std::to_string(i);
            detail::audit_profile(inst, pt.counts, scheme.q, profile, scheme.epsilon, tol, inst.district_begin(d),
                                  inst.district_end(d), where, out);
            const bool wins = c0 >= need;
            out.record(wins == pt.wins ? 0.0 : -1.0, 0.0, where + ": cached district outcome is wrong");
            if (wins)
                for (std::size_t s = 0; s < S; ++s) win_mass[s] += pt.weight * pt.counts[s] / static_cast<double>(scheme.q);
            counts.push_back(pt.counts);
            weights.push_back(pt.weight);
        }
        detail::audit_bayes(counts, weights, scheme.q, inst.prior(), lp_tol, "district " + std::to_string(d), out);
        for (std::size_t s = 0; s < S; ++s) {
            const double mu = inst.prior()[s];
            if (mu <= 0.0) continue;
            const double a = scheme.district_win_probs.at(d).at(s);
            out.record(std::min(a, 1.0 - a), lp_tol, "district win probability outside [0,1]");
            out.record(win_mass[s] - mu * a, lp_tol,
                       "district " + std::to_string(d) + " win probability exceeds its winning mass in state " +
                           std::to_string(s));
        }
    }
    // alpha_theta <= (sum of the D - m smallest a) / (K_D - m) for m < K_D, and <= 1
    const std::size_t k = (D + 1) / 2;
    for (std::size_t s = 0; s < S; ++s) {
        if (inst.prior()[s] <= 0.0) continue;
        std::vector<double> a(D);
        for (std::size_t d = 0; d < D; ++d) a[d] = scheme.district_win_probs[d][s];
        std::sort(a.begin(), a.end());
        const double alpha = scheme.aggregate_win_probs.at(s);
        out.record(std::min(alpha, 1.0 - alpha), lp_tol, "aggregate win probability outside [0,1]");
        for (std::size_t m = 0; m < k; ++m) {
            double low = 0.0;
            for (std::size_t i = 0; i < D - m; ++i) low += a[i];
            out.record(low - static_cast<double>(k - m) * alpha, lp_tol,
                       "aggregate bound m=" + std::to_string(m) + " fails in state " + std::to_string(s));
        }
    }
    return out;
}

}  // namespace persuade
