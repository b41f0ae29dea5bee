#pragma once

// Monte-Carlo checks of comparative stability: for base profiles the strict
// rule h accepts, E[g(y)] over alpha-noisy y around the base should stay at
// or above 1 - alpha * beta. Each (base, alpha, model) cell is estimated
// from its own counter-based stream.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/noisy.hpp"
#include "persuade/parallel.hpp"
#include "persuade/public_solver.hpp"
#include "persuade/random.hpp"

namespace persuade {

enum class RuleTag { w, w_delta, w_delta_delta };

inline std::string to_string(RuleTag t) {
    switch (t) {
        case RuleTag::w: return "W";
        case RuleTag::w_delta: return "W_delta";
        case RuleTag::w_delta_delta: return "W_delta_delta";
    }
    return "unknown";
}

inline RuleTag parse_rule_tag(const std::string& s) {
    if (s == "W") return RuleTag::w;
    if (s == "W_delta") return RuleTag::w_delta;
    if (s == "W_delta_delta") return RuleTag::w_delta_delta;
    throw InputError("unknown rule '" + s + "' (expected W, W_delta or W_delta_delta)");
}

inline RelaxationParams rule_params(RuleTag t, double delta) {
    switch (t) {
        case RuleTag::w: return {};
        case RuleTag::w_delta: return {delta, 0.0, 0.0};
        case RuleTag::w_delta_delta: return {delta, delta, 0.0};
    }
    return {};
}

struct StabilityOptions {
    std::vector<NoiseModel> models{NoiseModel::independent, NoiseModel::common_cause, NoiseModel::adversarial_mass};
    std::size_t random_bases = 3;  // in addition to the threshold-critical base
    bool critical_only = false;
};

struct StabilityCell {
    std::size_t base_index = 0;
    std::string base;
    double alpha = 0.0;
    NoiseModel model = NoiseModel::independent;
    double mean = 0.0;
    double std_error = 0.0;
    double exact_mean = std::numeric_limits<double>::quiet_NaN();  // finite models only
    double bound = 0.0;
    double max_corruption = 0.0;
    bool violated = false;
};

struct StabilityReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    RuleTag g = RuleTag::w_delta;
    RuleTag h = RuleTag::w;
    double delta = 0.0;
    double beta = 0.0;
    std::vector<double> alphas;
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    std::size_t skipped_vacuous = 0;
    std::vector<StabilityCell> cells;
    std::string note = "sampling over three noise families is evidence, not a proof over all alpha-noisy distributions";
};

/// Exactly K_d c0-votes in the first K_D districts, all c1 elsewhere.
inline VoteProfile threshold_critical_profile(const ElectionInstance& inst) {
    VoteProfile c(inst.num_voters(), Candidate::c1);
    const std::size_t won = majority(inst.num_districts());
    for (std::size_t d = 0; d < won; ++d) {
        const std::size_t k = majority(inst.district_size(d));
        for (std::size_t i = 0; i < k; ++i) c[inst.district_begin(d) + i] = Candidate::c0;
    }
    return c;
}

/// A random profile that W accepts: at least K_D districts carried, with
/// vote counts and voter positions drawn at random.
inline VoteProfile random_winning_profile(const ElectionInstance& inst, CounterRng& rng) {
    const std::size_t D = inst.num_districts();
    std::vector<std::size_t> order(D);
    for (std::size_t d = 0; d < D; ++d) order[d] = d;
    for (std::size_t i = D; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const std::size_t need = majority(D);
    const std::size_t carried = need + rng.below(D - need + 1);

    VoteProfile c(inst.num_voters(), Candidate::c1);
    for (std::size_t i = 0; i < D; ++i) {
        const std::size_t d = order[i];
        const std::size_t n = inst.district_size(d), k = majority(n);
        const std::size_t votes = i < carried ? k + rng.below(n - k + 1) : rng.below(k);
        std::vector<std::size_t> seats(n);
        for (std::size_t j = 0; j < n; ++j) seats[j] = j;
        for (std::size_t j = n; j > 1; --j) std::swap(seats[j - 1], seats[rng.below(j)]);
        for (std::size_t j = 0; j < votes; ++j) c[inst.district_begin(d) + seats[j]] = Candidate::c0;
    }
    return c;
}

inline StabilityReport check_comparative_stability(const ElectionInstance& inst, RuleTag g, RuleTag h, double delta,
                                                   double beta, const std::vector<double>& alphas, std::size_t trials,
                                                   std::uint64_t seed, const StabilityOptions& opt = {}) {
    if (trials == 0) throw InputError("trials must be positive");
    if (!(delta >= 0.0 && delta < 1.0)) throw InputError("delta must lie in [0,1)");
    if (!(beta >= 0.0)) throw InputError("beta must be nonnegative");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw InputError("alpha must lie in [0,1]");

    StabilityReport rep;
    rep.trials = trials;
    rep.seed = seed;
    rep.g = g;
    rep.h = h;
    rep.delta = delta;
    rep.beta = beta;
    rep.alphas = alphas;
    const RelaxationParams g_relax = rule_params(g, delta), h_relax = rule_params(h, delta);

    std::vector<VoteProfile> bases{threshold_critical_profile(inst)};
    if (!opt.critical_only) {
        CounterRng rng(seed, stream_key({0xba5eULL}));
        for (std::size_t i = 0; i < opt.random_bases; ++i) bases.push_back(random_winning_profile(inst, rng));
    }
    std::vector<std::size_t> kept;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        if (eval_election(inst, bases[b], h_relax) == 1)
            kept.push_back(b);
        else
            ++rep.skipped_vacuous;
    }

    for (auto b : kept)
        for (double a : alphas)
            for (auto m : opt.models) rep.cells.push_back({b, profile_string(bases[b]), a, m});

    parallel_for(rep.cells.size(), [&](std::size_t i) {
        auto& cell = rep.cells[i];
        const VoteProfile& base = bases[cell.base_index];
        NoisyDistribution y;
        switch (cell.model) {
            case NoiseModel::independent: y = make_independent_noise(base, cell.alpha); break;
            case NoiseModel::common_cause: y = make_common_cause_noise(base, cell.alpha); break;
            case NoiseModel::adversarial_mass: y = make_adversarial_noise(inst, base, cell.alpha, g_relax); break;
        }
        cell.max_corruption = *std::max_element(y.corruption.begin(), y.corruption.end());
        if (y.finite()) cell.exact_mean = expected_value(inst, y, g_relax);

        CounterRng rng(seed, stream_key({cell.base_index, std::bit_cast<std::uint64_t>(cell.alpha),
                                         static_cast<std::uint64_t>(cell.model)}));
        std::size_t hits = 0;
        for (std::size_t t = 0; t < trials; ++t) hits += static_cast<std::size_t>(eval_election(inst, draw_noisy(y, rng), g_relax));
        const double n = static_cast<double>(trials);
        cell.mean = static_cast<double>(hits) / n;
        cell.std_error = std::sqrt(cell.mean * (1.0 - cell.mean) / n);
        cell.bound = 1.0 - cell.alpha * beta;
        cell.violated = cell.mean + 3.0 * cell.std_error < cell.bound;
    });

    for (const auto& cell : rep.cells) {
        rep.worst_ratio = std::min(rep.worst_ratio, cell.mean);  // h(base) = 1 on every kept base
        if (cell.violated) ++rep.violations;
    }
    if (rep.cells.empty()) rep.worst_ratio = std::numeric_limits<double>::quiet_NaN();
    return rep;
}

/// Falsifiable configuration: beta scaled down tenfold, adversarial-mass
/// noise, threshold-critical base. A working sampler must report violations.
inline StabilityReport stability_negative_control(const ElectionInstance& inst, RuleTag g, double delta, double beta,
                                                  const std::vector<double>& alphas, std::size_t trials,
                                                  std::uint64_t seed) {
    StabilityOptions opt;
    opt.models = {NoiseModel::adversarial_mass};
    opt.critical_only = true;
    return check_comparative_stability(inst, g, RuleTag::w, delta, beta / 10.0, alphas, trials, seed, opt);
}

struct DecompositionBoundRow {
    std::size_t state = 0;
    double lhs = 0.0;  // sum_p gamma_p p_theta g(b^{p,eps})
    double rhs = 0.0;  // (1 - eta) p*_theta W(b^{p*})
    bool holds = false;
};

struct DecompositionBoundReport {
    std::uint32_t q = 0;
    std::uint64_t required_q = 0;
    bool asserted = false;  // q meets the decomposition bound, so every row must hold
    double truncated_mass = 0.0;
    std::vector<DecompositionBoundRow> rows;
};

/// Compare the multinomial decomposition of p* against the per-state bound
/// with g = W_delta (district thresholds relaxed, epsilon-best responses).
inline DecompositionBoundReport check_decomposition_bound(const ElectionInstance& inst, const Posterior& target,
                                                          std::uint32_t q, double eta, double delta, double epsilon) {
    DecompositionBoundReport rep;
    rep.q = q;
    rep.required_q = theoretical_q(eta, delta > 0.0 ? 1.0 / delta : 1.0, epsilon);
    rep.asserted = q >= rep.required_q;
    const auto dec = decompose_posterior(target, q);
    rep.truncated_mass = dec.truncated_mass;
    const RelaxationParams g_relax{delta, 0.0, epsilon};
    const int strict = posterior_value(inst, target, {});
    std::vector<int> wins(dec.parts.size());
    for (std::size_t i = 0; i < dec.parts.size(); ++i)
        wins[i] = posterior_value(inst, Posterior::from_counts(dec.parts[i].counts), g_relax);
    for (std::size_t s = 0; s < inst.num_states(); ++s) {
        DecompositionBoundRow row{s, 0.0, (1.0 - eta) * target[s] * strict, false};
        for (std::size_t i = 0; i < dec.parts.size(); ++i)
            if (wins[i]) row.lhs += dec.parts[i].weight * dec.parts[i].counts[s] / static_cast<double>(q);
        row.holds = row.lhs >= row.rhs - 1e-12;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace persuade
