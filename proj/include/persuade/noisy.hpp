#pragma once

// alpha-noisy distributions around a base profile: each voter deviates from
// the base with marginal probability at most alpha. Three families are
// provided; the finite ones carry their support explicitly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/random.hpp"

namespace persuade {

inline constexpr std::size_t kAdversarialSupportCap = 200'000;

enum class NoiseModel { independent, common_cause, adversarial_mass };

inline std::string to_string(NoiseModel m) {
    switch (m) {
        case NoiseModel::independent: return "independent";
        case NoiseModel::common_cause: return "common-cause";
        case NoiseModel::adversarial_mass: return "adversarial-mass";
    }
    return "unknown";
}

inline NoiseModel parse_noise_model(const std::string& s) {
    if (s == "independent") return NoiseModel::independent;
    if (s == "common-cause") return NoiseModel::common_cause;
    if (s == "adversarial-mass") return NoiseModel::adversarial_mass;
    throw InputError("unknown noise model '" + s + "'");
}

struct NoisyDistribution {
    VoteProfile base;
    double alpha = 0.0;
    NoiseModel model = NoiseModel::independent;
    std::vector<double> corruption;    // Pr(y_r != base_r), per voter
    std::vector<ProfileMass> support;  // empty for the independent model
    std::vector<double> cumulative;    // running sums of support probabilities

    bool finite() const { return model != NoiseModel::independent; }
};

namespace detail {

inline void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0,1]");
}

inline Candidate flip(Candidate c) { return c == Candidate::c0 ? Candidate::c1 : Candidate::c0; }

/// Merge equal profiles, drop empty atoms, order by profile string.
inline std::vector<ProfileMass> merge_support(const std::vector<ProfileMass>& in) {
    std::map<std::string, ProfileMass> acc;
    for (const auto& pm : in) {
        if (pm.probability <= 0.0) continue;
        auto [it, fresh] = acc.try_emplace(profile_string(pm.profile), ProfileMass{pm.profile, 0.0});
        it->second.probability += pm.probability;
    }
    std::vector<ProfileMass> out;
    out.reserve(acc.size());
    for (auto& [key, pm] : acc) out.push_back(std::move(pm));
    return out;
}

inline std::vector<double> corruption_of(const VoteProfile& base, const std::vector<ProfileMass>& support) {
    std::vector<double> c(base.size(), 0.0);
    for (const auto& pm : support)
        for (std::size_t r = 0; r < base.size(); ++r)
            if (pm.profile[r] != base[r]) c[r] += pm.probability;
    return c;
}

inline void finish(NoisyDistribution& y, const std::vector<ProfileMass>& atoms) {
    y.support = merge_support(atoms);
    y.corruption = corruption_of(y.base, y.support);
    y.cumulative.clear();
    double acc = 0.0;
    for (const auto& pm : y.support) y.cumulative.push_back(acc += pm.probability);
}

}  // namespace detail

inline NoisyDistribution make_independent_noise(const VoteProfile& base, double alpha) {
    detail::check_alpha(alpha);
    return {base, alpha, NoiseModel::independent, std::vector<double>(base.size(), alpha), {}, {}};
}

/// One shared Bernoulli(alpha) flips every voter in `subset` at once.
inline NoisyDistribution make_common_cause_noise(const VoteProfile& base, double alpha,
                                                 const std::vector<std::size_t>& subset) {
    detail::check_alpha(alpha);
    VoteProfile flipped = base;
    for (auto r : subset) flipped.at(r) = detail::flip(flipped[r]);
    NoisyDistribution out{base, alpha, NoiseModel::common_cause, {}, {}, {}};
    detail::finish(out, {{base, 1.0 - alpha}, {flipped, alpha}});
    return out;
}

/// Common-cause noise aimed at the base's c0-voters.
inline NoisyDistribution make_common_cause_noise(const VoteProfile& base, double alpha) {
    std::vector<std::size_t> subset;
    for (std::size_t r = 0; r < base.size(); ++r)
        if (base[r] == Candidate::c0) subset.push_back(r);
    return make_common_cause_noise(base, alpha, subset);
}

/// Cheapest attacks that make `g` (thresholds from `relax`) reject the base:
/// knock out just enough won districts, each by flipping just enough of its
/// c0-voters to c1. Districts and voter windows are rotated cyclically so
/// corruption spreads evenly; the attack mass lambda is the largest value
/// keeping every voter's corruption at or below alpha. The rest stays on
/// the base.
inline NoisyDistribution make_adversarial_noise(const ElectionInstance& inst, const VoteProfile& base, double alpha,
                                                const RelaxationParams& relax) {
    detail::check_alpha(alpha);
    if (base.size() != inst.num_voters()) throw InputError("base profile length does not match the instance");
    NoisyDistribution out{base, alpha, NoiseModel::adversarial_mass, {}, {}, {}};

    const std::size_t D = inst.num_districts();
    std::vector<std::size_t> won;
    std::vector<std::vector<std::size_t>> c0_voters(D);
    std::vector<std::size_t> cost(D, 0);
    for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r)
            if (base[r] == Candidate::c0) c0_voters[d].push_back(r);
        const std::size_t need = relaxed_threshold(majority(inst.district_size(d)), relax.delta_district);
        if (c0_voters[d].size() >= need) {
            won.push_back(d);
            cost[d] = c0_voters[d].size() - need + 1;
        }
    }
    const std::size_t need_d = relaxed_threshold(majority(D), relax.delta_aggregate);
    if (alpha == 0.0 || won.size() < need_d) {  // nothing to attack
        detail::finish(out, {{base, 1.0}});
        return out;
    }
    const std::size_t fail = won.size() - need_d + 1;

    // every attack: a window of `fail` won districts starting at j, and in
    // each of them a window of cost[d] c0-voters starting at offset o mod v_d
    std::size_t period = 1;
    for (auto d : won) {
        period = std::lcm(period, c0_voters[d].size());
        if (period * won.size() > kAdversarialSupportCap)
            throw CapExceeded("adversarial-mass support exceeds " + std::to_string(kAdversarialSupportCap) + " profiles");
    }
    std::vector<VoteProfile> attacks;
    for (std::size_t j = 0; j < won.size(); ++j)
        for (std::size_t o = 0; o < period; ++o) {
            VoteProfile c = base;
            for (std::size_t i = 0; i < fail; ++i) {
                const std::size_t d = won[(j + i) % won.size()];
                const auto& vs = c0_voters[d];
                for (std::size_t k = 0; k < cost[d]; ++k) c[vs[(o + k) % vs.size()]] = Candidate::c1;
            }
            attacks.push_back(std::move(c));
        }
    std::vector<double> freq(base.size(), 0.0);
    for (const auto& c : attacks)
        for (std::size_t r = 0; r < base.size(); ++r)
            if (c[r] != base[r]) freq[r] += 1.0 / static_cast<double>(attacks.size());
    const double top = *std::max_element(freq.begin(), freq.end());
    const double lambda = std::min(1.0, alpha / top);

    std::vector<ProfileMass> atoms{{base, 1.0 - lambda}};
    for (auto& c : attacks) atoms.push_back({std::move(c), lambda / static_cast<double>(attacks.size())});
    detail::finish(out, atoms);
    return out;
}

/// Caller-supplied finite support, tagged adversarial-mass. Rejects atoms
/// that do not sum to 1 or that corrupt some voter more than alpha.
inline NoisyDistribution make_explicit_noise(const VoteProfile& base, double alpha, const std::vector<ProfileMass>& atoms) {
    detail::check_alpha(alpha);
    double total = 0.0;
    for (const auto& pm : atoms) {
        if (pm.profile.size() != base.size()) throw InputError("profile length does not match the base");
        if (!(pm.probability >= 0.0)) throw InputError("negative atom probability");
        total += pm.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("atom probabilities sum to " + format_real(total));
    NoisyDistribution out{base, alpha, NoiseModel::adversarial_mass, {}, {}, {}};
    detail::finish(out, atoms);
    for (std::size_t r = 0; r < base.size(); ++r)
        if (out.corruption[r] > alpha + 1e-12)
            throw InputError("voter " + std::to_string(r) + " is corrupted with probability " +
                             format_real(out.corruption[r]) + " > alpha");
    return out;
}

/// Draw one profile. Deterministic in (seed, stream, counter state of rng).
inline VoteProfile draw_noisy(const NoisyDistribution& y, CounterRng& rng) {
    if (y.model == NoiseModel::independent) {
        VoteProfile c = y.base;
        for (std::size_t r = 0; r < c.size(); ++r)
            if (rng.bernoulli(y.corruption[r])) c[r] = detail::flip(c[r]);
        return c;
    }
    const double u = rng.uniform() * y.cumulative.back();
    const auto it = std::upper_bound(y.cumulative.begin(), y.cumulative.end(), u);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - y.cumulative.begin()), y.support.size() - 1);
    return y.support[i].profile;
}

inline std::vector<VoteProfile> sample_alpha_noisy(const NoisyDistribution& y, std::uint64_t seed, std::size_t trials) {
    CounterRng rng(seed, stream_key({static_cast<std::uint64_t>(y.model)}));
    std::vector<VoteProfile> out;
    out.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) out.push_back(draw_noisy(y, rng));
    return out;
}

/// Exact expectation of an election evaluation over a finite distribution.
inline double expected_value(const ElectionInstance& inst, const NoisyDistribution& y, const RelaxationParams& relax) {
    if (!y.finite()) throw InputError("exact expectation needs a finite support");
    double acc = 0.0;
    for (const auto& pm : y.support) acc += pm.probability * eval_election(inst, pm.profile, relax);
    return acc;
}

/// Move each atom c to c' whose c0-voters are those of c that also vote c0
/// in the base. Atoms landing on the same c' merge.
inline NoisyDistribution restrict_to_base_voters(const NoisyDistribution& y, const VoteProfile& base) {
    if (!y.finite()) throw InputError("transform needs a finite support");
    NoisyDistribution out{base, y.alpha, y.model, {}, {}, {}};
    std::vector<ProfileMass> moved;
    moved.reserve(y.support.size());
    for (const auto& pm : y.support) {
        if (pm.profile.size() != base.size()) throw InputError("profile length does not match the base");
        VoteProfile c = pm.profile;
        for (std::size_t r = 0; r < c.size(); ++r)
            if (base[r] != Candidate::c0) c[r] = Candidate::c1;
        moved.push_back({std::move(c), pm.probability});
    }
    detail::finish(out, moved);
    return out;
}

}  // namespace persuade
