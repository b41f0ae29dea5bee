#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/random.hpp"

namespace persuade {

enum class InstanceFamily { uniform_random, example1, threshold_adversarial };

inline InstanceFamily parse_family(const std::string& s) {
    if (s == "uniform-random") return InstanceFamily::uniform_random;
    if (s == "example1") return InstanceFamily::example1;
    if (s == "threshold-adversarial") return InstanceFamily::threshold_adversarial;
    throw InputError("unknown instance family '" + s + "'");
}

struct GeneratorSpec {
    std::size_t n_states = 2;
    std::size_t n_districts = 1;
    std::size_t voters_per_district = 3;
    std::uint64_t seed = 0;
    InstanceFamily family = InstanceFamily::uniform_random;
};

/// Seven voters, three equally likely states, one district. Net +1/2 is
/// written as (0.75, 0.25) and net -1 as (0, 1).
inline ElectionInstance example1_instance() {
    const Voter plus_a{"", {0.75, 0.0, 0.0}, {0.25, 1.0, 1.0}};
    const Voter plus_b{"", {0.0, 0.75, 0.0}, {1.0, 0.25, 1.0}};
    const Voter plus_c{"", {0.0, 0.0, 0.75}, {1.0, 1.0, 0.25}};
    const Voter always{"", {0.75, 0.75, 0.75}, {0.25, 0.25, 0.25}};
    District d{"d1", {plus_a, plus_a, plus_b, plus_b, plus_c, plus_c, always}};
    for (std::size_t i = 0; i < d.voters.size(); ++i) d.voters[i].id = "r" + std::to_string(i + 1);
    return ElectionInstance({"theta_A", "theta_B", "theta_C"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {d});
}

/// Two states, one voter: prefers c0 by 1 in the first state and c1 by 1 in
/// the second; prior (0.3, 0.7).
inline ElectionInstance single_voter_instance() {
    District d{"d1", {Voter{"r1", {1.0, 0.0}, {0.0, 1.0}}}};
    return ElectionInstance({"theta_1", "theta_2"}, {0.3, 0.7}, {d});
}

namespace detail {

/// Normalized exponential spacings: a uniform draw from the simplex. The
/// last entry absorbs rounding so the sum is 1 to within an ulp or two.
inline std::vector<double> random_prior(std::size_t n, CounterRng& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = -std::log(1.0 - rng.uniform()) + 1e-3);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += (w[i] /= total);
    w[n - 1] = std::max(0.0, 1.0 - acc);
    return w;
}

}  // namespace detail

/// Deterministic in the spec (same seed, same bytes).
inline ElectionInstance generate_instance(const GeneratorSpec& spec) {
    if (spec.family == InstanceFamily::example1) return example1_instance();
    if (spec.n_states == 0 || spec.n_districts == 0 || spec.voters_per_district == 0)
        throw InputError("generator dimensions must be positive");

    CounterRng rng(spec.seed, stream_key({static_cast<std::uint64_t>(spec.family), spec.n_states, spec.n_districts,
                                          spec.voters_per_district}));
    const std::size_t S = spec.n_states;
    std::vector<std::string> states;
    for (std::size_t s = 0; s < S; ++s) states.push_back("s" + std::to_string(s));

    std::vector<double> prior;
    if (spec.family == InstanceFamily::uniform_random) {
        prior = detail::random_prior(S, rng);
    } else {
        prior.assign(S, 1.0 / static_cast<double>(S));
        double acc = 0.0;
        for (std::size_t s = 0; s + 1 < S; ++s) acc += prior[s];
        prior[S - 1] = 1.0 - acc;
    }

    std::vector<District> districts;
    std::size_t serial = 0;
    for (std::size_t d = 0; d < spec.n_districts; ++d) {
        District dist{"d" + std::to_string(d + 1), {}};
        for (std::size_t i = 0; i < spec.voters_per_district; ++i) {
            Voter v{"r" + std::to_string(++serial), std::vector<double>(S), std::vector<double>(S)};
            if (spec.family == InstanceFamily::uniform_random) {
                for (std::size_t s = 0; s < S; ++s) {
                    v.utility_c0[s] = rng.uniform();
                    v.utility_c1[s] = rng.uniform();
                }
            } else {
                // one favourite state with a small gain for c0, losses elsewhere:
                // persuasion only works with posteriors near indifference
                const std::size_t fav = rng.below(S);
                for (std::size_t s = 0; s < S; ++s) {
                    const double net = s == fav ? 0.05 + 0.45 * rng.uniform() : -(0.05 + 0.95 * rng.uniform());
                    v.utility_c0[s] = 0.5 + net / 2.0;
                    v.utility_c1[s] = 0.5 - net / 2.0;
                }
            }
            dist.voters.push_back(std::move(v));
        }
        districts.push_back(std::move(dist));
    }
    return ElectionInstance(std::move(states), std::move(prior), std::move(districts));
}

}  // namespace persuade
