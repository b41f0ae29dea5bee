#pragma once

// Two-candidate district-based elections: instances, voting rules with
// relaxed thresholds, posteriors and receivers' (epsilon-)best responses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"

namespace persuade {

enum class Candidate : std::uint8_t { c0 = 0, c1 = 1 };

/// Absolute tolerance used when deciding whether a voter is indifferent.
inline constexpr double kTieTolerance = 1e-12;

struct Voter {
    std::string id;
    std::vector<double> utility_c0;  // u_r(theta, c0) per state
    std::vector<double> utility_c1;  // u_r(theta, c1) per state

    double net(std::size_t state) const { return utility_c0[state] - utility_c1[state]; }
};

struct District {
    std::string id;
    std::vector<Voter> voters;
};

/// Majority threshold ceil(n/2).
constexpr std::size_t majority(std::size_t n) { return (n + 1) / 2; }

/// ceil((1 - delta) * k), guarded against float noise at exact integers.
inline std::size_t relaxed_threshold(std::size_t k, double delta) {
    const double x = (1.0 - delta) * static_cast<double>(k);
    const double c = std::ceil(x - 1e-12);
    return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

struct RelaxationParams {
    double delta_district = 0.0;
    double delta_aggregate = 0.0;
    double epsilon = 0.0;

    void validate() const {
        if (!(delta_district >= 0.0 && delta_district < 1.0))
            throw InputError("delta_district must lie in [0,1)");
        if (!(delta_aggregate >= 0.0 && delta_aggregate < 1.0))
            throw InputError("delta_aggregate must lie in [0,1)");
        if (!(epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
    }
};

/// Sender-side majority voting over districts. Immutable after construction;
/// voters are addressed by a flat index in district order.
class ElectionInstance {
public:
    ElectionInstance(std::vector<std::string> states, std::vector<double> prior,
                     std::vector<District> districts)
        : states_(std::move(states)), prior_(std::move(prior)), districts_(std::move(districts)) {
        validate();
        std::size_t offset = 0;
        for (const auto& d : districts_) {
            district_offsets_.push_back(offset);
            for (std::size_t i = 0; i < d.voters.size(); ++i) {
                voter_district_.push_back(district_offsets_.size() - 1);
                voters_.push_back(&d.voters[i]);
            }
            offset += d.voters.size();
        }
        district_offsets_.push_back(offset);
    }

    ElectionInstance(const ElectionInstance& o)
        : ElectionInstance(o.states_, o.prior_, o.districts_) {}
    ElectionInstance& operator=(const ElectionInstance& o) {
        if (this != &o) *this = ElectionInstance(o);
        return *this;
    }
    ElectionInstance(ElectionInstance&&) noexcept = default;
    ElectionInstance& operator=(ElectionInstance&&) noexcept = default;

    std::size_t num_states() const { return states_.size(); }
    std::size_t num_districts() const { return districts_.size(); }
    std::size_t num_voters() const { return voters_.size(); }

    const std::vector<std::string>& states() const { return states_; }
    const std::vector<double>& prior() const { return prior_; }
    const std::vector<District>& districts() const { return districts_; }
    const District& district(std::size_t d) const { return districts_[d]; }

    const Voter& voter(std::size_t r) const { return *voters_[r]; }
    std::size_t district_of(std::size_t r) const { return voter_district_[r]; }
    std::size_t district_begin(std::size_t d) const { return district_offsets_[d]; }
    std::size_t district_end(std::size_t d) const { return district_offsets_[d + 1]; }
    std::size_t district_size(std::size_t d) const { return districts_[d].voters.size(); }

    std::size_t voter_index(const std::string& id) const {
        for (std::size_t r = 0; r < voters_.size(); ++r)
            if (voters_[r]->id == id) return r;
        throw LookupError("unknown voter id '" + id + "'");
    }
    std::size_t state_index(const std::string& name) const {
        for (std::size_t s = 0; s < states_.size(); ++s)
            if (states_[s] == name) return s;
        throw LookupError("unknown state '" + name + "'");
    }

    /// u_r(theta) = u_r(theta,c0) - u_r(theta,c1).
    double net_utility(std::size_t r, std::size_t state) const {
        if (r >= voters_.size()) throw LookupError("voter index out of range");
        if (state >= states_.size()) throw LookupError("state index out of range");
        return voters_[r]->net(state);
    }
    double net_utility(const std::string& voter_id, const std::string& state) const {
        return net_utility(voter_index(voter_id), state_index(state));
    }

private:
    void validate() const {
        if (states_.empty()) throw InputError("instance needs at least one state");
        if (prior_.size() != states_.size())
            throw InputError("prior length " + std::to_string(prior_.size()) +
                             " does not match state count " + std::to_string(states_.size()));
        double sum = 0.0;
        for (double p : prior_) {
            if (!(p >= 0.0)) throw InputError("prior entries must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InputError("prior sums to " + format_real(sum));
        if (districts_.empty()) throw InputError("instance needs at least one district");
        std::vector<std::string> ids;
        for (const auto& d : districts_) {
            if (d.voters.empty()) throw InputError("district '" + d.id + "' has no voters");
            for (const auto& v : d.voters) {
                if (v.utility_c0.size() != states_.size() || v.utility_c1.size() != states_.size())
                    throw InputError("voter '" + v.id + "' utility length mismatch");
                for (std::size_t s = 0; s < states_.size(); ++s) {
                    for (double u : {v.utility_c0[s], v.utility_c1[s]})
                        if (!(u >= 0.0 && u <= 1.0))
                            throw InputError("voter '" + v.id + "' utility outside [0,1]");
                }
                ids.push_back(v.id);
            }
        }
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw InputError("duplicate voter id");
    }

    std::vector<std::string> states_;
    std::vector<double> prior_;
    std::vector<District> districts_;
    std::vector<const Voter*> voters_;
    std::vector<std::size_t> voter_district_;
    std::vector<std::size_t> district_offsets_;
};

/// Belief over states. When `q` is set the belief is q-uniform and `counts`
/// holds the exact integer numerators.
class Posterior {
public:
    explicit Posterior(std::vector<double> probs) : probs_(std::move(probs)) {
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0)) throw InputError("posterior entries must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw InputError("posterior sums to " + format_real(sum));
    }

    static Posterior from_counts(std::vector<std::uint32_t> counts) {
        std::uint64_t q = 0;
        for (auto c : counts) q += c;
        if (q == 0) throw InputError("count vector must have positive total");
        std::vector<double> probs(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            probs[i] = static_cast<double>(counts[i]) / static_cast<double>(q);
        Posterior p;
        p.probs_ = std::move(probs);
        p.counts_ = std::move(counts);
        p.q_ = static_cast<std::uint32_t>(q);
        return p;
    }

    static Posterior point_mass(std::size_t n_states, std::size_t state) {
        std::vector<std::uint32_t> c(n_states, 0);
        c.at(state) = 1;
        return from_counts(std::move(c));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t s) const { return probs_[s]; }
    const std::vector<double>& probs() const { return probs_; }
    std::optional<std::uint32_t> q() const { return q_; }
    const std::vector<std::uint32_t>& counts() const { return counts_; }

private:
    Posterior() = default;
    std::vector<double> probs_;
    std::vector<std::uint32_t> counts_;
    std::optional<std::uint32_t> q_;
};

/// One candidate per voter, flat voter order of the instance.
using VoteProfile = std::vector<Candidate>;

/// One atom of a finitely supported distribution over profiles.
struct ProfileMass {
    VoteProfile profile;
    double probability = 0.0;
};

inline std::size_t count_c0(std::span<const Candidate> votes) {
    return static_cast<std::size_t>(std::count(votes.begin(), votes.end(), Candidate::c0));
}

/// W^d_delta: c0 iff at least ceil((1-delta) ceil(n/2)) voters pick c0.
inline Candidate eval_district(std::span<const Candidate> votes, double delta_district) {
    if (votes.empty()) throw InputError("district slice is empty");
    const std::size_t need = relaxed_threshold(majority(votes.size()), delta_district);
    return count_c0(votes) >= need ? Candidate::c0 : Candidate::c1;
}

/// Number of districts carried by c0 under the district-level relaxation.
inline std::size_t districts_won(const ElectionInstance& inst, std::span<const Candidate> profile,
                                 double delta_district) {
    if (profile.size() != inst.num_voters())
        throw InputError("profile length " + std::to_string(profile.size()) +
                         " does not match voter count " + std::to_string(inst.num_voters()));
    std::size_t won = 0;
    for (std::size_t d = 0; d < inst.num_districts(); ++d) {
        auto slice = profile.subspan(inst.district_begin(d), inst.district_size(d));
        if (eval_district(slice, delta_district) == Candidate::c0) ++won;
    }
    return won;
}

/// W, W_delta or W_deltadelta depending on `relax`; returns 0 or 1.
inline int eval_election(const ElectionInstance& inst, std::span<const Candidate> profile,
                         const RelaxationParams& relax) {
    const std::size_t won = districts_won(inst, profile, relax.delta_district);
    const std::size_t need = relaxed_threshold(majority(inst.num_districts()), relax.delta_aggregate);
    return won >= need ? 1 : 0;
}

/// Sum_theta p_theta u_r(theta).
inline double expected_net_utility(const ElectionInstance& inst, std::size_t r, const Posterior& p) {
    const Voter& v = inst.voter(r);
    double acc = 0.0;
    for (std::size_t s = 0; s < inst.num_states(); ++s) acc += p[s] * v.net(s);
    return acc;
}

/// Whether voter r picks c0 under posterior p with epsilon-persuasiveness.
/// Indifferent voters (the E_eps set) go to c0, which is an argmax of every
/// vote-monotone sender objective.
inline bool votes_c0(const ElectionInstance& inst, std::size_t r, const Posterior& p, double epsilon) {
    if (p.q()) {
        // exact numerators avoid drift on q-uniform beliefs
        const Voter& v = inst.voter(r);
        double acc = 0.0;
        for (std::size_t s = 0; s < inst.num_states(); ++s)
            if (p.counts()[s] != 0) acc += static_cast<double>(p.counts()[s]) * v.net(s);
        return acc >= -(epsilon + kTieTolerance) * static_cast<double>(*p.q());
    }
    return expected_net_utility(inst, r, p) >= -epsilon - kTieTolerance;
}

inline VoteProfile best_response(const ElectionInstance& inst, const Posterior& p, double epsilon) {
    if (!(epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
    if (p.size() != inst.num_states()) throw InputError("posterior dimension mismatch");
    VoteProfile out(inst.num_voters());
    for (std::size_t r = 0; r < inst.num_voters(); ++r)
        out[r] = votes_c0(inst, r, p, epsilon) ? Candidate::c0 : Candidate::c1;
    return out;
}

/// f_eps(p) for the state-independent objective: 1 if the induced profile wins.
inline int posterior_value(const ElectionInstance& inst, const Posterior& p,
                           const RelaxationParams& relax) {
    return eval_election(inst, best_response(inst, p, relax.epsilon), relax);
}

/// Does district d elect c0 under the best response to p?
inline bool district_wins(const ElectionInstance& inst, std::size_t d, const Posterior& p,
                          double epsilon, double delta_district) {
    const std::size_t need = relaxed_threshold(majority(inst.district_size(d)), delta_district);
    std::size_t c0 = 0;
    for (std::size_t r = inst.district_begin(d); r < inst.district_end(d); ++r)
        if (votes_c0(inst, r, p, epsilon)) ++c0;
    return c0 >= need;
}

inline std::string profile_string(std::span<const Candidate> profile) {
    std::string s;
    s.reserve(profile.size());
    for (auto c : profile) s.push_back(c == Candidate::c0 ? '0' : '1');
    return s;
}

}  // namespace persuade
