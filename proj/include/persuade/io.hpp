#pragma once

// Instance files, report documents and CSV tables.
//
// Instance file:
//   {"states": [...], "prior": [...],
//    "districts": [{"id": ..., "voters": [{"id": ..., "u_c0": [...], "u_c1": [...]}]}]}
// Reals may be JSON numbers or strings "n/d". Doubles are written with
// round-trip precision, so parse(serialize(x)) reproduces x bit for bit.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "persuade/audit.hpp"
#include "persuade/election.hpp"
#include "persuade/private_solver.hpp"
#include "persuade/public_solver.hpp"
#include "persuade/semipublic_solver.hpp"
#include "persuade/stability.hpp"

namespace persuade {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw InputError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(path + "." + key + ": missing");
    return *it;
}

inline const Json& array_at(const Json& obj, const char* key, const std::string& path) {
    const Json& a = member(obj, key, path);
    if (!a.is_array()) throw InputError(path + "." + key + ": expected an array");
    return a;
}

inline double parse_real(const Json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        auto to_num = [&](const std::string& part) {
            long long x = 0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
            if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty())
                throw InputError(path + ": cannot read '" + s + "' as a number or n/d");
            return static_cast<double>(x);
        };
        if (slash == std::string::npos) {
            try {
                std::size_t used = 0;
                const double x = std::stod(s, &used);
                if (used == s.size()) return x;
            } catch (const std::exception&) {
            }
            throw InputError(path + ": cannot read '" + s + "' as a number or n/d");
        }
        const double den = to_num(s.substr(slash + 1));
        if (den == 0.0) throw InputError(path + ": zero denominator");
        return to_num(s.substr(0, slash)) / den;
    }
    throw InputError(path + ": expected a number");
}

inline std::string parse_name(const Json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw InputError(path + ": expected a string id");
}

inline std::vector<double> parse_reals(const Json& a, const std::string& path) {
    if (!a.is_array()) throw InputError(path + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(parse_real(a[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Json real_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace detail

inline ElectionInstance instance_from_json(const Json& doc) {
    const std::string root = "$";
    std::vector<std::string> states;
    const Json& js = detail::array_at(doc, "states", root);
    for (std::size_t i = 0; i < js.size(); ++i)
        states.push_back(detail::parse_name(js[i], "$.states[" + std::to_string(i) + "]"));
    std::vector<double> prior = detail::parse_reals(detail::array_at(doc, "prior", root), "$.prior");
    if (prior.size() != states.size())
        throw InputError("$.prior: has " + std::to_string(prior.size()) + " entries for " +
                         std::to_string(states.size()) + " states");
    double sum = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
        if (!(prior[i] >= 0.0)) throw InputError("$.prior[" + std::to_string(i) + "]: negative probability");
        sum += prior[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("$.prior: prior sums to " + format_real(sum));

    const Json& jd = detail::array_at(doc, "districts", root);
    if (jd.empty()) throw InputError("$.districts: empty districts array");
    std::vector<District> districts;
    for (std::size_t d = 0; d < jd.size(); ++d) {
        const std::string dp = "$.districts[" + std::to_string(d) + "]";
        District dist;
        dist.id = jd[d].is_object() && jd[d].contains("id") ? detail::parse_name(jd[d]["id"], dp + ".id")
                                                             : "d" + std::to_string(d);
        const Json& jv = detail::array_at(jd[d], "voters", dp);
        if (jv.empty()) throw InputError(dp + ".voters: district has no voters");
        for (std::size_t r = 0; r < jv.size(); ++r) {
            const std::string vp = dp + ".voters[" + std::to_string(r) + "]";
            Voter v;
            v.id = detail::parse_name(detail::member(jv[r], "id", vp), vp + ".id");
            v.utility_c0 = detail::parse_reals(detail::member(jv[r], "u_c0", vp), vp + ".u_c0");
            v.utility_c1 = detail::parse_reals(detail::member(jv[r], "u_c1", vp), vp + ".u_c1");
            for (const char* key : {"u_c0", "u_c1"}) {
                const auto& u = std::string(key) == "u_c0" ? v.utility_c0 : v.utility_c1;
                if (u.size() != states.size())
                    throw InputError(vp + "." + key + ": has " + std::to_string(u.size()) + " entries for " +
                                     std::to_string(states.size()) + " states");
                for (std::size_t s = 0; s < u.size(); ++s)
                    if (!(u[s] >= 0.0 && u[s] <= 1.0))
                        throw InputError(vp + "." + key + "[" + std::to_string(s) + "]: utility " + format_real(u[s]) +
                                         " outside [0,1]");
            }
            dist.voters.push_back(std::move(v));
        }
        districts.push_back(std::move(dist));
    }
    return ElectionInstance(std::move(states), std::move(prior), std::move(districts));
}

inline ElectionInstance parse_instance(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    return instance_from_json(doc);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

inline ElectionInstance load_instance(const std::string& path) {
    try {
        return parse_instance(read_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline Json instance_to_json(const ElectionInstance& inst) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["states"] = inst.states();
    doc["prior"] = inst.prior();
    Json ds = Json::array();
    for (const auto& d : inst.districts()) {
        Json jd;
        jd["id"] = d.id;
        Json vs = Json::array();
        for (const auto& v : d.voters) vs.push_back({{"id", v.id}, {"u_c0", v.utility_c0}, {"u_c1", v.utility_c1}});
        jd["voters"] = std::move(vs);
        ds.push_back(std::move(jd));
    }
    doc["districts"] = std::move(ds);
    return doc;
}

inline std::string serialize_instance(const ElectionInstance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

// ---- reports -------------------------------------------------------------

inline Json to_json(const LpDiagnostics& d) {
    return {{"status", d.status},           {"iterations", d.iterations}, {"max_violation", d.max_violation},
            {"lp_objective", d.lp_objective}, {"variables", d.variables},   {"constraints", d.constraints}};
}

inline Json to_json(const ElectionInstance& inst, const PrivateSolveReport& rep) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = "private";
    doc["value"] = rep.value;
    doc["states"] = inst.states();
    Json marg = Json::array();
    for (std::size_t r = 0; r < inst.num_voters(); ++r)
        marg.push_back({{"voter", inst.voter(r).id}, {"phi_c0", rep.marginals.phi[r]}});
    doc["marginals"] = std::move(marg);
    doc["district_win_probs"] = rep.district_win_probs;
    doc["aggregate_win_probs"] = rep.aggregate_win_probs;
    doc["lp"] = to_json(rep.lp);
    return doc;
}

inline Json to_json(const PublicScheme& sc) {
    Json sup = Json::array();
    for (const auto& pt : sc.support)
        sup.push_back({{"counts", pt.counts}, {"weight", pt.weight}, {"profile", profile_string(pt.profile)}, {"value", pt.value}});
    return {{"q", sc.q},
            {"epsilon", sc.relax.epsilon},
            {"delta_district", sc.relax.delta_district},
            {"delta_aggregate", sc.relax.delta_aggregate},
            {"support", std::move(sup)}};
}

inline Json to_json(const ElectionInstance& inst, const PublicSolveReport& rep) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = "public";
    doc["value"] = rep.value;
    doc["states"] = inst.states();
    doc["grid_size"] = rep.grid_size;
    doc["grid_winning"] = rep.grid_winning;
    doc["scheme"] = to_json(rep.scheme);
    doc["lp"] = to_json(rep.lp);
    return doc;
}

inline Json to_json(const ElectionInstance& inst, const SemiPublicSolveReport& rep) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = "semipublic";
    doc["value"] = rep.value;
    doc["states"] = inst.states();
    doc["grid_size"] = rep.grid_size;
    Json sc;
    sc["q"] = rep.scheme.q;
    sc["epsilon"] = rep.scheme.epsilon;
    sc["delta"] = rep.scheme.delta;
    Json ds = Json::array();
    for (std::size_t d = 0; d < rep.scheme.districts.size(); ++d) {
        Json sup = Json::array();
        for (const auto& pt : rep.scheme.districts[d].support)
            sup.push_back({{"counts", pt.counts}, {"weight", pt.weight}, {"wins", pt.wins}});
        ds.push_back({{"id", inst.district(d).id}, {"support", std::move(sup)}});
    }
    sc["districts"] = std::move(ds);
    sc["district_win_probs"] = rep.scheme.district_win_probs;
    sc["aggregate_win_probs"] = rep.scheme.aggregate_win_probs;
    doc["scheme"] = std::move(sc);
    doc["lp"] = to_json(rep.lp);
    return doc;
}

inline Json to_json(const StabilityReport& rep) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["mode"] = "stability";
    doc["g"] = to_string(rep.g);
    doc["h"] = to_string(rep.h);
    doc["delta"] = rep.delta;
    doc["beta"] = rep.beta;
    doc["alphas"] = rep.alphas;
    doc["trials"] = rep.trials;
    doc["seed"] = rep.seed;
    doc["worst_ratio"] = detail::real_or_null(rep.worst_ratio);
    doc["violations"] = rep.violations;
    doc["skipped_vacuous"] = rep.skipped_vacuous;
    doc["cells"] = rep.cells.size();
    doc["note"] = rep.note;
    return doc;
}

inline Json to_json(const AuditResult& a) {
    return {{"passed", a.passed}, {"checks", a.checks}, {"worst_slack", a.worst_slack}, {"failures", a.failures}};
}

// ---- reading schemes back for audits ---------------------------------------

inline VoteProfile parse_profile(const std::string& s, const std::string& path) {
    VoteProfile p;
    for (char ch : s) {
        if (ch == '0')
            p.push_back(Candidate::c0);
        else if (ch == '1')
            p.push_back(Candidate::c1);
        else
            throw InputError(path + ": profile must be a string of 0/1");
    }
    return p;
}

inline std::vector<std::uint32_t> parse_counts(const Json& a, std::size_t n, const std::string& path) {
    if (!a.is_array() || a.size() != n) throw InputError(path + ": expected " + std::to_string(n) + " counts");
    std::vector<std::uint32_t> out;
    for (const auto& x : a) {
        if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
            throw InputError(path + ": counts must be nonnegative integers");
        out.push_back(x.get<std::uint32_t>());
    }
    return out;
}

inline PrivateMarginals private_marginals_from_json(const Json& doc, const ElectionInstance& inst) {
    const Json& m = detail::array_at(doc, "marginals", "$");
    if (m.size() != inst.num_voters()) throw InputError("$.marginals: voter count mismatch");
    PrivateMarginals out;
    for (std::size_t r = 0; r < m.size(); ++r) {
        const std::string p = "$.marginals[" + std::to_string(r) + "]";
        out.phi.push_back(detail::parse_reals(detail::member(m[r], "phi_c0", p), p + ".phi_c0"));
        if (out.phi.back().size() != inst.num_states()) throw InputError(p + ".phi_c0: state count mismatch");
    }
    return out;
}

inline PublicScheme public_scheme_from_json(const Json& doc, const ElectionInstance& inst) {
    const Json& sc = detail::member(doc, "scheme", "$");
    PublicScheme out;
    out.q = detail::member(sc, "q", "$.scheme").get<std::uint32_t>();
    out.relax.epsilon = detail::parse_real(detail::member(sc, "epsilon", "$.scheme"), "$.scheme.epsilon");
    out.relax.delta_district = detail::parse_real(detail::member(sc, "delta_district", "$.scheme"), "$.scheme.delta_district");
    out.relax.delta_aggregate =
        detail::parse_real(detail::member(sc, "delta_aggregate", "$.scheme"), "$.scheme.delta_aggregate");
    const Json& sup = detail::array_at(sc, "support", "$.scheme");
    for (std::size_t i = 0; i < sup.size(); ++i) {
        const std::string p = "$.scheme.support[" + std::to_string(i) + "]";
        SupportPoint pt;
        pt.counts = parse_counts(detail::member(sup[i], "counts", p), inst.num_states(), p + ".counts");
        pt.weight = detail::parse_real(detail::member(sup[i], "weight", p), p + ".weight");
        pt.profile = parse_profile(detail::member(sup[i], "profile", p).get<std::string>(), p + ".profile");
        if (pt.profile.size() != inst.num_voters()) throw InputError(p + ".profile: voter count mismatch");
        pt.value = sup[i].value("value", 0);
        out.support.push_back(std::move(pt));
    }
    return out;
}

inline SemiPublicScheme semipublic_scheme_from_json(const Json& doc, const ElectionInstance& inst) {
    const Json& sc = detail::member(doc, "scheme", "$");
    SemiPublicScheme out;
    out.q = detail::member(sc, "q", "$.scheme").get<std::uint32_t>();
    out.epsilon = detail::parse_real(detail::member(sc, "epsilon", "$.scheme"), "$.scheme.epsilon");
    out.delta = detail::parse_real(detail::member(sc, "delta", "$.scheme"), "$.scheme.delta");
    const Json& ds = detail::array_at(sc, "districts", "$.scheme");
    if (ds.size() != inst.num_districts()) throw InputError("$.scheme.districts: district count mismatch");
    for (std::size_t d = 0; d < ds.size(); ++d) {
        const std::string dp = "$.scheme.districts[" + std::to_string(d) + "]";
        DistrictScheme dsc;
        const Json& sup = detail::array_at(ds[d], "support", dp);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            const std::string p = dp + ".support[" + std::to_string(i) + "]";
            DistrictPoint pt;
            pt.counts = parse_counts(detail::member(sup[i], "counts", p), inst.num_states(), p + ".counts");
            pt.weight = detail::parse_real(detail::member(sup[i], "weight", p), p + ".weight");
            pt.wins = detail::member(sup[i], "wins", p).get<bool>();
            dsc.support.push_back(std::move(pt));
        }
        out.districts.push_back(std::move(dsc));
    }
    const Json& a = detail::array_at(sc, "district_win_probs", "$.scheme");
    for (std::size_t d = 0; d < a.size(); ++d)
        out.district_win_probs.push_back(detail::parse_reals(a[d], "$.scheme.district_win_probs[" + std::to_string(d) + "]"));
    out.aggregate_win_probs = detail::parse_reals(detail::array_at(sc, "aggregate_win_probs", "$.scheme"),
                                                  "$.scheme.aggregate_win_probs");
    if (out.district_win_probs.size() != inst.num_districts() || out.aggregate_win_probs.size() != inst.num_states())
        throw InputError("$.scheme: win probability tables do not match the instance");
    return out;
}

// ---- CSV -------------------------------------------------------------------

inline std::string csv_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string counts_field(const std::vector<std::uint32_t>& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ":" : "") + std::to_string(c[i]);
    return s;
}

/// Rows are voters, columns are states.
inline std::string marginals_csv(const ElectionInstance& inst, const PrivateMarginals& m) {
    std::string out = "# format_version " + std::to_string(kFormatVersion) + "\nvoter";
    for (const auto& s : inst.states()) out += "," + s;
    out += "\n";
    for (std::size_t r = 0; r < inst.num_voters(); ++r) {
        out += inst.voter(r).id;
        for (double x : m.phi[r]) out += "," + csv_real(x);
        out += "\n";
    }
    return out;
}

/// Per-state recommendation tables of a direct scheme.
inline std::string direct_scheme_csv(const ElectionInstance& inst, const DirectScheme& direct) {
    std::string out = "# format_version " + std::to_string(kFormatVersion) + "\nstate,profile,probability\n";
    for (std::size_t s = 0; s < direct.per_state.size(); ++s)
        for (const auto& pm : direct.per_state[s])
            out += inst.states()[s] + "," + profile_string(pm.profile) + "," + csv_real(pm.probability) + "\n";
    return out;
}

inline std::string semipublic_posteriors_csv(const ElectionInstance& inst, const SemiPublicScheme& sc) {
    std::string out = "# format_version " + std::to_string(kFormatVersion) + "\ndistrict,counts,weight,wins\n";
    for (std::size_t d = 0; d < sc.districts.size(); ++d)
        for (const auto& pt : sc.districts[d].support)
            out += inst.district(d).id + "," + counts_field(pt.counts) + "," + csv_real(pt.weight) + "," +
                   (pt.wins ? "1" : "0") + "\n";
    return out;
}

/// Simulated draws of the coupled semi-public scheme: state, per-district
/// posterior counts, vote profile and winner.
inline std::string semipublic_trace_csv(const ElectionInstance& inst, const SemiPublicScheme& sc, std::size_t draws,
                                        std::uint64_t seed) {
    std::string out = "# format_version " + std::to_string(kFormatVersion) + "\ndraw,state,posteriors,votes,winner\n";
    CounterRng rng(seed, stream_key({0x7aceULL}));
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = rng.uniform();
        std::size_t theta = 0;
        double acc = 0.0;
        for (std::size_t s = 0; s < inst.num_states(); ++s) {
            acc += inst.prior()[s];
            theta = s;
            if (x < acc && inst.prior()[s] > 0.0) break;
        }
        const auto picks = couple_district_schemes(sc, inst, theta, rng.uniform(), seed);
        const auto profile = profile_from_draws(sc, inst, picks);
        std::string post;
        for (std::size_t d = 0; d < picks.size(); ++d)
            post += (d ? "|" : "") + counts_field(sc.districts[d].support[picks[d].support_index].counts);
        const bool c0_wins = districts_won(inst, profile, sc.delta) >= majority(inst.num_districts());
        out += std::to_string(i) + "," + inst.states()[theta] + "," + post + "," + profile_string(profile) + "," +
               (c0_wins ? "c0" : "c1") + "\n";
    }
    return out;
}

inline std::string stability_csv(const StabilityReport& rep) {
    std::string out = "# format_version " + std::to_string(kFormatVersion) +
                      "\nbase_index,base,alpha,model,mean,std_error,exact_mean,bound,max_corruption,violated\n";
    for (const auto& c : rep.cells)
        out += std::to_string(c.base_index) + "," + c.base + "," + csv_real(c.alpha) + "," + to_string(c.model) + "," +
               csv_real(c.mean) + "," + csv_real(c.std_error) + "," +
               (std::isfinite(c.exact_mean) ? csv_real(c.exact_mean) : std::string()) + "," + csv_real(c.bound) + "," +
               csv_real(c.max_corruption) + "," + (c.violated ? "1" : "0") + "\n";
    return out;
}

}  // namespace persuade
