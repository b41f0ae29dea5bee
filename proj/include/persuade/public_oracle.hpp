#pragma once

// Exact optimal persuasive public value for |Theta| <= 3.
//
// The sender's value is constant on the cells of the arrangement of voter
// indifference hyperplanes {p : sum_theta p_theta u_r(theta) = 0} inside
// the simplex. With ties resolved toward c0 and a vote-monotone objective,
// the value at a cell's vertex is at least the value inside the cell, so an
// optimal distribution over posteriors supported on arrangement vertices
// exists. The oracle enumerates those vertices and solves the
// Bayes-plausibility LP over them.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "persuade/election.hpp"
#include "persuade/lp.hpp"

namespace persuade {

inline constexpr std::size_t kPublicOracleStateCap = 3;
inline constexpr std::size_t kPublicOracleVoterCap = 24;

namespace detail {

inline void add_vertex(std::vector<std::vector<double>>& out, std::vector<double> p) {
    double sum = 0.0;
    for (double& x : p) {
        if (x < -1e-9) return;
        x = std::max(0.0, x);
        sum += x;
    }
    if (sum <= 0.0) return;
    for (double& x : p) x /= sum;
    for (const auto& v : out) {
        double diff = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) diff = std::max(diff, std::abs(v[i] - p[i]));
        if (diff <= 1e-9) return;
    }
    out.push_back(std::move(p));
}

/// Solve [a; b; 1 1 1] p = [0; 0; 1] by Cramer's rule.
inline std::optional<std::array<double, 3>> intersect3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const std::array<std::array<double, 3>, 3> m{a, b, std::array<double, 3>{1.0, 1.0, 1.0}};
    auto det = [](const std::array<std::array<double, 3>, 3>& x) {
        return x[0][0] * (x[1][1] * x[2][2] - x[1][2] * x[2][1]) - x[0][1] * (x[1][0] * x[2][2] - x[1][2] * x[2][0]) +
               x[0][2] * (x[1][0] * x[2][1] - x[1][1] * x[2][0]);
    };
    const double d = det(m);
    if (std::abs(d) < 1e-12) return std::nullopt;
    std::array<double, 3> p{};
    for (std::size_t c = 0; c < 3; ++c) {
        auto mc = m;
        for (std::size_t r = 0; r < 3; ++r) mc[r][c] = (r == 2) ? 1.0 : 0.0;
        p[c] = det(mc) / d;
    }
    return p;
}

}  // namespace detail

/// Vertices of the indifference arrangement restricted to the simplex.
inline std::vector<std::vector<double>> arrangement_vertices(const ElectionInstance& inst) {
    const std::size_t S = inst.num_states();
    std::vector<std::vector<double>> out;
    if (S == 1) {
        out.push_back({1.0});
        return out;
    }
    if (S == 2) {
        detail::add_vertex(out, {1.0, 0.0});
        detail::add_vertex(out, {0.0, 1.0});
        for (std::size_t r = 0; r < inst.num_voters(); ++r) {
            const double u1 = inst.voter(r).net(0), u2 = inst.voter(r).net(1);
            if (u1 == u2) continue;
            const double p1 = -u2 / (u1 - u2);
            if (p1 >= 0.0 && p1 <= 1.0) detail::add_vertex(out, {p1, 1.0 - p1});
        }
        return out;
    }
    // S == 3: facets p_i = 0 plus one hyperplane per voter
    std::vector<std::array<double, 3>> normals{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (std::size_t r = 0; r < inst.num_voters(); ++r) {
        std::array<double, 3> n{inst.voter(r).net(0), inst.voter(r).net(1), inst.voter(r).net(2)};
        if (n[0] == 0.0 && n[1] == 0.0 && n[2] == 0.0) continue;
        normals.push_back(n);
    }
    for (std::size_t i = 0; i < normals.size(); ++i)
        for (std::size_t j = i + 1; j < normals.size(); ++j)
            if (auto p = detail::intersect3(normals[i], normals[j])) detail::add_vertex(out, {(*p)[0], (*p)[1], (*p)[2]});
    return out;
}

/// Unrelaxed value at a computed vertex; indifference is judged with a
/// tolerance that absorbs the vertex's own round-off.
inline int vertex_value(const ElectionInstance& inst, const std::vector<double>& p) {
    VoteProfile profile(inst.num_voters());
    for (std::size_t r = 0; r < inst.num_voters(); ++r) {
        double acc = 0.0;
        for (std::size_t s = 0; s < inst.num_states(); ++s) acc += p[s] * inst.voter(r).net(s);
        profile[r] = acc >= -1e-9 ? Candidate::c0 : Candidate::c1;
    }
    return eval_election(inst, profile, {});
}

inline double exact_public_oracle(const ElectionInstance& inst) {
    if (inst.num_states() > kPublicOracleStateCap)
        throw CapExceeded("exact public oracle supports at most 3 states; instance has " +
                          std::to_string(inst.num_states()));
    if (inst.num_voters() > kPublicOracleVoterCap)
        throw CapExceeded("exact public oracle supports at most 24 voters; instance has " +
                          std::to_string(inst.num_voters()));
    const auto verts = arrangement_vertices(inst);
    lp::LpModel m;
    std::vector<int> var(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) {
        var[i] = m.add_variable("v_" + std::to_string(i));
        m.set_objective_coef(var[i], vertex_value(inst, verts[i]));
    }
    for (std::size_t s = 0; s < inst.num_states(); ++s) {
        std::vector<lp::Term> row;
        for (std::size_t i = 0; i < verts.size(); ++i)
            if (verts[i][s] != 0.0) row.push_back({var[i], verts[i][s]});
        m.add_constraint(std::move(row), lp::Sense::eq, inst.prior()[s], "bayes_" + std::to_string(s));
    }
    const auto sol = lp::solve_lp(m);
    if (!sol.optimal()) throw NumericalFailure(std::string("public oracle LP: ") + lp::to_string(sol.status));
    return std::clamp(sol.objective, 0.0, 1.0);
}

}  // namespace persuade
