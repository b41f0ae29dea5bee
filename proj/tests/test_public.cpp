#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "persuade/audit.hpp"
#include "persuade/generate.hpp"
#include "persuade/public_oracle.hpp"
#include "persuade/public_solver.hpp"

using namespace persuade;

TEST(Grid, SizesAndOrder) {
    const auto g = enumerate_q_uniform(2, 2);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g.counts[0], (std::vector<std::uint32_t>{2, 0}));
    EXPECT_EQ(g.counts[1], (std::vector<std::uint32_t>{1, 1}));
    EXPECT_EQ(g.counts[2], (std::vector<std::uint32_t>{0, 2}));
    EXPECT_EQ(enumerate_q_uniform(4, 3).size(), 15u);
    EXPECT_EQ(enumerate_q_uniform(1, 5).size(), 5u);
    EXPECT_EQ(grid_size(12, 4), 455u);
}

TEST(Grid, NoDuplicatesAndAllSumToQ) {
    const auto g = enumerate_q_uniform(7, 4);
    EXPECT_EQ(g.size(), grid_size(7, 4));
    std::set<std::vector<std::uint32_t>> seen(g.counts.begin(), g.counts.end());
    EXPECT_EQ(seen.size(), g.size());
    for (const auto& c : g.counts) {
        std::uint32_t total = 0;
        for (auto x : c) total += x;
        EXPECT_EQ(total, 7u);
    }
}

TEST(Grid, RefusesAboveCap) {
    EXPECT_THROW(enumerate_q_uniform(40, 3, 100), CapExceeded);
    EXPECT_THROW(enumerate_q_uniform(0, 3), InputError);
    EXPECT_THROW(enumerate_q_uniform(2, 0), InputError);
}

TEST(TheoreticalQ, MatchesClosedForm) {
    // 32 ln(4 / (0.3 * 0.09)) / 0.05^2
    const double expected = 32.0 * std::log(4.0 / (0.3 * 0.09)) / 0.0025;
    EXPECT_EQ(theoretical_q(0.3, 1.0 / 0.09, 0.05), static_cast<std::uint64_t>(std::ceil(expected)));
    EXPECT_EQ(theoretical_q(0.5, 0.5, 1.0), static_cast<std::uint64_t>(std::ceil(32.0 * std::log(8.0))));
    EXPECT_THROW(theoretical_q(0.0, 1.0, 0.1), InputError);
}

TEST(Decomposition, DocumentedValues) {
    const auto one = decompose_posterior(Posterior({1.0}), 5);
    ASSERT_EQ(one.parts.size(), 1u);
    EXPECT_DOUBLE_EQ(one.parts[0].weight, 1.0);

    const auto half = decompose_posterior(Posterior({0.5, 0.5}), 2);
    ASSERT_EQ(half.parts.size(), 3u);
    EXPECT_NEAR(half.parts[0].weight, 0.25, 1e-15);
    EXPECT_NEAR(half.parts[1].weight, 0.5, 1e-15);
    EXPECT_NEAR(half.parts[2].weight, 0.25, 1e-15);

    const auto vertex = decompose_posterior(Posterior({1.0, 0.0, 0.0}), 6);
    ASSERT_EQ(vertex.parts.size(), 1u);
    EXPECT_EQ(vertex.parts[0].counts, (std::vector<std::uint32_t>{6, 0, 0}));
    EXPECT_EQ(vertex.residual, 0.0);
}

TEST(Decomposition, BarycenterIsThePosterior) {
    CounterRng rng(31);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 2 + rng.below(3);
        std::vector<double> p(n);
        double total = 0.0;
        for (auto& x : p) total += (x = rng.uniform());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) acc += (p[i] /= total);
        p[n - 1] = 1.0 - acc;
        const auto q = static_cast<std::uint32_t>(2 + rng.below(11));
        const auto dec = decompose_posterior(Posterior(p), q);
        EXPECT_LE(dec.residual, 1e-9);
        double w = 0.0;
        for (const auto& part : dec.parts) w += part.weight;
        EXPECT_NEAR(w, 1.0, 1e-12);
    }
}

TEST(PublicSolver, SingleVoterSplitsThePrior) {
    const auto inst = single_voter_instance();
    const auto rep = solve_public(inst, 2, {});
    EXPECT_NEAR(rep.value, 0.6, 1e-9);
    ASSERT_EQ(rep.scheme.support.size(), 2u);
    for (const auto& pt : rep.scheme.support) {
        if (pt.counts == std::vector<std::uint32_t>{1, 1})
            EXPECT_NEAR(pt.weight, 0.6, 1e-9);
        else if (pt.counts == std::vector<std::uint32_t>{0, 2})
            EXPECT_NEAR(pt.weight, 0.4, 1e-9);
        else
            ADD_FAILURE() << "unexpected support point";
    }
    // recovery: in the first state the winning profile is always recommended
    const auto direct = recover_direct_scheme(rep.scheme, inst);
    ASSERT_EQ(direct.per_state[0].size(), 1u);
    EXPECT_EQ(profile_string(direct.per_state[0][0].profile), "0");
    EXPECT_NEAR(direct.per_state[0][0].probability, 1.0, 1e-9);
    EXPECT_TRUE(audit_direct_scheme(inst, direct).passed);
}

TEST(PublicSolver, WinningPriorIsAPointMass) {
    District d{"d", {{"a", {1.0, 0.5}, {0.0, 0.5}}, {"b", {0.6, 0.5}, {0.4, 0.5}}, {"c", {0.0, 0.0}, {1.0, 1.0}}}};
    const ElectionInstance inst({"x", "y"}, {0.5, 0.5}, {d});
    const auto rep = solve_public(inst, 4, {});
    EXPECT_NEAR(rep.value, 1.0, 1e-12);
    const auto direct = recover_direct_scheme(rep.scheme, inst);
    for (const auto& per : direct.per_state) {
        ASSERT_EQ(per.size(), 1u);
        EXPECT_EQ(profile_string(per[0].profile), "001");
    }
}

TEST(PublicSolver, Example1IsHopeless) {
    const auto inst = example1_instance();
    for (std::uint32_t q : {2u, 4u, 6u, 9u}) EXPECT_NEAR(solve_public(inst, q, {}).value, 0.0, 1e-9) << q;
}

TEST(PublicSolver, MergesProfilesWithTheSameRecommendation) {
    // both states produce the same best response for most posteriors
    District d{"d", {{"a", {1.0, 1.0}, {0.0, 0.0}}}};
    const ElectionInstance inst({"x", "y"}, {0.5, 0.5}, {d});
    PublicScheme sc{4, {}, {}};
    sc.support.push_back({{3, 1}, 0.5, {Candidate::c0}, 1});
    sc.support.push_back({{1, 3}, 0.5, {Candidate::c0}, 1});
    const auto direct = recover_direct_scheme(sc, inst);
    ASSERT_EQ(direct.per_state[0].size(), 1u);
    EXPECT_NEAR(direct.per_state[0][0].probability, 1.0, 1e-12);
}

TEST(PublicSolver, ZeroPriorStateWithMassIsInconsistent) {
    District d{"d", {{"a", {1.0, 1.0}, {0.0, 0.0}}}};
    const ElectionInstance inst({"x", "y"}, {1.0, 0.0}, {d});
    PublicScheme sc{2, {}, {}};
    sc.support.push_back({{1, 1}, 1.0, {Candidate::c0}, 1});
    EXPECT_THROW(recover_direct_scheme(sc, inst), InconsistencyError);
}

TEST(PublicSolver, SchemesPassTheIndependentAudit) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto inst = generate_instance({2 + seed % 2, 1 + seed % 3, 3, seed, InstanceFamily::threshold_adversarial});
        const RelaxationParams relax{0.2, 0.2, 0.05 * static_cast<double>(seed % 3)};
        const auto rep = solve_public(inst, 6, relax);
        const auto audit = audit_public_scheme(inst, rep.scheme);
        EXPECT_TRUE(audit.passed) << "seed " << seed << ": " << (audit.failures.empty() ? "" : audit.failures[0]);
        EXPECT_LE(bayes_residual(rep.scheme.support, rep.scheme.q, inst.prior()), 1e-7);
        EXPECT_TRUE(audit_direct_scheme(inst, recover_direct_scheme(rep.scheme, inst)).passed);
    }
}

TEST(PublicSolver, MonotoneAlongDivisibleGrids) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = generate_instance({2, 1, 5, seed, InstanceFamily::uniform_random});
        const double v2 = solve_public(inst, 2, {}).value;
        const double v4 = solve_public(inst, 4, {}).value;
        const double v8 = solve_public(inst, 8, {}).value;
        EXPECT_LE(v2, v4 + 1e-9);
        EXPECT_LE(v4, v8 + 1e-9);
    }
}

TEST(PublicSolver, MonotoneInRelaxations) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto inst = generate_instance({3, 3, 3, seed, InstanceFamily::threshold_adversarial});
        double prev = -1.0;
        for (double x : {0.0, 0.1, 0.3}) {
            const double v = solve_public(inst, 4, {x, x, x}).value;
            EXPECT_GE(v, prev - 1e-9);
            prev = v;
        }
    }
}

TEST(PublicOracle, DocumentedValues) {
    EXPECT_NEAR(exact_public_oracle(example1_instance()), 0.0, 1e-9);
    EXPECT_NEAR(exact_public_oracle(single_voter_instance()), 0.6, 1e-9);
    District d{"d", {{"a", {1.0, 0.5}, {0.0, 0.5}}}};
    EXPECT_NEAR(exact_public_oracle(ElectionInstance({"x", "y"}, {0.5, 0.5}, {d})), 1.0, 1e-9);
}

TEST(PublicOracle, RefusesLargeInstances) {
    EXPECT_THROW(exact_public_oracle(generate_instance({4, 1, 3, 1, InstanceFamily::uniform_random})), CapExceeded);
    EXPECT_THROW(exact_public_oracle(generate_instance({2, 1, 25, 1, InstanceFamily::uniform_random})), CapExceeded);
}

TEST(PublicOracle, BoundsEveryGridAndIsApproached) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t states = 2 + seed % 2;
        const auto inst = generate_instance({states, 1, 5, seed, InstanceFamily::threshold_adversarial});
        const double oracle = exact_public_oracle(inst);
        double prev = 0.0;
        for (std::uint32_t q : {2u, 4u, 8u, 16u}) {
            const double v = solve_public(inst, q, {}).value;
            EXPECT_LE(v, oracle + 1e-6) << "seed " << seed << " q " << q;
            EXPECT_GE(v, prev - 1e-9);
            prev = v;
        }
    }
}
