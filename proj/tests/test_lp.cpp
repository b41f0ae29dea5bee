#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "persuade/lp.hpp"
#include "persuade/random.hpp"

using namespace persuade;
using namespace persuade::lp;

TEST(Simplex, SmallTextbookProblem) {
    LpModel m;
    const int x = m.add_variable("x"), y = m.add_variable("y");
    m.set_objective_coef(x, 1.0);
    m.set_objective_coef(y, 1.0);
    m.add_constraint({{x, 1.0}, {y, 2.0}}, Sense::le, 4.0);
    m.add_constraint({{x, 3.0}, {y, 1.0}}, Sense::le, 6.0);
    const auto sol = solve_lp(m);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, 2.8, 1e-12);
    EXPECT_NEAR(sol.x[0], 1.6, 1e-12);
    EXPECT_NEAR(sol.x[1], 1.2, 1e-12);
}

TEST(Simplex, ReportsInfeasible) {
    LpModel m;
    const int x = m.add_variable("x");
    m.add_constraint({{x, 1.0}}, Sense::ge, 2.0);
    m.add_constraint({{x, 1.0}}, Sense::le, 1.0);
    EXPECT_EQ(solve_lp(m).status, Status::infeasible);
}

TEST(Simplex, ReportsUnbounded) {
    LpModel m;
    const int x = m.add_variable("x");
    const int y = m.add_variable("y");
    m.set_objective_coef(x, 1.0);
    m.add_constraint({{x, 1.0}, {y, -1.0}}, Sense::le, 1.0);
    EXPECT_EQ(solve_lp(m).status, Status::unbounded);
}

TEST(Simplex, HandlesShiftedMirroredAndFreeVariables) {
    LpModel m;
    const int a = m.add_variable("a", -3.0, kInf);   // shifted
    const int b = m.add_variable("b", -kInf, 5.0);   // mirrored
    const int c = m.add_variable("c", -kInf, kInf);  // split
    m.set_objective_coef(a, -1.0);
    m.set_objective_coef(b, 1.0);
    m.set_objective_coef(c, 1.0);
    m.add_constraint({{c, 1.0}, {b, 1.0}}, Sense::eq, 2.0);
    const auto sol = solve_lp(m);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, 3.0 + 2.0, 1e-12);
    EXPECT_NEAR(sol.x[static_cast<std::size_t>(a)], -3.0, 1e-12);
}

TEST(Simplex, EqualityWithNegativeRhs) {
    LpModel m;
    const int x = m.add_variable("x", -10.0, 10.0);
    const int y = m.add_variable("y", 0.0, 1.0);
    m.set_objective_coef(x, 1.0);
    m.add_constraint({{x, 1.0}, {y, 1.0}}, Sense::eq, -2.0);
    const auto sol = solve_lp(m);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, -2.0, 1e-12);
}

TEST(Simplex, BealeCyclingExampleTerminates) {
    // classic instance on which textbook Dantzig pricing cycles
    LpModel m;
    std::vector<int> x;
    for (int i = 0; i < 4; ++i) x.push_back(m.add_variable("x" + std::to_string(i)));
    m.set_objective_coef(x[0], 0.75);
    m.set_objective_coef(x[1], -150.0);
    m.set_objective_coef(x[2], 0.02);
    m.set_objective_coef(x[3], -6.0);
    m.add_constraint({{x[0], 0.25}, {x[1], -60.0}, {x[2], -0.04}, {x[3], 9.0}}, Sense::le, 0.0);
    m.add_constraint({{x[0], 0.5}, {x[1], -90.0}, {x[2], -0.02}, {x[3], 3.0}}, Sense::le, 0.0);
    m.add_constraint({{x[2], 1.0}}, Sense::le, 1.0);
    const auto sol = solve_lp(m);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, 0.05, 1e-9);
}

TEST(Simplex, RedundantEqualityRows) {
    LpModel m;
    const int x = m.add_variable("x"), y = m.add_variable("y");
    m.set_objective_coef(x, 2.0);
    m.set_objective_coef(y, 1.0);
    m.add_constraint({{x, 1.0}, {y, 1.0}}, Sense::eq, 1.0);
    m.add_constraint({{x, 2.0}, {y, 2.0}}, Sense::eq, 2.0);
    const auto sol = solve_lp(m);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, 2.0, 1e-12);
}

namespace {

/// Brute force over the vertices of a 2-variable polygon: every pairwise
/// intersection of constraint and bound lines that is feasible.
double brute_force_2d(const LpModel& m) {
    struct Line {
        double a, b, c;  // a x + b y = c
    };
    std::vector<Line> lines;
    for (const auto& con : m.constraints()) {
        double a = 0, b = 0;
        for (const auto& t : con.terms) (t.var == 0 ? a : b) += t.coef;
        lines.push_back({a, b, con.rhs});
    }
    for (int j = 0; j < 2; ++j) {
        const auto& v = m.variables()[static_cast<std::size_t>(j)];
        lines.push_back({j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, v.lo});
        lines.push_back({j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, v.hi});
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t k = i + 1; k < lines.size(); ++k) {
            const auto& p = lines[i];
            const auto& q = lines[k];
            const double det = p.a * q.b - p.b * q.a;
            if (std::abs(det) < 1e-12) continue;
            const std::vector<double> x{(p.c * q.b - p.b * q.c) / det, (p.a * q.c - p.c * q.a) / det};
            if (m.max_violation(x) > 1e-9) continue;
            best = std::max(best, m.objective_value(x));
        }
    return best;
}

}  // namespace

TEST(Simplex, MatchesVertexEnumerationOnRandomBoxedProblems) {
    CounterRng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        LpModel m;
        const int x = m.add_variable("x", -5.0 + 2.0 * rng.uniform(), 3.0 + 2.0 * rng.uniform());
        const int y = m.add_variable("y", -5.0 + 2.0 * rng.uniform(), 3.0 + 2.0 * rng.uniform());
        m.set_objective_coef(x, 2.0 * rng.uniform() - 1.0);
        m.set_objective_coef(y, 2.0 * rng.uniform() - 1.0);
        const int rows = 1 + static_cast<int>(rng.below(4));
        for (int r = 0; r < rows; ++r) {
            const Sense s = rng.bernoulli(0.5) ? Sense::le : Sense::ge;
            m.add_constraint({{x, 2.0 * rng.uniform() - 1.0}, {y, 2.0 * rng.uniform() - 1.0}}, s,
                             2.0 * rng.uniform() - 1.0);
        }
        const double expected = brute_force_2d(m);
        const auto sol = solve_lp(m);
        if (std::isinf(expected)) {
            EXPECT_EQ(sol.status, Status::infeasible) << "trial " << trial;
            continue;
        }
        ASSERT_TRUE(sol.optimal()) << "trial " << trial << " " << to_string(sol.status);
        EXPECT_NEAR(sol.objective, expected, 1e-8) << "trial " << trial;
        EXPECT_LE(m.max_violation(sol.x), 1e-7);
    }
}

TEST(Simplex, ResolveIsDeterministic) {
    CounterRng rng(7);
    LpModel m;
    std::vector<int> v;
    for (int i = 0; i < 12; ++i) {
        v.push_back(m.add_variable("v" + std::to_string(i), 0.0, 1.0));
        m.set_objective_coef(v.back(), rng.uniform());
    }
    for (int r = 0; r < 8; ++r) {
        std::vector<Term> row;
        for (int i = 0; i < 12; ++i) row.push_back({v[static_cast<std::size_t>(i)], rng.uniform()});
        m.add_constraint(std::move(row), Sense::le, 2.0);
    }
    const auto a = solve_lp(m), b = solve_lp(m);
    ASSERT_TRUE(a.optimal());
    EXPECT_NEAR(a.objective, b.objective, 1e-9);
    EXPECT_EQ(a.x, b.x);
}

TEST(LpText, HasStableSections) {
    LpModel m;
    const int x = m.add_variable("x", 0.0, 1.0);
    const int z = m.add_variable("z", -kInf, 0.0);
    m.set_objective_coef(x, 0.5);
    m.add_constraint({{x, 1.0}, {z, -2.0}}, Sense::ge, 0.25, "row1");
    const std::string text = m.to_lp_text();
    EXPECT_EQ(text.rfind("\\ persuade-lp format_version 1", 0), 0u);
    for (const char* section : {"Maximize", "Subject To", "Bounds", "End"})
        EXPECT_NE(text.find(section), std::string::npos) << section;
    EXPECT_NE(text.find("row1:"), std::string::npos);
}
