#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "persuade/audit.hpp"
#include "persuade/generate.hpp"
#include "persuade/io.hpp"

using namespace persuade;

namespace {

std::string data_path(const std::string& name) { return std::string(PERSUADE_DATA_DIR) + "/" + name; }

std::string error_of(const std::string& text) {
    try {
        parse_instance(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

void expect_same(const ElectionInstance& a, const ElectionInstance& b) {
    ASSERT_EQ(a.states(), b.states());
    ASSERT_EQ(a.prior(), b.prior());
    ASSERT_EQ(a.num_districts(), b.num_districts());
    for (std::size_t d = 0; d < a.num_districts(); ++d) {
        EXPECT_EQ(a.district(d).id, b.district(d).id);
        ASSERT_EQ(a.district_size(d), b.district_size(d));
    }
    for (std::size_t r = 0; r < a.num_voters(); ++r) {
        EXPECT_EQ(a.voter(r).id, b.voter(r).id);
        EXPECT_EQ(a.voter(r).utility_c0, b.voter(r).utility_c0);
        EXPECT_EQ(a.voter(r).utility_c1, b.voter(r).utility_c1);
    }
}

const char* kTwoStates = R"({"states": ["a", "b"], "prior": [0.25, 0.75],
  "districts": [{"id": "d", "voters": [{"id": "r", "u_c0": [1, 0], "u_c1": [0, 1]}]}]})";

}  // namespace

TEST(InstanceFile, BundledExampleMatchesTheGenerator) {
    const auto file = load_instance(data_path("example1.json"));
    expect_same(file, example1_instance());
    EXPECT_EQ(file.num_voters(), 7u);
    EXPECT_EQ(file.num_states(), 3u);
    for (double p : file.prior()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(InstanceFile, BadPriorNamesTheSum) {
    EXPECT_NE(error_of(read_file(data_path("bad_prior.json"))).find("prior sums to 1.1"), std::string::npos);
    try {
        load_instance(data_path("bad_prior.json"));
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("bad_prior.json"), std::string::npos);
    }
}

TEST(InstanceFile, ErrorsCarryJsonPaths) {
    EXPECT_NE(error_of(R"({"states": ["a"], "prior": [1], "districts": []})").find("$.districts: empty districts array"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"states": ["a"], "prior": [1], "districts": [{"voters": [{"id": "r", "u_c0": [1.5], "u_c1": [0]}]}]})")
                  .find("$.districts[0].voters[0].u_c0[0]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"states": ["a", "b"], "prior": [0.5, 0.5], "districts": [{"voters": [{"id": "r", "u_c0": [1], "u_c1": [0, 1]}]}]})")
                  .find("$.districts[0].voters[0].u_c0: has 1 entries"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"states": ["a"], "prior": [1]})").find("$.districts: missing"), std::string::npos);
    EXPECT_NE(error_of(R"({"states": ["a"], "prior": [0.5, 0.5], "districts": []})").find("$.prior: has 2 entries"),
              std::string::npos);
    EXPECT_NE(error_of("{not json").find("malformed JSON"), std::string::npos);
    EXPECT_NE(error_of(R"({"states": ["a"], "prior": ["x/y"], "districts": []})").find("$.prior[0]"), std::string::npos);
}

TEST(InstanceFile, AcceptsRationalStrings) {
    const auto inst = parse_instance(R"({"states": ["a", "b", "c"], "prior": ["1/3", "1/3", "1/3"],
      "districts": [{"id": "d", "voters": [{"id": "r", "u_c0": ["3/4", 0, "0.5"], "u_c1": ["1/4", 1, 0.5]}]}]})");
    EXPECT_DOUBLE_EQ(inst.prior()[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(inst.net_utility(0, 0), 0.5);
    EXPECT_THROW(parse_instance(R"({"states": ["a"], "prior": ["1/0"], "districts": []})"), InputError);
}

TEST(InstanceFile, RoundTripIsExact) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto family = static_cast<InstanceFamily>(seed % 3);
        const auto inst = generate_instance({1 + seed % 4, 1 + seed % 3, 1 + seed % 5, seed, family});
        const std::string text = serialize_instance(inst);
        const auto back = parse_instance(text);
        expect_same(inst, back);
        EXPECT_EQ(serialize_instance(back), text);
    }
    const auto two = parse_instance(kTwoStates);
    expect_same(two, parse_instance(serialize_instance(two)));
    EXPECT_NE(serialize_instance(two).find("\"format_version\": 1"), std::string::npos);
}

TEST(Generator, DeterministicInSeed) {
    for (auto family : {InstanceFamily::uniform_random, InstanceFamily::threshold_adversarial}) {
        const GeneratorSpec spec{3, 2, 4, 99, family};
        EXPECT_EQ(serialize_instance(generate_instance(spec)), serialize_instance(generate_instance(spec)));
        GeneratorSpec other = spec;
        other.seed = 100;
        EXPECT_NE(serialize_instance(generate_instance(spec)), serialize_instance(generate_instance(other)));
    }
    EXPECT_EQ(serialize_instance(generate_instance({9, 9, 9, 1, InstanceFamily::example1})),
              serialize_instance(example1_instance()));
}

TEST(Generator, UniformRandomIsValid) {
    const auto inst = generate_instance({2, 1, 5, 12, InstanceFamily::uniform_random});
    EXPECT_EQ(inst.num_states(), 2u);
    EXPECT_EQ(inst.num_voters(), 5u);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t s = 0; s < 2; ++s) {
            EXPECT_GE(inst.voter(r).utility_c0[s], 0.0);
            EXPECT_LE(inst.voter(r).utility_c1[s], 1.0);
        }
    EXPECT_EQ(parse_family("threshold-adversarial"), InstanceFamily::threshold_adversarial);
    EXPECT_THROW(parse_family("nope"), InputError);
    EXPECT_THROW(generate_instance({0, 1, 1, 1, InstanceFamily::uniform_random}), InputError);
}

TEST(Reports, SchemesSurviveJsonRoundTrip) {
    const auto inst = generate_instance({2, 3, 3, 6, InstanceFamily::threshold_adversarial});

    const auto pub = solve_public(inst, 4, {0.1, 0.1, 0.05});
    const auto pub_back = public_scheme_from_json(Json::parse(to_json(inst, pub).dump()), inst);
    ASSERT_EQ(pub_back.support.size(), pub.scheme.support.size());
    EXPECT_EQ(pub_back.relax.epsilon, 0.05);
    for (std::size_t i = 0; i < pub_back.support.size(); ++i) {
        EXPECT_EQ(pub_back.support[i].counts, pub.scheme.support[i].counts);
        EXPECT_EQ(pub_back.support[i].weight, pub.scheme.support[i].weight);
        EXPECT_EQ(pub_back.support[i].profile, pub.scheme.support[i].profile);
    }
    EXPECT_TRUE(audit_public_scheme(inst, pub_back).passed);

    const auto semi = solve_semipublic(inst, 4, 0.0, 0.2);
    const auto semi_back = semipublic_scheme_from_json(Json::parse(to_json(inst, semi).dump()), inst);
    EXPECT_EQ(semi_back.district_win_probs, semi.scheme.district_win_probs);
    EXPECT_EQ(semi_back.aggregate_win_probs, semi.scheme.aggregate_win_probs);
    EXPECT_TRUE(audit_semipublic_scheme(inst, semi_back).passed);

    const auto priv = solve_private(inst);
    const auto doc = to_json(inst, priv);
    EXPECT_EQ(doc["format_version"], 1);
    EXPECT_EQ(private_marginals_from_json(Json::parse(doc.dump()), inst).phi, priv.marginals.phi);
}

TEST(Reports, CsvTablesAreVersioned) {
    const auto inst = example1_instance();
    const auto priv = solve_private(inst);
    const std::string marg = marginals_csv(inst, priv.marginals);
    EXPECT_EQ(marg.rfind("# format_version 1\nvoter,theta_A,theta_B,theta_C\n", 0), 0u);
    const auto semi = solve_semipublic(inst, 2, 0.0, 0.0);
    EXPECT_EQ(semipublic_posteriors_csv(inst, semi.scheme).rfind("# format_version 1\ndistrict,counts,weight,wins\n", 0), 0u);
    const std::string trace = semipublic_trace_csv(inst, semi.scheme, 5, 1);
    EXPECT_EQ(trace.rfind("# format_version 1\ndraw,state,posteriors,votes,winner\n", 0), 0u);
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 7);
    EXPECT_EQ(trace, semipublic_trace_csv(inst, semi.scheme, 5, 1));
    EXPECT_EQ(counts_field({3, 0, 1}), "3:0:1");
    EXPECT_EQ(csv_real(0.1), "0.10000000000000001");
}

TEST(Reports, ProfilesAndCountsAreValidated) {
    EXPECT_EQ(profile_string(parse_profile("0110", "$")), "0110");
    EXPECT_THROW(parse_profile("01x", "$"), InputError);
    EXPECT_THROW(parse_counts(Json::parse("[1, -1]"), 2, "$"), InputError);
    EXPECT_THROW(parse_counts(Json::parse("[1]"), 2, "$"), InputError);
}
