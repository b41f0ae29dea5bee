// Command-line front end: solve, oracle, stability, generate, audit.
//
// Exit codes: 0 ok, 1 audit failed, 2 bad input, 3 cap refusal,
// 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "persuade/persuade.hpp"

namespace fs = std::filesystem;
using namespace persuade;

namespace {

struct Options {
    std::string instance;
    std::string mode = "private";
    std::uint32_t q = 6;
    double epsilon = 0.0;
    double delta_district = 0.0;
    double delta_aggregate = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t cap = kDefaultGridCap;
    std::size_t trace = 1000;

    // stability
    std::string g = "W_delta";
    double delta = 0.2;
    double beta = 0.0;
    std::vector<double> alphas{0.02, 0.05, 0.1};
    std::size_t trials = 10000;
    bool negative_control = false;

    // generate
    std::string family = "uniform-random";
    std::size_t states = 2, districts = 1, voters = 5;

    // audit
    std::string report;
};

void print_value(double v) { std::printf("value %.6f\n", v); }

void emit(const Options& o, const std::string& name, const std::string& text) {
    if (o.out.empty()) return;
    fs::create_directories(o.out);
    write_file((fs::path(o.out) / name).string(), text);
}

void run_solve(const Options& o) {
    const ElectionInstance inst = load_instance(o.instance);
    const RelaxationParams relax{o.delta_district, o.delta_aggregate, o.epsilon};
    if (o.mode == "private") {
        const auto rep = solve_private(inst);
        print_value(rep.value);
        emit(o, "report.json", to_json(inst, rep).dump(2) + "\n");
        emit(o, "marginals.csv", marginals_csv(inst, rep.marginals));
    } else if (o.mode == "public") {
        const auto rep = solve_public(inst, o.q, relax, o.cap);
        print_value(rep.value);
        std::printf("grid %zu posteriors, %zu winning, support %zu\n", rep.grid_size, rep.grid_winning,
                    rep.scheme.support.size());
        if (o.eta > 0.0 && o.epsilon > 0.0) {
            const double dd = o.delta_district * o.delta_aggregate;
            std::printf("theoretical q %llu\n",
                        static_cast<unsigned long long>(theoretical_q(o.eta, dd > 0.0 ? 1.0 / dd : 1.0, o.epsilon)));
        }
        emit(o, "report.json", to_json(inst, rep).dump(2) + "\n");
        emit(o, "signals.csv", direct_scheme_csv(inst, recover_direct_scheme(rep.scheme, inst)));
    } else if (o.mode == "semipublic") {
        const auto rep = solve_semipublic(inst, o.q, o.epsilon, o.delta_district, o.cap);
        print_value(rep.value);
        emit(o, "report.json", to_json(inst, rep).dump(2) + "\n");
        emit(o, "district_posteriors.csv", semipublic_posteriors_csv(inst, rep.scheme));
        emit(o, "trace.csv", semipublic_trace_csv(inst, rep.scheme, o.trace, o.seed));
    } else if (o.mode == "oracle-private") {
        print_value(exact_private_oracle(inst));
    } else if (o.mode == "oracle-public") {
        print_value(exact_public_oracle(inst));
    } else {
        throw InputError("unknown solve mode '" + o.mode +
                         "' (private, public, semipublic, oracle-private, oracle-public)");
    }
}

void run_oracle(const Options& o) {
    const ElectionInstance inst = load_instance(o.instance);
    if (o.mode == "private" || o.mode == "oracle-private")
        print_value(exact_private_oracle(inst));
    else if (o.mode == "public" || o.mode == "oracle-public")
        print_value(exact_public_oracle(inst));
    else
        throw InputError("oracle mode must be private or public");
}

void run_stability(const Options& o) {
    const ElectionInstance inst = load_instance(o.instance);
    const RuleTag g = parse_rule_tag(o.g);
    if (g == RuleTag::w) throw InputError("g must be a relaxed rule (W_delta or W_delta_delta)");
    if (!(o.delta > 0.0 && o.delta < 1.0)) throw InputError("delta must lie in (0,1)");
    double beta = o.beta;
    if (beta <= 0.0) beta = g == RuleTag::w_delta ? 1.0 / o.delta : 1.0 / (o.delta * o.delta);
    const StabilityReport rep = o.negative_control
                                    ? stability_negative_control(inst, g, o.delta, beta, o.alphas, o.trials, o.seed)
                                    : check_comparative_stability(inst, g, RuleTag::w, o.delta, beta, o.alphas,
                                                                  o.trials, o.seed);
    std::printf("cells %zu violations %zu worst E[g] %.6f (beta %.6g, seed %llu)\n", rep.cells.size(), rep.violations,
                rep.worst_ratio, rep.beta, static_cast<unsigned long long>(rep.seed));
    emit(o, "stability.json", to_json(rep).dump(2) + "\n");
    emit(o, "stability_cells.csv", stability_csv(rep));
}

void run_generate(const Options& o) {
    GeneratorSpec spec{o.states, o.districts, o.voters, o.seed, parse_family(o.family)};
    const std::string text = serialize_instance(generate_instance(spec));
    if (o.out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_file(o.out, text);
}

int run_audit(const Options& o) {
    const ElectionInstance inst = load_instance(o.instance);
    Json doc;
    try {
        doc = Json::parse(read_file(o.report));
    } catch (const Json::parse_error& e) {
        throw InputError(o.report + ": malformed JSON: " + e.what());
    }
    const std::string mode = doc.value("mode", "");
    AuditResult res;
    if (mode == "private") {
        res = audit_private_marginals(inst, private_marginals_from_json(doc, inst));
    } else if (mode == "public") {
        const auto sc = public_scheme_from_json(doc, inst);
        res = audit_public_scheme(inst, sc);
        res.merge(audit_direct_scheme(inst, recover_direct_scheme(sc, inst)));
    } else if (mode == "semipublic") {
        res = audit_semipublic_scheme(inst, semipublic_scheme_from_json(doc, inst));
    } else {
        throw InputError(o.report + ": report mode '" + mode + "' cannot be audited");
    }
    std::printf("audit %s: %zu checks, worst slack %.3g\n", res.passed ? "passed" : "FAILED", res.checks,
                res.worst_slack);
    for (const auto& f : res.failures) std::printf("  %s\n", f.c_str());
    emit(o, "audit.json", to_json(res).dump(2) + "\n");
    return res.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persuasion solvers for district-based majority elections"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--instance", o.instance, "instance JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--out", o.out, "output directory for reports and CSV tables");
    };

    auto* solve = app.add_subcommand("solve", "solve for the optimal scheme");
    add_common(solve);
    solve->add_option("--mode", o.mode, "private | public | semipublic | oracle-private | oracle-public");
    solve->add_option("--q", o.q, "posterior grid resolution")->check(CLI::PositiveNumber);
    solve->add_option("--epsilon", o.epsilon, "persuasiveness slack")->check(CLI::NonNegativeNumber);
    solve->add_option("--delta-district", o.delta_district, "district threshold relaxation")->check(CLI::Range(0.0, 0.999999));
    solve->add_option("--delta-aggregate", o.delta_aggregate, "aggregate threshold relaxation")->check(CLI::Range(0.0, 0.999999));
    solve->add_option("--eta", o.eta, "approximation target, used to report the theoretical q");
    solve->add_option("--cap", o.cap, "maximum number of grid posteriors");
    solve->add_option("--trace", o.trace, "semipublic: number of simulated draws written to trace.csv");

    auto* oracle = app.add_subcommand("oracle", "exact small-instance optimum");
    add_common(oracle);
    oracle->add_option("--mode", o.mode, "private | public");

    auto* stab = app.add_subcommand("stability", "Monte-Carlo comparative-stability check");
    add_common(stab);
    stab->add_option("--g", o.g, "W_delta | W_delta_delta");
    stab->add_option("--delta", o.delta, "threshold relaxation");
    stab->add_option("--beta", o.beta, "stability constant (default 1/delta or 1/delta^2)");
    stab->add_option("--alphas", o.alphas, "noise levels")->delimiter(',');
    stab->add_option("--trials", o.trials, "draws per cell")->check(CLI::PositiveNumber);
    stab->add_flag("--negative-control", o.negative_control, "beta/10, adversarial noise, threshold-critical base");

    auto* gen = app.add_subcommand("generate", "write a generated instance");
    gen->add_option("--family", o.family, "uniform-random | example1 | threshold-adversarial");
    gen->add_option("--states", o.states, "number of states");
    gen->add_option("--districts", o.districts, "number of districts");
    gen->add_option("--voters", o.voters, "voters per district");
    gen->add_option("--seed", o.seed, "random seed");
    gen->add_option("--out", o.out, "output file (default stdout)");

    auto* audit = app.add_subcommand("audit", "re-check a report against its instance");
    add_common(audit);
    audit->add_option("--report", o.report, "report JSON written by solve")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*solve) run_solve(o);
        if (*oracle) run_oracle(o);
        if (*stab) run_stability(o);
        if (*gen) run_generate(o);
        if (*audit) return run_audit(o);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const CapExceeded& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return 3;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const InconsistencyError& e) {
        std::fprintf(stderr, "inconsistent scheme: %s\n", e.what());
        return 4;
    }
    return 0;
}
