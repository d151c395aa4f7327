// Acceptance suite: every release gate in one binary, one line per check.
// Exits nonzero when any gate fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "multirank/multirank.hpp"
#include "oracle_helpers.hpp"

using namespace multirank;

namespace {

struct Gate {
    std::string name;
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Gate> gates;

void run_gate(const std::string& name, const std::function<void(Gate&)>& body) {
    Gate gate;
    gate.name = name;
    auto start = std::chrono::steady_clock::now();
    try {
        body(gate);
    } catch (const std::exception& e) {
        gate.pass = false;
        gate.detail += std::string(" exception: ") + e.what();
    }
    gate.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.2fs)%s\n", gate.pass ? "PASS" : "FAIL", gate.name.c_str(),
                gate.seconds, gate.detail.empty() ? "" : (" --" + gate.detail).c_str());
    std::fflush(stdout);
    gates.push_back(gate);
}

void expect(Gate& gate, bool condition, const std::string& what) {
    if (!condition) {
        gate.pass = false;
        gate.detail += " FAILED: " + what + ";";
    }
}

// ---------------------------------------------------------------------------

void criterion_cost_table(Gate& gate) {
    const std::uint64_t expected[7][6] = {
        {8192ull, 266240ull, 532480ull, 790528ull, 524288ull, 266240ull},
        {32768ull, 2113536ull, 4227072ull, 6307840ull, 4194304ull, 2113536ull},
        {131072ull, 16842752ull, 33685504ull, 50397184ull, 33554432ull, 16842752ull},
        {524288ull, 134479872ull, 268959744ull, 402915328ull, 268435456ull, 134479872ull},
        {2097152ull, 1074790400ull, 2149580800ull, 3222274048ull, 2147483648ull, 1074790400ull},
        {8388608ull, 8594128896ull, 17188257792ull, 25773998080ull, 17179869184ull, 8594128896ull},
        {33554432ull, 68736253952ull, 137472507904ull, 206175207424ull, 137438953472ull,
         68736253952ull},
    };
    const std::uint64_t sizes[7] = {64, 128, 256, 512, 1024, 2048, 4096};

    ExperimentPlan plan;
    plan.batch = ExperimentPlan::Batch::CostTable;
    plan.deterministic = true;
    std::string csv = run_experiment(plan).csv;

    std::size_t matched = 0;
    for (std::size_t row = 0; row < 7; ++row) {
        std::string line = std::to_string(sizes[row]);
        for (std::size_t k = 0; k < 6; ++k) {
            const std::string& method = cost_table_methods()[k];
            std::uint64_t ops = cost_model(method, sizes[row], 2).operations;
            expect(gate, ops == expected[row][k],
                   method + " n=" + std::to_string(sizes[row]) + " got " + std::to_string(ops));
            if (ops == expected[row][k]) ++matched;
            line += "," + std::to_string(ops);
        }
        expect(gate, csv.find(line) != std::string::npos, "csv row for n=" + std::to_string(sizes[row]));
    }
    gate.detail = " " + std::to_string(matched) + "/42 cells exact";
}

void criterion_degenerate_ring(Gate& gate) {
    MultiplexNetwork ring = oracle::ring_multiplex();
    ShiftedConfiguration sc = parse_configuration("A0T A0 A1T A1", 2);

    auto product = composition_matrix(ring, sc, 0.0);
    bool all_zero = std::all_of(product.begin(), product.end(), [](double x) { return x == 0.0; });
    expect(gate, all_zero, "unperturbed composition must be the zero matrix");

    SolverSettings settings;
    settings.max_outer_halvings = 60;
    SolveReport rep = solve(ring, sc, settings);
    double sum = 0.0, min_entry = 1.0;
    for (double v : rep.rankings[0].values()) {
        sum += v;
        min_entry = std::min(min_entry, v);
    }
    expect(gate, min_entry >= 0.0, "r_0 nonnegative");
    expect(gate, std::fabs(sum - 1.0) <= 1e-12, "r_0 normalized");
    expect(gate, rep.trace.size() <= 60, "within the halving cap");
    gate.detail = " converged in " + std::to_string(rep.trace.size()) + " halvings";
}

void criterion_framework_equivalence(Gate& gate) {
    std::size_t instances = 0;
    double worst_l1 = 0.0, worst_tau = 1.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 32 + 24 * (seed % 5);  // 32..128
        SparseMatrix a = oracle::random_strong_digraph(seed * 131, n, 0.12);
        std::vector<SparseMatrix> layers{a};
        MultiplexNetwork m(n, layers);

        ScoreVector native_pr = classic_pagerank(a, 0.85, 1e-13);
        SolveReport fw_pr = solve_preset(m, {PresetKind::PageRank, 0.85});
        double l1_pr = detail::l1_distance(native_pr.values(), fw_pr.rankings[0].values());
        double tau_pr = weighted_kendall_tau(native_pr.values(), fw_pr.rankings[0].values()).tau_w;

        HitsScores native_hits = classic_hits(a, 1e-13);
        SolveReport fw_hits = solve_preset(m, {PresetKind::Hits, 0.85});
        std::vector<double> native_concat =
            concatenate_rankings({native_hits.authority, native_hits.hub});
        std::vector<double> fw_concat = concatenate_rankings(fw_hits.rankings);
        double l1_hits = std::max(
            detail::l1_distance(native_hits.authority.values(), fw_hits.rankings[0].values()),
            detail::l1_distance(native_hits.hub.values(), fw_hits.rankings[1].values()));
        double tau_hits = weighted_kendall_tau(native_concat, fw_concat).tau_w;

        worst_l1 = std::max({worst_l1, l1_pr, l1_hits});
        worst_tau = std::min({worst_tau, tau_pr, tau_hits});
        ++instances;
    }
    expect(gate, instances >= 20, "twenty instances");
    expect(gate, worst_l1 <= 1e-8, "L1 distance <= 1e-8, worst " + std::to_string(worst_l1));
    expect(gate, std::fabs(worst_tau - 1.0) <= 1e-12,
           "weighted tau = 1, worst " + std::to_string(worst_tau));
    char buf[96];
    std::snprintf(buf, sizeof buf, " %zu instances, worst L1 %.2e, worst tau-1 %.2e", instances,
                  worst_l1, std::fabs(worst_tau - 1.0));
    gate.detail = buf;
}

void criterion_identical_layers(Gate& gate) {
    std::size_t instances = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 24 + 8 * (seed % 6);
        SparseMatrix a = oracle::random_strong_digraph(seed * 733, n, 0.15);
        std::vector<SparseMatrix> layers{a, a};
        MultiplexNetwork m(n, layers);
        expect(gate, std::fabs(multijaccard(m) - 1.0) <= 1e-15, "identical layers overlap 1");

        SolveReport rep = solve_preset(m, {PresetKind::HitsLike, 0.85});
        ScoreVector native = classic_hits(a, 1e-13).authority;
        double tau = weighted_kendall_tau(native.values(), rep.rankings[0].values()).tau_w;
        worst = std::max(worst, std::fabs(tau - 1.0));
        ++instances;
    }
    expect(gate, instances >= 20, "twenty instances");
    expect(gate, worst <= 1e-9, "tau within 1e-9 of 1, worst " + std::to_string(worst));
    char buf[64];
    std::snprintf(buf, sizeof buf, " %zu instances, worst |tau-1| %.2e", instances, worst);
    gate.detail = buf;
}

void criterion_similarity_trend(Gate& gate) {
    ExperimentPlan plan;
    plan.batch = ExperimentPlan::Batch::CompareMethods;
    plan.generators = ExperimentPlan::Generators::Both;
    plan.node_sizes = {128};
    plan.p_start = 0.0;
    plan.p_stop = 1.0;
    plan.p_step = 0.05;
    plan.repetitions = 8;
    plan.seed = 20260808;
    plan.deterministic = true;
    ExperimentResult res = run_experiment(plan);

    const char* pairs[3] = {"pagerank-vs-pagerank-like", "hits-vs-hits-like",
                            "eigenvector-vs-versatile-like"};
    for (const std::string generator : {"erdos-renyi", "sbm"}) {
        for (const char* pair : pairs) {
            std::vector<double> mj, tau;
            for (const auto& point : res.summary["curves"]) {
                if (point["generator"] != generator || point["comparison"] != pair) continue;
                if (!point.contains("tau_w_mean")) continue;  // undefined sweep point
                mj.push_back(point["multijaccard_mean"].get<double>());
                tau.push_back(point["tau_w_mean"].get<double>());
            }
            expect(gate, mj.size() >= 15, std::string(pair) + " enough defined points");
            double rho = oracle::spearman(mj, tau);
            expect(gate, rho > 0.8,
                   std::string(generator) + " " + pair + " spearman " + std::to_string(rho));
            char buf[96];
            std::snprintf(buf, sizeof buf, " %s/%s rho=%.3f(%zu pts);",
                          generator == "erdos-renyi" ? "er" : "sbm", pair, rho, mj.size());
            gate.detail += buf;
        }
    }
}

void criterion_convergence_laws(Gate& gate) {
    SolverSettings settings;
    const std::size_t assessed = 30, guard = 15;
    std::size_t probes = 0;
    for (auto kind :
         {ExperimentPlan::Generators::ErdosRenyi, ExperimentPlan::Generators::Sbm}) {
        for (std::uint64_t rep = 0; rep < 3; ++rep) {
            std::uint64_t seed = detail::hash_combine(4242, detail::kStreamInstance,
                                                      kind == ExperimentPlan::Generators::Sbm,
                                                      128, 0, rep);
            MultiplexNetwork m = detail::harness_multiplex(kind, 128, 2, 0.25, seed);
            PresetPlan preset = preset_configuration(PresetKind::HitsLike, 2);
            ProbeReport probe = convergence_probe(m, preset.configuration, settings, assessed, guard);
            ++probes;

            // (a) error decays by a factor in [1.5, 2.5] per halving past 10
            for (std::size_t t = 10; t + 1 < assessed; ++t) {
                double factor = probe.stages[t].error / probe.stages[t + 1].error;
                expect(gate, factor >= 1.5 && factor <= 2.5,
                       "decay factor " + std::to_string(factor) + " at halving " +
                           std::to_string(t));
            }
            // (b) error/tau within +-20% of its mean over the final 10 assessed halvings
            std::vector<double> ratios;
            for (std::size_t t = assessed - 10; t < assessed; ++t)
                ratios.push_back(probe.stages[t].error / probe.stages[t].tau);
            double mean = 0.0;
            for (double r : ratios) mean += r;
            mean /= static_cast<double>(ratios.size());
            for (double r : ratios)
                expect(gate, std::fabs(r - mean) <= 0.2 * mean,
                       "ratio " + std::to_string(r) + " vs mean " + std::to_string(mean));
            // (c) median inner iterations in the asymptotic regime <= 12
            std::vector<std::size_t> iters;
            for (std::size_t t = 10; t < assessed; ++t)
                iters.push_back(probe.stages[t].inner_iterations);
            std::sort(iters.begin(), iters.end());
            std::size_t median = iters[iters.size() / 2];
            expect(gate, median <= 12, "median inner iterations " + std::to_string(median));
            char buf[48];
            std::snprintf(buf, sizeof buf, " probe%zu med=%zu;", probes, median);
            gate.detail += buf;
        }
    }
    expect(gate, probes == 6, "six probes");
}

void criterion_configuration_algebra(Gate& gate) {
    expect(gate, configuration_count(1) == 3, "closed form L=1");
    expect(gate, configuration_count(2) == 24, "closed form L=2");
    expect(gate, enumerate_configurations(1).size() == configuration_count(1), "enumeration L=1");
    expect(gate, enumerate_configurations(2).size() == configuration_count(2), "enumeration L=2");
    expect(gate, enumerate_configurations(3).size() == configuration_count(3), "enumeration L=3");
    gate.detail = " counts 3/24/" + std::to_string(configuration_count(3));

    // canonicalization properties over 10,000 random sequences
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
        std::size_t len = 1 + static_cast<std::size_t>(oracle::draw(seed, 0x11, 0, 0) * 7);
        AtomSequence seq;
        for (std::size_t i = 0; i < len; ++i)
            seq.push_back(Atom{static_cast<std::uint32_t>(oracle::draw(seed, 0x12, i, 0) * 3),
                               oracle::draw(seed, 0x13, i, 0) < 0.5});
        Configuration c(seq);
        if (!(Configuration(c.representative()) == c)) {
            expect(gate, false, "idempotence at seed " + std::to_string(seed));
            break;
        }
        std::size_t shift = static_cast<std::size_t>(oracle::draw(seed, 0x14, 0, 0) * len);
        if (!(Configuration(detail::rotate(seq, shift)) == c)) {
            expect(gate, false, "rotation invariance at seed " + std::to_string(seed));
            break;
        }
    }

    // the documented two-layer class, member for member
    Configuration c({Atom{1, true}, Atom{1, false}, Atom{0, true}, Atom{0, false}});
    expect(gate, to_string(c.representative()) == "A0 A1T A1 A0T", "canonical representative");
    auto members = c.members();
    expect(gate, members.size() == 4, "four members");
    expect(gate, to_string(members[0]) == "A0 A1T A1 A0T", "member 0");
    expect(gate, to_string(members[1]) == "A1T A1 A0T A0", "member 1");
    expect(gate, to_string(members[2]) == "A1 A0T A0 A1T", "member 2");
    expect(gate, to_string(members[3]) == "A0T A0 A1T A1", "member 3");
    ShiftedConfiguration sc = parse_configuration("A0T A0 A1T A1", 2);
    expect(gate, sc.shift == 3 && sc.config == c, "shift 3 selects the written order");
}

void criterion_measure_oracles(Gate& gate) {
    // 1000 random ranking pairs with ties, n <= 50, against exhaustive pairs
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; checked < 1000; ++seed) {
        std::size_t n = 2 + static_cast<std::size_t>(oracle::draw(seed, 0x21, 0, 0) * 48);
        int alphabet = 2 + static_cast<int>(oracle::draw(seed, 0x22, 0, 0) * 24);
        std::vector<double> r(n), s(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = std::floor(oracle::draw(seed, 0x23, i, 0) * alphabet);
            s[i] = std::floor(oracle::draw(seed, 0x24, i, 0) * alphabet);
        }
        double brute = oracle::brute_weighted_tau(r, s);
        if (std::isnan(brute)) continue;
        double got = weighted_kendall_tau(r, s).tau_w;
        worst = std::max(worst, std::fabs(got - brute));
        ++checked;
    }
    expect(gate, checked == 1000, "thousand pairs");
    expect(gate, worst <= 1e-12, "tau oracle agreement, worst " + std::to_string(worst));

    // analytic overlap 1/3 at p = 0.5, two independent layers
    double mj_mean = 0.0;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        MultiplexSpec spec;
        spec.base = GeneratorSpec{ErdosRenyiSpec{256, 0.5}, seed * 7 + 1};
        spec.layer_probs = {0.5, 0.5};
        spec.seed = seed * 7 + 3;
        mj_mean += multijaccard(generate_multiplex(spec));
    }
    mj_mean /= 32.0;
    expect(gate, std::fabs(mj_mean - 1.0 / 3.0) <= 0.03,
           "multijaccard mean " + std::to_string(mj_mean));

    // confidence intervals against the published t-table
    std::vector<double> two{0.0, 1.0};
    ConfidenceInterval ci = confidence_interval(two);
    expect(gate, std::fabs((ci.hi - ci.mean) - 12.706 / 2.0) <= 1e-3, "df=1 half width");
    std::vector<double> six{1, 2, 3, 4, 5, 6};
    ConfidenceInterval ci6 = confidence_interval(six);
    double sd = std::sqrt(3.5);
    expect(gate, std::fabs((ci6.hi - ci6.mean) - 2.571 * sd / std::sqrt(6.0)) <= 1e-3,
           "df=5 half width");
    expect(gate, std::fabs((ci6.hi - ci6.mean) - (ci6.mean - ci6.lo)) <= 1e-12, "symmetry");
    std::vector<double> constant{0.4, 0.4, 0.4};
    ConfidenceInterval ci0 = confidence_interval(constant);
    expect(gate, ci0.lo == ci0.hi && ci0.hi == ci0.mean, "zero-width interval");

    char buf[96];
    std::snprintf(buf, sizeof buf, " tau worst %.2e, mj mean %.4f", worst, mj_mean);
    gate.detail = buf;
}

void criterion_determinism(Gate& gate) {
    ExperimentPlan plan;
    plan.batch = ExperimentPlan::Batch::CompareMethods;
    plan.generators = ExperimentPlan::Generators::Both;
    plan.node_sizes = {32};
    plan.p_start = 0.0;
    plan.p_stop = 1.0;
    plan.p_step = 0.25;
    plan.repetitions = 2;
    plan.seed = 99;
    plan.deterministic = true;

    ExperimentResult a = run_experiment(plan);
    ExperimentResult b = run_experiment(plan);
    expect(gate, a.csv == b.csv, "CSV bytes identical across reruns");
    expect(gate, a.summary.dump() == b.summary.dump(), "summary bytes identical");

    ExperimentPlan conv;
    conv.batch = ExperimentPlan::Batch::Convergence;
    conv.node_sizes = {24};
    conv.repetitions = 2;
    conv.probe_assessed = 10;
    conv.probe_guard = 8;
    conv.seed = 99;
    conv.deterministic = true;
    expect(gate, run_experiment(conv).csv == run_experiment(conv).csv, "convergence CSV identical");
    gate.detail = " " + std::to_string(a.csv.size()) + " bytes stable";
}

}  // namespace

int main() {
    std::printf("%s acceptance suite\n", kVersion);
    run_gate("criterion 1: cost table reproduction (exact)", criterion_cost_table);
    run_gate("criterion 2: degenerate ring solved under perturbation", criterion_degenerate_ring);
    run_gate("criterion 3: framework matches native pagerank/hits", criterion_framework_equivalence);
    run_gate("criterion 4: identical-layer hits-like limit", criterion_identical_layers);
    run_gate("criterion 5: similarity grows with layer overlap", criterion_similarity_trend);
    run_gate("criterion 6: convergence laws of the tau schedule", criterion_convergence_laws);
    run_gate("criterion 7: configuration algebra", criterion_configuration_algebra);
    run_gate("criterion 8: measure oracles", criterion_measure_oracles);
    run_gate("criterion 9: byte-identical reruns", criterion_determinism);

    std::size_t failed = 0;
    for (const Gate& g : gates) failed += g.pass ? 0 : 1;
    std::printf("%zu/%zu criteria passed\n", gates.size() - failed, gates.size());

    // runtime gates pinned by the criteria themselves
    if (gates[0].seconds >= 1.0 || gates[1].seconds >= 1.0) {
        std::printf("[FAIL] runtime bound: criteria 1 and 2 must finish under a second\n");
        return 1;
    }
    return failed == 0 ? 0 : 1;
}
