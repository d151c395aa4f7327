#pragma once

// Experiment harness: seeded batches over synthetic multiplexes, emitting
// plot-ready CSV plus a JSON summary with per-sweep-point aggregates.
// Batches:
//   compare-methods  tau_w between native per-layer methods and the
//                    corresponding framework presets, swept over the layer
//                    assignment probability
//   config-impact    tau_w of every member of the 4-matrix configuration
//                    classes against per-layer HITS, grouped by class
//   shift-impact     the same rows grouped by shift
//   convergence      per-halving error curves of the perturbed solver
//   cost-table       the per-iteration operation-count model
// Tasks run on a work pool (capped by MULTIRANK_THREADS); rows are emitted
// in task order, so a plan and seed fix the CSV bytes exactly.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "multirank/baselines.hpp"
#include "multirank/engine.hpp"
#include "multirank/generators.hpp"
#include "multirank/measures.hpp"
#include "multirank/version.hpp"

namespace multirank {

namespace detail {

inline std::size_t worker_count(std::size_t tasks) {
    std::size_t limit = std::thread::hardware_concurrency();
    if (limit == 0) limit = 1;
    if (const char* env = std::getenv("MULTIRANK_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) limit = static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::min(limit, tasks));
}

// Runs fn(0..count-1) on a small pool. fn must not throw; callers write into
// preallocated per-index slots so output order is independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace detail

struct ExperimentPlan {
    enum class Batch { CompareMethods, ConfigImpact, ShiftImpact, Convergence, CostTable };
    enum class Generators { ErdosRenyi, Sbm, Both };

    Batch batch = Batch::CompareMethods;
    Generators generators = Generators::Both;
    std::vector<std::uint32_t> node_sizes;  // empty: batch/scale default
    std::uint32_t layer_count = 2;
    double p_start = 0.0;
    double p_stop = 1.0;
    double p_step = 0.05;
    std::uint32_t repetitions = 0;  // 0: scale default (8 desk, 32 paper)
    std::uint64_t seed = 1;
    bool deterministic = false;
    bool paper_scale = false;
    double damping = 0.85;
    SolverSettings solver;

    // convergence batch
    double convergence_layer_prob = 0.25;
    std::size_t probe_assessed = 30;
    std::size_t probe_guard = 15;

    std::vector<std::uint32_t> cost_nodes = {64, 128, 256, 512, 1024, 2048, 4096};

    // base graph family, matching the synthetic setup of the ranking batches
    static constexpr double kErdosRenyiEdgeProb = 0.5;
    static constexpr double kSbmIntraProb = 0.5;
    static constexpr double kSbmInterProb = 0.2;

    void finalize() {
        if (repetitions == 0) repetitions = paper_scale ? 32 : 8;
        if (node_sizes.empty()) {
            switch (batch) {
                case Batch::CompareMethods:
                    node_sizes = paper_scale
                                     ? std::vector<std::uint32_t>{64, 128, 256, 512, 1024}
                                     : std::vector<std::uint32_t>{64, 128};
                    break;
                case Batch::ConfigImpact:
                case Batch::ShiftImpact:
                case Batch::Convergence:
                    node_sizes = paper_scale ? std::vector<std::uint32_t>{256}
                                             : std::vector<std::uint32_t>{128};
                    break;
                case Batch::CostTable: break;
            }
        }
    }

    void validate() const {
        if (batch == Batch::CostTable) return;
        if (!(p_step > 0.0)) throw std::invalid_argument("experiment: p_step must be positive");
        if (p_start > p_stop) throw std::invalid_argument("experiment: empty p range");
        if (repetitions < 1) throw std::invalid_argument("experiment: repetitions must be >= 1");
        if (node_sizes.empty()) throw std::invalid_argument("experiment: no node sizes");
        if (layer_count < 2) throw std::invalid_argument("experiment: need at least two layers");
        if ((batch == Batch::ConfigImpact || batch == Batch::ShiftImpact) && layer_count != 2)
            throw std::invalid_argument("experiment: configuration batches are two-layer");
        solver.validate();
    }

    std::vector<Generators> generator_list() const {
        if (generators == Generators::Both) return {Generators::ErdosRenyi, Generators::Sbm};
        return {generators};
    }

    std::size_t sweep_points() const {
        return static_cast<std::size_t>((p_stop - p_start) / p_step + 1e-9) + 1;
    }
    double sweep_p(std::size_t i) const { return p_start + static_cast<double>(i) * p_step; }

    nlohmann::json to_json() const;
};

inline std::string to_string(ExperimentPlan::Batch b) {
    switch (b) {
        case ExperimentPlan::Batch::CompareMethods: return "compare-methods";
        case ExperimentPlan::Batch::ConfigImpact: return "config-impact";
        case ExperimentPlan::Batch::ShiftImpact: return "shift-impact";
        case ExperimentPlan::Batch::Convergence: return "convergence";
        case ExperimentPlan::Batch::CostTable: return "cost-table";
    }
    return "?";
}

inline ExperimentPlan::Batch parse_batch(std::string_view name) {
    if (name == "compare-methods") return ExperimentPlan::Batch::CompareMethods;
    if (name == "config-impact") return ExperimentPlan::Batch::ConfigImpact;
    if (name == "shift-impact") return ExperimentPlan::Batch::ShiftImpact;
    if (name == "convergence") return ExperimentPlan::Batch::Convergence;
    if (name == "cost-table") return ExperimentPlan::Batch::CostTable;
    throw ConfigError("unknown experiment batch: " + std::string(name));
}

inline std::string to_string(ExperimentPlan::Generators g) {
    switch (g) {
        case ExperimentPlan::Generators::ErdosRenyi: return "erdos-renyi";
        case ExperimentPlan::Generators::Sbm: return "sbm";
        case ExperimentPlan::Generators::Both: return "both";
    }
    return "?";
}

inline ExperimentPlan::Generators parse_generators(std::string_view name) {
    if (name == "erdos-renyi" || name == "er") return ExperimentPlan::Generators::ErdosRenyi;
    if (name == "sbm") return ExperimentPlan::Generators::Sbm;
    if (name == "both") return ExperimentPlan::Generators::Both;
    throw ConfigError("unknown generator kind: " + std::string(name));
}

inline nlohmann::json ExperimentPlan::to_json() const {
    nlohmann::json j;
    j["batch"] = multirank::to_string(batch);
    j["generators"] = multirank::to_string(generators);
    j["node_sizes"] = node_sizes;
    j["layer_count"] = layer_count;
    j["p_start"] = p_start;
    j["p_stop"] = p_stop;
    j["p_step"] = p_step;
    j["repetitions"] = repetitions;
    j["seed"] = seed;
    j["paper_scale"] = paper_scale;
    j["damping"] = damping;
    j["solver"] = {{"tau0", solver.tau0},
                   {"inner_tol", solver.inner_tol},
                   {"outer_tol", solver.outer_tol},
                   {"max_inner_iters", solver.max_inner_iters},
                   {"max_outer_halvings", solver.max_outer_halvings}};
    if (batch == Batch::Convergence) {
        j["convergence_layer_prob"] = convergence_layer_prob;
        j["probe_assessed"] = probe_assessed;
        j["probe_guard"] = probe_guard;
    }
    if (batch == Batch::CostTable) j["cost_nodes"] = cost_nodes;
    return j;
}

struct ExperimentResult {
    std::string csv;
    nlohmann::json summary;
};

// ---------------------------------------------------------------------------
// Harness internals

namespace detail {

inline GeneratorSpec harness_base_spec(ExperimentPlan::Generators kind, std::uint32_t n,
                                       std::uint64_t seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    if (kind == ExperimentPlan::Generators::ErdosRenyi) {
        spec.model = ErdosRenyiSpec{n, ExperimentPlan::kErdosRenyiEdgeProb};
    } else {
        StochasticBlockModelSpec sbm;
        sbm.nodes = n;
        sbm.block_sizes = {n / 2, n - n / 2};
        sbm.probs = {ExperimentPlan::kSbmIntraProb, ExperimentPlan::kSbmInterProb,
                     ExperimentPlan::kSbmInterProb, ExperimentPlan::kSbmIntraProb};
        spec.model = sbm;
    }
    return spec;
}

inline MultiplexNetwork harness_multiplex(ExperimentPlan::Generators kind, std::uint32_t n,
                                          std::uint32_t layers, double p, std::uint64_t seed) {
    MultiplexSpec spec;
    spec.base = harness_base_spec(kind, n, hash_combine(seed, 0xb15e));
    spec.layer_probs.assign(layers, p);
    spec.independent = true;
    spec.seed = hash_combine(seed, 0xa551);
    return generate_multiplex(spec);
}

inline std::string status_of(const std::exception& e) {
    if (dynamic_cast<const DegenerateInput*>(&e)) return "degenerate";
    if (dynamic_cast<const NonConvergence*>(&e)) return "non-convergence";
    return "error";
}

// Per-layer native references, concatenated across layers.
inline std::vector<double> native_pagerank_concat(const MultiplexNetwork& m, double damping) {
    std::vector<ScoreVector> per_layer;
    for (const SparseMatrix& layer : m.layers()) per_layer.push_back(classic_pagerank(layer, damping));
    return concatenate_rankings(per_layer);
}

inline std::vector<double> native_hits_concat(const MultiplexNetwork& m) {
    std::vector<ScoreVector> per_layer;
    for (const SparseMatrix& layer : m.layers()) {
        HitsScores h = classic_hits(layer);
        per_layer.push_back(std::move(h.authority));
        per_layer.push_back(std::move(h.hub));
    }
    return concatenate_rankings(per_layer);
}

inline std::vector<double> native_eigenvector_concat(const MultiplexNetwork& m) {
    std::vector<ScoreVector> per_layer;
    for (const SparseMatrix& layer : m.layers()) per_layer.push_back(eigenvector_centrality(layer));
    return concatenate_rankings(per_layer);
}

struct PairOutcome {
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

template <typename NativeFn, typename FrameworkFn>
PairOutcome compare_pair(NativeFn&& native_fn, FrameworkFn&& framework_fn) {
    PairOutcome out;
    try {
        std::vector<double> native = native_fn();
        std::vector<double> framework = framework_fn();
        out.tau = weighted_kendall_tau(native, framework).tau_w;
    } catch (const std::exception& e) {
        out.status = status_of(e);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Batches

namespace detail {

inline void summary_point(nlohmann::json& arr, const std::string& generator, std::uint32_t n,
                          const std::string& comparison, double p, double mj_mean,
                          std::span<const double> taus) {
    std::vector<double> defined;
    for (double t : taus)
        if (!std::isnan(t)) defined.push_back(t);
    nlohmann::json point;
    point["generator"] = generator;
    point["nodes"] = n;
    point["comparison"] = comparison;
    point["p"] = p;
    point["multijaccard_mean"] = mj_mean;
    point["defined"] = defined.size();
    if (!defined.empty()) {
        point["tau_w_mean"] = compensated_sum(defined) / static_cast<double>(defined.size());
        if (defined.size() >= 2) {
            ConfidenceInterval ci = confidence_interval(defined);
            point["ci_lo"] = ci.lo;
            point["ci_hi"] = ci.hi;
        }
    }
    arr.push_back(point);
}

struct CompareTaskResult {
    double multijaccard = 0.0;
    PairOutcome pairs[3];
    bool generated = false;
};

inline ExperimentResult run_compare_methods(const ExperimentPlan& plan) {
    static const char* kPairNames[3] = {"pagerank-vs-pagerank-like", "hits-vs-hits-like",
                                        "eigenvector-vs-versatile-like"};
    const auto gens = plan.generator_list();
    const std::size_t points = plan.sweep_points();
    const std::size_t per_gen = plan.node_sizes.size() * points * plan.repetitions;
    const std::size_t task_count = gens.size() * per_gen;
    std::vector<CompareTaskResult> results(task_count);

    auto task_of = [&](std::size_t index) {
        std::size_t rep = index % plan.repetitions;
        std::size_t rest = index / plan.repetitions;
        std::size_t p_idx = rest % points;
        rest /= points;
        std::size_t n_idx = rest % plan.node_sizes.size();
        std::size_t g_idx = rest / plan.node_sizes.size();
        return std::tuple{g_idx, n_idx, p_idx, rep};
    };

    parallel_for(task_count, [&](std::size_t index) {
        auto [g_idx, n_idx, p_idx, rep] = task_of(index);
        const auto kind = gens[g_idx];
        const std::uint32_t n = plan.node_sizes[n_idx];
        const double p = plan.sweep_p(p_idx);
        const std::uint64_t seed =
            hash_combine(plan.seed, kStreamInstance, g_idx, n, p_idx, rep);
        CompareTaskResult& out = results[index];
        try {
            MultiplexNetwork m = harness_multiplex(kind, n, plan.layer_count, p, seed);
            out.multijaccard = multijaccard(m);
            out.generated = true;
            out.pairs[0] = compare_pair(
                [&] { return native_pagerank_concat(m, plan.damping); },
                [&] {
                    return concatenate_rankings(
                        solve_preset(m, {PresetKind::PageRankLike, plan.damping}, plan.solver)
                            .rankings);
                });
            out.pairs[1] = compare_pair(
                [&] { return native_hits_concat(m); },
                [&] {
                    return concatenate_rankings(
                        solve_preset(m, {PresetKind::HitsLike, plan.damping}, plan.solver).rankings);
                });
            out.pairs[2] = compare_pair(
                [&] { return native_eigenvector_concat(m); },
                [&] {
                    return concatenate_rankings(
                        solve_preset(m, {PresetKind::VersatileLike, plan.damping}, plan.solver)
                            .rankings);
                });
        } catch (const std::exception& e) {
            for (auto& pair : out.pairs) pair.status = status_of(e);
        }
    });

    std::string csv = "generator,nodes,p,repetition,multijaccard,comparison,tau_w,status\n";
    for (std::size_t index = 0; index < task_count; ++index) {
        auto [g_idx, n_idx, p_idx, rep] = task_of(index);
        const CompareTaskResult& t = results[index];
        for (std::size_t pair = 0; pair < 3; ++pair) {
            csv += to_string(gens[g_idx]) + "," + std::to_string(plan.node_sizes[n_idx]) + "," +
                   fmt_short(plan.sweep_p(p_idx)) + "," + std::to_string(rep) + "," +
                   (t.generated ? fmt(t.multijaccard) : "nan") + "," + kPairNames[pair] + "," +
                   fmt(t.pairs[pair].tau) + "," + t.pairs[pair].status + "\n";
        }
    }

    nlohmann::json curve = nlohmann::json::array();
    for (std::size_t g_idx = 0; g_idx < gens.size(); ++g_idx)
        for (std::size_t n_idx = 0; n_idx < plan.node_sizes.size(); ++n_idx)
            for (std::size_t pair = 0; pair < 3; ++pair)
                for (std::size_t p_idx = 0; p_idx < points; ++p_idx) {
                    std::vector<double> taus;
                    double mj_sum = 0.0;
                    std::size_t mj_count = 0;
                    for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
                        std::size_t index =
                            ((g_idx * plan.node_sizes.size() + n_idx) * points + p_idx) *
                                plan.repetitions +
                            rep;
                        taus.push_back(results[index].pairs[pair].tau);
                        if (results[index].generated) {
                            mj_sum += results[index].multijaccard;
                            ++mj_count;
                        }
                    }
                    summary_point(curve, to_string(gens[g_idx]), plan.node_sizes[n_idx],
                                  kPairNames[pair], plan.sweep_p(p_idx),
                                  mj_count ? mj_sum / static_cast<double>(mj_count)
                                           : std::numeric_limits<double>::quiet_NaN(),
                                  taus);
                }

    ExperimentResult result;
    result.csv = std::move(csv);
    result.summary["curves"] = std::move(curve);
    return result;
}

struct ConfigTaskResult {
    double multijaccard = 0.0;
    bool generated = false;
    std::string reference_status = "ok";
    // 6 classes x 4 shifts, class-major
    std::vector<PairOutcome> cells;
};

inline const std::vector<Configuration>& four_atom_classes() {
    static const std::vector<Configuration> classes = [] {
        std::vector<Configuration> out;
        for (const Configuration& c : enumerate_configurations(2))
            if (c.length() == 4) out.push_back(c);
        return out;
    }();
    return classes;
}

inline ExperimentResult run_config_impact(const ExperimentPlan& plan, bool group_by_shift) {
    const auto gens = plan.generator_list();
    const std::size_t points = plan.sweep_points();
    const std::size_t task_count =
        gens.size() * plan.node_sizes.size() * points * plan.repetitions;
    const auto& classes = four_atom_classes();
    std::vector<ConfigTaskResult> results(task_count);

    auto task_of = [&](std::size_t index) {
        std::size_t rep = index % plan.repetitions;
        std::size_t rest = index / plan.repetitions;
        std::size_t p_idx = rest % points;
        rest /= points;
        std::size_t n_idx = rest % plan.node_sizes.size();
        std::size_t g_idx = rest / plan.node_sizes.size();
        return std::tuple{g_idx, n_idx, p_idx, rep};
    };

    parallel_for(task_count, [&](std::size_t index) {
        auto [g_idx, n_idx, p_idx, rep] = task_of(index);
        const std::uint32_t n = plan.node_sizes[n_idx];
        const double p = plan.sweep_p(p_idx);
        const std::uint64_t seed =
            hash_combine(plan.seed, kStreamInstance, g_idx, n, p_idx, rep);
        ConfigTaskResult& out = results[index];
        out.cells.assign(classes.size() * 4, {});
        try {
            MultiplexNetwork m = harness_multiplex(gens[g_idx], n, plan.layer_count, p, seed);
            out.multijaccard = multijaccard(m);
            out.generated = true;
            std::vector<double> reference;
            try {
                reference = native_hits_concat(m);
            } catch (const std::exception& e) {
                out.reference_status = status_of(e);
                for (auto& cell : out.cells) cell.status = out.reference_status;
                return;
            }
            for (std::size_t c = 0; c < classes.size(); ++c)
                for (std::size_t h = 0; h < 4; ++h)
                    out.cells[c * 4 + h] = compare_pair(
                        [&] { return reference; },
                        [&] {
                            ShiftedConfiguration sc(classes[c], h);
                            return concatenate_rankings(solve(m, sc, plan.solver).rankings);
                        });
        } catch (const std::exception& e) {
            for (auto& cell : out.cells) cell.status = status_of(e);
        }
    });

    std::string csv =
        "generator,nodes,p,repetition,multijaccard,config,shift,member,tau_w,status\n";
    auto emit_row = [&](std::size_t index, std::size_t c, std::size_t h) {
        auto [g_idx, n_idx, p_idx, rep] = task_of(index);
        const ConfigTaskResult& t = results[index];
        const PairOutcome& cell = t.cells[c * 4 + h];
        csv += to_string(gens[g_idx]) + "," + std::to_string(plan.node_sizes[n_idx]) + "," +
               fmt_short(plan.sweep_p(p_idx)) + "," + std::to_string(rep) + "," +
               (t.generated ? fmt(t.multijaccard) : "nan") + "," +
               to_string(classes[c].representative(), "") + "," + std::to_string(h) + "," +
               to_string(classes[c].member(h), "") + "," + fmt(cell.tau) + "," + cell.status + "\n";
    };
    for (std::size_t index = 0; index < task_count; ++index) {
        if (group_by_shift) {
            for (std::size_t h = 0; h < 4; ++h)
                for (std::size_t c = 0; c < classes.size(); ++c) emit_row(index, c, h);
        } else {
            for (std::size_t c = 0; c < classes.size(); ++c)
                for (std::size_t h = 0; h < 4; ++h) emit_row(index, c, h);
        }
    }

    nlohmann::json curve = nlohmann::json::array();
    for (std::size_t g_idx = 0; g_idx < gens.size(); ++g_idx)
        for (std::size_t n_idx = 0; n_idx < plan.node_sizes.size(); ++n_idx)
            for (std::size_t c = 0; c < classes.size(); ++c)
                for (std::size_t h = 0; h < 4; ++h)
                    for (std::size_t p_idx = 0; p_idx < points; ++p_idx) {
                        std::vector<double> taus;
                        double mj_sum = 0.0;
                        std::size_t mj_count = 0;
                        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
                            std::size_t index =
                                ((g_idx * plan.node_sizes.size() + n_idx) * points + p_idx) *
                                    plan.repetitions +
                                rep;
                            taus.push_back(results[index].cells[c * 4 + h].tau);
                            if (results[index].generated) {
                                mj_sum += results[index].multijaccard;
                                ++mj_count;
                            }
                        }
                        summary_point(curve, to_string(gens[g_idx]), plan.node_sizes[n_idx],
                                      to_string(classes[c].member(h), "") + "@shift" +
                                          std::to_string(h),
                                      plan.sweep_p(p_idx),
                                      mj_count ? mj_sum / static_cast<double>(mj_count)
                                               : std::numeric_limits<double>::quiet_NaN(),
                                      taus);
                    }

    ExperimentResult result;
    result.csv = std::move(csv);
    result.summary["curves"] = std::move(curve);
    return result;
}

struct ConvergenceTaskResult {
    std::vector<ProbeStage> stages;  // vectors dropped, only tau/error/iters kept
    std::string status = "ok";
};

inline ExperimentResult run_convergence(const ExperimentPlan& plan) {
    const auto gens = plan.generator_list();
    const std::size_t task_count = gens.size() * plan.node_sizes.size() * plan.repetitions;
    std::vector<ConvergenceTaskResult> results(task_count);

    auto task_of = [&](std::size_t index) {
        std::size_t rep = index % plan.repetitions;
        std::size_t rest = index / plan.repetitions;
        std::size_t n_idx = rest % plan.node_sizes.size();
        std::size_t g_idx = rest / plan.node_sizes.size();
        return std::tuple{g_idx, n_idx, rep};
    };

    parallel_for(task_count, [&](std::size_t index) {
        auto [g_idx, n_idx, rep] = task_of(index);
        const std::uint32_t n = plan.node_sizes[n_idx];
        const std::uint64_t seed = hash_combine(plan.seed, kStreamInstance, g_idx, n, 0, rep);
        ConvergenceTaskResult& out = results[index];
        try {
            MultiplexNetwork m = harness_multiplex(gens[g_idx], n, plan.layer_count,
                                                   plan.convergence_layer_prob, seed);
            PresetPlan preset = preset_configuration(PresetKind::HitsLike, m.layer_count());
            ProbeReport probe = convergence_probe(m, preset.configuration, plan.solver,
                                                  plan.probe_assessed, plan.probe_guard);
            out.stages = std::move(probe.stages);
            for (ProbeStage& st : out.stages) st.vector.clear();
        } catch (const std::exception& e) {
            out.status = status_of(e);
        }
    });

    std::string csv =
        "generator,nodes,repetition,halving,tau,l1_error,error_over_tau,inner_iterations,status\n";
    for (std::size_t index = 0; index < task_count; ++index) {
        auto [g_idx, n_idx, rep] = task_of(index);
        const ConvergenceTaskResult& t = results[index];
        const std::string prefix = to_string(gens[g_idx]) + "," +
                                   std::to_string(plan.node_sizes[n_idx]) + "," +
                                   std::to_string(rep) + ",";
        if (t.status != "ok") {
            csv += prefix + "0,nan,nan,nan,0," + t.status + "\n";
            continue;
        }
        for (std::size_t h = 0; h < t.stages.size(); ++h) {
            const ProbeStage& st = t.stages[h];
            csv += prefix + std::to_string(h) + "," + fmt(st.tau) + "," + fmt(st.error) + "," +
                   fmt(st.error / st.tau) + "," + std::to_string(st.inner_iterations) + ",ok\n";
        }
    }

    nlohmann::json curve = nlohmann::json::array();
    for (std::size_t g_idx = 0; g_idx < gens.size(); ++g_idx)
        for (std::size_t n_idx = 0; n_idx < plan.node_sizes.size(); ++n_idx)
            for (std::size_t h = 0; h < plan.probe_assessed; ++h) {
                std::vector<double> errors, ratios;
                for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
                    std::size_t index =
                        (g_idx * plan.node_sizes.size() + n_idx) * plan.repetitions + rep;
                    const auto& stages = results[index].stages;
                    if (h < stages.size()) {
                        errors.push_back(stages[h].error);
                        ratios.push_back(stages[h].error / stages[h].tau);
                    }
                }
                if (errors.empty()) continue;
                nlohmann::json point;
                point["generator"] = to_string(gens[g_idx]);
                point["nodes"] = plan.node_sizes[n_idx];
                point["halving"] = h;
                point["error_mean"] =
                    compensated_sum(errors) / static_cast<double>(errors.size());
                point["error_over_tau_mean"] =
                    compensated_sum(ratios) / static_cast<double>(ratios.size());
                if (errors.size() >= 2) {
                    ConfidenceInterval ci = confidence_interval(errors);
                    point["error_ci_lo"] = ci.lo;
                    point["error_ci_hi"] = ci.hi;
                }
                curve.push_back(point);
            }

    ExperimentResult result;
    result.csv = std::move(csv);
    result.summary["curves"] = std::move(curve);
    return result;
}

inline ExperimentResult run_cost_table(const ExperimentPlan& plan) {
    std::string csv = "nodes";
    for (const std::string& m : cost_table_methods()) csv += "," + m;
    csv += "\n";
    nlohmann::json table = nlohmann::json::array();
    for (std::uint32_t n : plan.cost_nodes) {
        csv += std::to_string(n);
        nlohmann::json row;
        row["nodes"] = n;
        for (const std::string& method : cost_table_methods()) {
            CostModelEntry entry = cost_model(method, n, plan.layer_count);
            csv += "," + std::to_string(entry.operations);
            row[method] = entry.operations;
        }
        csv += "\n";
        table.push_back(row);
    }
    ExperimentResult result;
    result.csv = std::move(csv);
    result.summary["table"] = std::move(table);
    return result;
}

}  // namespace detail

inline ExperimentResult run_experiment(ExperimentPlan plan) {
    plan.finalize();
    plan.validate();

    ExperimentResult result;
    switch (plan.batch) {
        case ExperimentPlan::Batch::CompareMethods:
            result = detail::run_compare_methods(plan);
            break;
        case ExperimentPlan::Batch::ConfigImpact:
            result = detail::run_config_impact(plan, /*group_by_shift=*/false);
            break;
        case ExperimentPlan::Batch::ShiftImpact:
            result = detail::run_config_impact(plan, /*group_by_shift=*/true);
            break;
        case ExperimentPlan::Batch::Convergence:
            result = detail::run_convergence(plan);
            break;
        case ExperimentPlan::Batch::CostTable:
            result = detail::run_cost_table(plan);
            break;
    }

    std::string header = "# " + std::string(kVersion) + " batch=" + to_string(plan.batch) +
                         " seed=" + std::to_string(plan.seed) + "\n";
    if (!plan.deterministic) header += "# generated=" + detail::utc_timestamp() + "\n";
    result.csv.insert(0, header);

    result.summary["version"] = kVersion;
    result.summary["plan"] = plan.to_json();
    if (!plan.deterministic) result.summary["generated"] = detail::utc_timestamp();
    return result;
}

}  // namespace multirank
