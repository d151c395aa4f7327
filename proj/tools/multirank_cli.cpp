// Command-line front end: solve / generate / enumerate / measure /
// experiment / cost-table. Exit codes: 0 success, 2 input parse error,
// 3 configuration or dimension error, 4 solver non-convergence, 1 other.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "multirank/multirank.hpp"

namespace {

using namespace multirank;

std::vector<double> read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<double> values;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        nlohmann::json j = nlohmann::json::parse(text);
        const nlohmann::json& arr = j.is_object() ? j.at("values") : j;
        for (const auto& v : arr) values.push_back(v.get<double>());
    } else {
        std::istringstream ss(text);
        double v;
        while (ss >> v) values.push_back(v);
    }
    if (values.empty()) throw ParseError("no scores found in " + path);
    return values;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << text;
}

struct SolverFlags {
    double tau0 = 0.5;
    double inner_tol = 1e-13;
    double outer_tol = 1e-10;
    std::size_t max_inner = 100000;
    std::size_t max_outer = 60;
    std::string eval_mode = "chain";

    void attach(CLI::App* cmd) {
        cmd->add_option("--tau0", tau0, "initial perturbation in (0,1)");
        cmd->add_option("--inner-tol", inner_tol, "L1 tolerance of the inner power iteration");
        cmd->add_option("--outer-tol", outer_tol, "L1 tolerance between tau stages");
        cmd->add_option("--max-inner", max_inner, "inner iteration cap per tau stage");
        cmd->add_option("--max-outer", max_outer, "cap on tau halvings");
        cmd->add_option("--eval-mode", eval_mode, "chain | product")
            ->check(CLI::IsMember({"chain", "product"}));
    }

    SolverSettings settings() const {
        SolverSettings s;
        s.tau0 = tau0;
        s.inner_tol = inner_tol;
        s.outer_tol = outer_tol;
        s.max_inner_iters = max_inner;
        s.max_outer_halvings = max_outer;
        s.eval_mode = eval_mode == "product" ? EvalMode::ExplicitProduct : EvalMode::MatvecChain;
        return s;
    }
};

int run_solve(const std::string& network_path, const std::string& config_text,
              const std::string& preset_name, double damping, const SolverFlags& flags,
              bool with_trace, const std::string& output, const std::string& format) {
    MultiplexNetwork m = load_multiplex_file(network_path);
    SolverSettings settings = flags.settings();

    PresetPlan plan = !preset_name.empty()
                          ? preset_configuration(parse_preset(preset_name), m.layer_count())
                          : PresetPlan{false, parse_configuration(config_text, m.layer_count())};
    SolveReport report = [&] {
        if (plan.google_transform) {
            std::vector<GoogleMatrix> mats;
            for (const SparseMatrix& layer : m.layers()) mats.emplace_back(layer, damping);
            return solve_over<GoogleMatrix>(mats, plan.configuration, settings);
        }
        return solve(m, plan.configuration, settings);
    }();

    if (format == "csv") {
        std::string csv = "node";
        for (std::size_t k = 0; k < report.rankings.size(); ++k)
            csv += ",r_" + std::to_string(k);
        csv += "\n";
        char buf[40];
        for (std::size_t i = 0; i < m.node_count(); ++i) {
            csv += std::to_string(m.node_ids()[i]);
            for (const ScoreVector& r : report.rankings) {
                std::snprintf(buf, sizeof buf, "%.17g", r[i]);
                csv += std::string(",") + buf;
            }
            csv += "\n";
        }
        write_text(output, csv);
        return 0;
    }

    nlohmann::json j = report.to_json();
    if (!with_trace) j.erase("trace");
    j["version"] = kVersion;
    j["network"] = network_path;
    j["nodes"] = m.node_ids();
    j["configuration"] = to_string(plan.configuration.sequence());
    j["canonical"] = to_string(plan.configuration.config.representative());
    j["shift"] = plan.configuration.shift;
    write_text(output, j.dump(2) + "\n");
    return 0;
}

int run_generate(const std::string& kind, std::uint32_t nodes, double edge_prob,
                 const std::vector<std::uint32_t>& blocks, const std::vector<double>& block_probs,
                 std::uint32_t layers, std::optional<double> layer_prob,
                 std::vector<double> layer_probs, bool exclusive, std::uint64_t seed,
                 const std::string& output) {
    GeneratorSpec base;
    base.seed = detail::hash_combine(seed, 0xba5e);
    if (kind == "er") {
        base.model = ErdosRenyiSpec{nodes, edge_prob};
    } else {
        StochasticBlockModelSpec sbm;
        sbm.nodes = nodes;
        sbm.block_sizes = blocks;
        sbm.probs = block_probs;
        base.model = sbm;
    }
    if (layer_probs.empty()) {
        double p = layer_prob.value_or(exclusive ? 1.0 / layers : 0.5);
        layer_probs.assign(layers, p);
    }
    MultiplexSpec spec{std::move(base), std::move(layer_probs), !exclusive,
                       detail::hash_combine(seed, 0x5eed)};
    MultiplexNetwork m = generate_multiplex(spec);
    std::ostringstream out;
    save_multiplex(m, out);
    write_text(output, out.str());
    return 0;
}

int run_enumerate(std::size_t layers, std::optional<std::size_t> k_filter, bool count_only) {
    if (count_only) {
        std::cout << configuration_count(layers) << "\n";
        return 0;
    }
    for (const Configuration& c : enumerate_configurations(layers)) {
        if (k_filter && c.length() != *k_filter) continue;
        std::cout << to_string(c.representative()) << "\t" << c.length() << "\n";
    }
    return 0;
}

int run_experiment_cmd(ExperimentPlan plan, const std::string& output,
                       const std::string& summary_path) {
    ExperimentResult result = run_experiment(std::move(plan));
    write_text(output, result.csv);
    if (!summary_path.empty())
        write_text(summary_path, result.summary.dump(2) + "\n");
    else if (!output.empty() && output != "-")
        write_text(output + ".summary.json", result.summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tailored centrality measures on multiplex networks"};
    app.set_version_flag("--version", multirank::kVersion);
    app.require_subcommand(1);

    // ---- solve
    auto* solve_cmd = app.add_subcommand("solve", "compute configuration rankings for a network");
    std::string network_path, config_text, preset_name, output, format = "json";
    double damping = 0.85;
    bool with_trace = false;
    SolverFlags solver_flags;
    solve_cmd->add_option("network", network_path, "layered edge-list file")->required();
    auto* config_opt = solve_cmd->add_option("--config", config_text, "configuration, e.g. \"A0T A0 A1T A1\"");
    auto* preset_opt = solve_cmd->add_option("--preset", preset_name,
                                             "pagerank | hits | pagerank-like | hits-like | versatile-like");
    config_opt->excludes(preset_opt);
    solve_cmd->add_option("--damping", damping, "damping for PageRank presets");
    solve_cmd->add_flag("--trace", with_trace, "include the per-tau trace in the output");
    solve_cmd->add_option("--output,-o", output, "output path (default stdout)");
    solve_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    solver_flags.attach(solve_cmd);

    // ---- generate
    auto* gen_cmd = app.add_subcommand("generate", "generate a synthetic multiplex");
    std::string gen_kind = "er", gen_output;
    std::uint32_t gen_nodes = 128, gen_layers = 2;
    double gen_edge_prob = 0.5;
    std::vector<std::uint32_t> gen_blocks;
    std::vector<double> gen_block_probs, gen_layer_probs;
    std::optional<double> gen_layer_prob;
    bool gen_exclusive = false;
    std::uint64_t gen_seed = 1;
    gen_cmd->add_option("--kind", gen_kind, "er | sbm")->check(CLI::IsMember({"er", "sbm"}));
    gen_cmd->add_option("--nodes", gen_nodes, "vertex count");
    gen_cmd->add_option("--edge-prob", gen_edge_prob, "edge probability (er)");
    gen_cmd->add_option("--blocks", gen_blocks, "block sizes (sbm)")->delimiter(',');
    gen_cmd->add_option("--block-probs", gen_block_probs, "row-major block probabilities (sbm)")
        ->delimiter(',');
    gen_cmd->add_option("--layers", gen_layers, "layer count");
    gen_cmd
        ->add_option("--layer-prob", gen_layer_prob,
                     "assignment probability shared by all layers")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--layer-probs", gen_layer_probs, "per-layer assignment probabilities")
        ->delimiter(',');
    gen_cmd->add_flag("--exclusive", gen_exclusive,
                      "assign each base edge to exactly one layer (probabilities sum to 1)");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--output,-o", gen_output, "output path (default stdout)");

    // ---- enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "list repetition-free configurations");
    std::size_t enum_layers = 1;
    std::optional<std::size_t> enum_k;
    bool enum_count = false;
    enum_cmd->add_option("--layers", enum_layers, "layer count")->required();
    enum_cmd->add_option("--k", enum_k, "only classes of this length");
    enum_cmd->add_flag("--count", enum_count, "print only the closed-form class count");

    // ---- measure
    auto* measure_cmd = app.add_subcommand("measure", "ranking and overlap measures");
    measure_cmd->require_subcommand(1);
    auto* mj_cmd = measure_cmd->add_subcommand("multijaccard", "layer overlap of a network");
    std::string mj_network;
    mj_cmd->add_option("network", mj_network, "layered edge-list file")->required();
    auto* tau_cmd = measure_cmd->add_subcommand("tau", "weighted Kendall tau of two rankings");
    std::string tau_a, tau_b, tau_scheme = "hyperbolic";
    tau_cmd->add_option("reference", tau_a, "reference scores (JSON array or whitespace list)")
        ->required();
    tau_cmd->add_option("compared", tau_b, "compared scores")->required();
    tau_cmd->add_option("--scheme", tau_scheme, "hyperbolic | constant")
        ->check(CLI::IsMember({"hyperbolic", "constant"}));
    auto* ci_cmd = measure_cmd->add_subcommand("ci", "95% Student-t confidence interval");
    std::string ci_file;
    ci_cmd->add_option("samples", ci_file, "sample file (JSON array or whitespace list)")
        ->required();
    auto* super_cmd =
        measure_cmd->add_subcommand("superposition", "irreducibility/aperiodicity of the layer union");
    std::string super_network;
    super_cmd->add_option("network", super_network, "layered edge-list file")->required();

    // ---- experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run a seeded experiment batch");
    std::string exp_batch, exp_generator = "both", exp_output, exp_summary;
    std::vector<std::uint32_t> exp_nodes;
    std::uint32_t exp_layers = 2, exp_reps = 0;
    double exp_p_start = 0.0, exp_p_stop = 1.0, exp_p_step = 0.05, exp_damping = 0.85;
    double exp_conv_p = 0.25;
    std::size_t exp_assessed = 30, exp_guard = 15;
    std::uint64_t exp_seed = 1;
    bool exp_deterministic = false, exp_paper = false;
    SolverFlags exp_solver;
    exp_cmd
        ->add_option("--batch", exp_batch,
                     "compare-methods | config-impact | shift-impact | convergence | cost-table")
        ->required();
    exp_cmd->add_option("--generator", exp_generator, "er | sbm | both");
    exp_cmd->add_option("--nodes", exp_nodes, "node sizes")->delimiter(',');
    exp_cmd->add_option("--layers", exp_layers, "layer count");
    exp_cmd->add_option("--p-start", exp_p_start, "sweep start");
    exp_cmd->add_option("--p-stop", exp_p_stop, "sweep stop");
    exp_cmd->add_option("--p-step", exp_p_step, "sweep step");
    exp_cmd->add_option("--reps", exp_reps, "repetitions per sweep point");
    exp_cmd->add_option("--seed", exp_seed, "experiment seed");
    exp_cmd->add_flag("--deterministic", exp_deterministic, "suppress the timestamp header");
    exp_cmd->add_flag("--paper-scale", exp_paper, "full-size sweeps (slow)");
    exp_cmd->add_option("--damping", exp_damping, "PageRank damping");
    exp_cmd->add_option("--convergence-p", exp_conv_p, "layer probability of convergence instances");
    exp_cmd->add_option("--assessed", exp_assessed, "assessed halvings (convergence)");
    exp_cmd->add_option("--guard", exp_guard, "guard halvings beyond the assessed range");
    exp_cmd->add_option("--output,-o", exp_output, "CSV path (default stdout)");
    exp_cmd->add_option("--summary", exp_summary, "summary JSON path");
    exp_solver.attach(exp_cmd);

    // ---- cost-table
    auto* cost_cmd = app.add_subcommand("cost-table", "operation counts per method and size");
    std::string cost_output;
    std::uint32_t cost_layers = 2;
    bool cost_deterministic = false;
    cost_cmd->add_option("--layers", cost_layers, "layer count");
    cost_cmd->add_option("--output,-o", cost_output, "CSV path (default stdout)");
    cost_cmd->add_flag("--deterministic", cost_deterministic, "suppress the timestamp header");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            if (config_text.empty() && preset_name.empty())
                throw ConfigError("solve: pass --config or --preset");
            return run_solve(network_path, config_text, preset_name, damping, solver_flags,
                             with_trace, output, format);
        }
        if (gen_cmd->parsed())
            return run_generate(gen_kind, gen_nodes, gen_edge_prob, gen_blocks, gen_block_probs,
                                gen_layers, gen_layer_prob, gen_layer_probs, gen_exclusive,
                                gen_seed, gen_output);
        if (enum_cmd->parsed()) return run_enumerate(enum_layers, enum_k, enum_count);
        if (measure_cmd->parsed()) {
            nlohmann::json out;
            if (mj_cmd->parsed()) {
                out["multijaccard"] = multirank::multijaccard(load_multiplex_file(mj_network));
            } else if (tau_cmd->parsed()) {
                auto scheme = tau_scheme == "constant" ? WeightScheme::Constant
                                                       : WeightScheme::HyperbolicAdditive;
                ComparisonResult res =
                    weighted_kendall_tau(read_score_file(tau_a), read_score_file(tau_b), scheme);
                out["tau_w"] = res.tau_w;
                out["n_items"] = res.n_items;
                out["ties"] = {{"reference", res.ties.first},
                               {"compared", res.ties.second},
                               {"both", res.ties.both}};
            } else if (ci_cmd->parsed()) {
                ConfidenceInterval ci = confidence_interval(read_score_file(ci_file));
                out["ci_lo"] = ci.lo;
                out["ci_hi"] = ci.hi;
                out["mean"] = ci.mean;
            } else if (super_cmd->parsed()) {
                SuperpositionDiagnostic diag =
                    superposition_check(load_multiplex_file(super_network));
                out["irreducible"] = diag.irreducible;
                out["aperiodic"] = diag.aperiodic;
                out["period"] = diag.period;
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (exp_cmd->parsed()) {
            ExperimentPlan plan;
            plan.batch = parse_batch(exp_batch);
            plan.generators = parse_generators(exp_generator);
            plan.node_sizes = exp_nodes;
            plan.layer_count = exp_layers;
            plan.p_start = exp_p_start;
            plan.p_stop = exp_p_stop;
            plan.p_step = exp_p_step;
            plan.repetitions = exp_reps;
            plan.seed = exp_seed;
            plan.deterministic = exp_deterministic;
            plan.paper_scale = exp_paper;
            plan.damping = exp_damping;
            plan.convergence_layer_prob = exp_conv_p;
            plan.probe_assessed = exp_assessed;
            plan.probe_guard = exp_guard;
            plan.solver = exp_solver.settings();
            return run_experiment_cmd(std::move(plan), exp_output, exp_summary);
        }
        if (cost_cmd->parsed()) {
            ExperimentPlan plan;
            plan.batch = ExperimentPlan::Batch::CostTable;
            plan.layer_count = cost_layers;
            plan.deterministic = cost_deterministic;
            return run_experiment_cmd(std::move(plan), cost_output, "");
        }
    } catch (const multirank::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const multirank::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const multirank::DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return 3;
    } catch (const multirank::NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << " (" << e.trace().size()
                  << " tau stages recorded)\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
