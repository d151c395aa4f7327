#pragma once

// Perturbed Perron-Frobenius solver. A configuration member selects an
// ordered chain of layer matrices M_0..M_{K-1}; the solver power-iterates
// the perturbed composition M(tau) = (M_0 + tau I)...(M_{K-1} + tau I),
// halving tau between stages and warm-starting each stage from the previous
// fixed point, until consecutive stage fixed points agree in L1. For every
// tau > 0 the composition is irreducible and aperiodic, so each stage has a
// unique positive fixed point even when the unperturbed product is reducible
// or outright zero. The remaining ring rankings r_1..r_{K-1} are recovered
// by walking the perturbed chain once at the final tau.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "multirank/configurations.hpp"
#include "multirank/detail/numeric.hpp"
#include "multirank/errors.hpp"
#include "multirank/multiplex.hpp"

namespace multirank {

template <typename Op>
concept VertexOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.size() } -> std::convertible_to<std::size_t>;
    { op.apply(x, y, bool{}) };
    { op.to_dense(bool{}) } -> std::convertible_to<std::vector<double>>;
};

enum class EvalMode {
    MatvecChain,      // K sparse matvecs per iteration; never forms the product
    ExplicitProduct,  // dense K-factor product per stage; small n and cross-checks
};

struct SolverSettings {
    double tau0 = 0.5;
    double inner_tol = 1e-13;   // L1 stop for the power iteration at fixed tau
    double outer_tol = 1e-10;   // L1 stop between consecutive tau-stage fixed points
    std::size_t max_inner_iters = 100000;
    std::size_t max_outer_halvings = 60;
    EvalMode eval_mode = EvalMode::MatvecChain;
    double tau_factor = 0.5;    // advanced: per-stage shrink factor in (0,1)

    void validate() const {
        if (!(tau0 > 0.0) || !(tau0 < 1.0))
            throw std::invalid_argument("SolverSettings: tau0 must lie in (0, 1)");
        if (!(inner_tol > 0.0) || !(outer_tol > 0.0))
            throw std::invalid_argument("SolverSettings: tolerances must be positive");
        if (max_inner_iters < 1 || max_outer_halvings < 1)
            throw std::invalid_argument("SolverSettings: iteration caps must be >= 1");
        if (!(tau_factor > 0.0) || !(tau_factor < 1.0))
            throw std::invalid_argument("SolverSettings: tau_factor must lie in (0, 1)");
    }
};

struct TauStage {
    double tau = 0.0;
    std::size_t inner_iterations = 0;
    double l1_delta = 0.0;     // distance to the previous stage's fixed point
    double eigenvalue = 0.0;   // ||M(tau) r||_1 at the stage fixed point
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, std::vector<TauStage> trace, double tau)
        : std::runtime_error(what), trace_(std::move(trace)), tau_(tau) {}
    const std::vector<TauStage>& trace() const { return trace_; }
    double tau() const { return tau_; }

private:
    std::vector<TauStage> trace_;
    double tau_;
};

struct SolveReport {
    std::vector<ScoreVector> rankings;  // r_0 .. r_{K-1} for the selected member
    double final_tau = 0.0;
    std::vector<TauStage> trace;
    double eigenvalue = 0.0;
    // ||M_s(tau) r_{s+1}||_1 recorded while walking the ring, indexed by s =
    // 1..K-1; the inverse per-step normalization factors of the recovery rule.
    std::vector<double> propagation_norms;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["rankings"] = nlohmann::json::array();
        for (const ScoreVector& r : rankings) j["rankings"].push_back(r.values());
        j["final_tau"] = final_tau;
        j["eigenvalue"] = eigenvalue;
        j["trace"] = nlohmann::json::array();
        for (const TauStage& t : trace)
            j["trace"].push_back({{"tau", t.tau},
                                  {"inner_iterations", t.inner_iterations},
                                  {"l1_delta", t.l1_delta},
                                  {"eigenvalue", t.eigenvalue}});
        j["propagation_norms"] = propagation_norms;
        return j;
    }
};

template <VertexOperator Op>
struct ChainStep {
    const Op* matrix = nullptr;
    bool transposed = false;
};

// Resolve a member sequence against the layer list; atoms must reference
// existing layers of a common size.
template <VertexOperator Op>
std::vector<ChainStep<Op>> resolve_chain(std::span<const Op> layers, const AtomSequence& seq) {
    if (layers.empty()) throw ConfigError("resolve_chain: no layers");
    const std::size_t n = layers[0].size();
    for (const Op& l : layers)
        if (l.size() != n) throw DimensionError("resolve_chain: layers differ in size");
    std::vector<ChainStep<Op>> chain;
    chain.reserve(seq.size());
    for (const Atom& a : seq) {
        if (a.layer >= layers.size())
            throw ConfigError("resolve_chain: atom " + to_string(a) + " references a missing layer");
        chain.push_back({&layers[a.layer], a.transposed});
    }
    return chain;
}

// v <- M(tau) v, evaluated right to left as v <- M_s v + tau v.
template <VertexOperator Op>
void apply_perturbed_chain_inplace(std::span<const ChainStep<Op>> chain, double tau,
                                   std::vector<double>& v, std::vector<double>& scratch) {
    scratch.resize(v.size());
    for (std::size_t s = chain.size(); s-- > 0;) {
        chain[s].matrix->apply(v, scratch, chain[s].transposed);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = scratch[i] + tau * v[i];
    }
}

template <VertexOperator Op>
std::vector<double> apply_perturbed_chain(std::span<const ChainStep<Op>> chain, double tau,
                                          std::span<const double> v) {
    if (!chain.empty() && v.size() != chain[0].matrix->size())
        throw DimensionError("apply_perturbed_chain: vector length mismatch");
    std::vector<double> out(v.begin(), v.end());
    std::vector<double> scratch;
    apply_perturbed_chain_inplace(chain, tau, out, scratch);
    return out;
}

namespace detail {

inline void dense_matvec(const std::vector<double>& a, std::span<const double> x,
                         std::span<double> y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        const double* row = a.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) sum += row[j] * x[j];
        y[i] = sum;
    }
}

inline std::vector<double> dense_matmul(const std::vector<double>& a, const std::vector<double>& b,
                                        std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double aik = a[i * n + k];
            if (aik == 0.0) continue;
            const double* brow = b.data() + k * n;
            double* crow = c.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    return c;
}

}  // namespace detail

// Dense composition (M_0 + tau I)(M_1 + tau I)...(M_{K-1} + tau I), row-major.
// Accumulated right to left in a fixed order, so results are reproducible.
template <VertexOperator Op>
std::vector<double> explicit_product(std::span<const ChainStep<Op>> chain, double tau,
                                     std::size_t n) {
    auto factor = [&](const ChainStep<Op>& step) {
        std::vector<double> f = step.matrix->to_dense(step.transposed);
        for (std::size_t i = 0; i < n; ++i) f[i * n + i] += tau;
        return f;
    };
    if (chain.empty()) throw ConfigError("explicit_product: empty chain");
    std::vector<double> p = factor(chain.back());
    for (std::size_t s = chain.size() - 1; s-- > 0;)
        p = detail::dense_matmul(factor(chain[s]), p, n);
    return p;
}

// Dense M(tau) for the written member of a shifted configuration.
inline std::vector<double> composition_matrix(const MultiplexNetwork& m,
                                              const ShiftedConfiguration& sc, double tau) {
    auto chain = resolve_chain<SparseMatrix>(m.layers(), sc.sequence());
    return explicit_product<SparseMatrix>(chain, tau, m.node_count());
}

namespace detail {

struct StageOutcome {
    std::size_t iterations = 0;
    double eigenvalue = 0.0;
};

// Power iteration at fixed tau until the L1 step falls below inner_tol.
// r must be L1-normalized on entry and stays so. The perturbed composition
// maps a nonnegative nonzero vector to a nonnegative nonzero vector whenever
// tau > 0, so a vanishing norm indicates a bug rather than bad input.
template <typename ApplyFn>
StageOutcome power_stage(ApplyFn&& apply_composition, std::vector<double>& r,
                         const SolverSettings& s, double tau, std::vector<TauStage>& trace) {
    std::vector<double> next(r.size());
    StageOutcome out;
    double last_delta = 0.0;
    for (std::size_t it = 1; it <= s.max_inner_iters; ++it) {
        apply_composition(r, next);
        double norm = 0.0;
        for (double x : next) norm += x;
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::logic_error("power_stage: vanished or non-finite iterate at tau > 0");
        double inv = 1.0 / norm;
        double delta = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            next[i] *= inv;
            delta += std::fabs(next[i] - r[i]);
        }
        r.swap(next);
        out.iterations = it;
        out.eigenvalue = norm;
        last_delta = delta;
        if (delta <= s.inner_tol) return out;
    }
    trace.push_back({tau, out.iterations, last_delta, out.eigenvalue});
    throw NonConvergence("inner iteration cap exhausted at tau = " + std::to_string(tau), trace,
                         tau);
}

// Runs tau stages with warm starts. Returns when two consecutive stage fixed
// points are within outer_tol (converged = true), or after max_stages stages
// when stop_on_outer_tol is false (the probe path).
template <VertexOperator Op, typename OnStage>
void tau_schedule(std::span<const ChainStep<Op>> chain, std::size_t n, const SolverSettings& s,
                  std::size_t max_stages, bool stop_on_outer_tol, std::vector<double>& r,
                  std::vector<TauStage>& trace, double& final_tau, bool& converged,
                  OnStage&& on_stage) {
    r.assign(n, 1.0 / static_cast<double>(n));
    std::vector<double> scratch(n);
    std::vector<double> previous = r;
    double tau = s.tau0;
    converged = false;
    for (std::size_t h = 0; h < max_stages; ++h) {
        StageOutcome stage;
        if (s.eval_mode == EvalMode::ExplicitProduct) {
            std::vector<double> product = explicit_product(chain, tau, n);
            stage = power_stage(
                [&](const std::vector<double>& x, std::vector<double>& y) {
                    dense_matvec(product, x, y, n);
                },
                r, s, tau, trace);
        } else {
            stage = power_stage(
                [&](const std::vector<double>& x, std::vector<double>& y) {
                    y = x;
                    apply_perturbed_chain_inplace(chain, tau, y, scratch);
                },
                r, s, tau, trace);
        }
        double delta = l1_distance(r, previous);
        trace.push_back({tau, stage.iterations, delta, stage.eigenvalue});
        on_stage(h, tau, r, stage);
        if (stop_on_outer_tol && h >= 1 && delta <= s.outer_tol) {
            final_tau = tau;
            converged = true;
            return;
        }
        previous = r;
        tau *= s.tau_factor;
    }
    final_tau = tau / s.tau_factor;  // tau of the last executed stage
}

}  // namespace detail

// Recover r_{K-1}, r_{K-2}, ..., r_1 from r_0 by one pass around the ring:
// r_{s-1} proportional to M_{s-1}(tau) r_s, normalized at each step. The
// denominators are strictly positive for tau > 0.
template <VertexOperator Op>
std::vector<ScoreVector> propagate_scores(std::span<const ChainStep<Op>> chain,
                                          const ScoreVector& r0, double tau_final,
                                          std::vector<double>* step_norms = nullptr) {
    if (!(tau_final > 0.0)) throw std::invalid_argument("propagate_scores: tau must be positive");
    const std::size_t k = chain.size();
    std::vector<ScoreVector> rankings(k);
    rankings[0] = r0;
    if (step_norms) step_norms->assign(k > 0 ? k - 1 : 0, 0.0);
    std::vector<double> cur = r0.values();
    std::vector<double> next(cur.size());
    for (std::size_t s = k; s-- > 1;) {
        chain[s].matrix->apply(cur, next, chain[s].transposed);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i] += tau_final * cur[i];
        if (step_norms) (*step_norms)[s - 1] = detail::l1_norm(next);
        rankings[s] = ScoreVector::normalize(next);
        cur = rankings[s].values();
    }
    return rankings;
}

template <VertexOperator Op>
std::vector<ScoreVector> propagate_scores(std::span<const Op> layers,
                                          const ShiftedConfiguration& sc, const ScoreVector& r0,
                                          double tau_final) {
    auto chain = resolve_chain(layers, sc.sequence());
    return propagate_scores<Op>(chain, r0, tau_final);
}

inline std::vector<ScoreVector> propagate_scores(const MultiplexNetwork& m,
                                                 const ShiftedConfiguration& sc,
                                                 const ScoreVector& r0, double tau_final) {
    return propagate_scores<SparseMatrix>(m.layers(), sc, r0, tau_final);
}

template <VertexOperator Op>
SolveReport solve_over(std::span<const Op> layers, const ShiftedConfiguration& sc,
                       const SolverSettings& settings) {
    settings.validate();
    auto chain = resolve_chain(layers, sc.sequence());
    const std::size_t n = layers[0].size();
    if (n == 0) throw DimensionError("solve: empty vertex set");

    std::vector<double> r;
    std::vector<TauStage> trace;
    double final_tau = 0.0;
    bool converged = false;
    detail::tau_schedule<Op>(
        std::span<const ChainStep<Op>>(chain), n, settings, settings.max_outer_halvings,
        /*stop_on_outer_tol=*/true, r, trace, final_tau, converged,
        [](std::size_t, double, const std::vector<double>&, const detail::StageOutcome&) {});
    if (!converged)
        throw NonConvergence("outer halving cap exhausted without stage agreement", trace,
                             final_tau);

    SolveReport report;
    report.final_tau = final_tau;
    report.trace = std::move(trace);
    report.eigenvalue = report.trace.back().eigenvalue;
    report.rankings =
        propagate_scores<Op>(std::span<const ChainStep<Op>>(chain), ScoreVector::normalize(r),
                             final_tau, &report.propagation_norms);
    return report;
}

inline SolveReport solve(const MultiplexNetwork& m, const ShiftedConfiguration& sc,
                         const SolverSettings& settings = {}) {
    return solve_over<SparseMatrix>(m.layers(), sc, settings);
}

// ---------------------------------------------------------------------------
// Convergence probe

struct ProbeStage {
    double tau = 0.0;
    std::vector<double> vector;
    double error = 0.0;  // L1 distance to the reference (smallest-tau) vector
    std::size_t inner_iterations = 0;
};

struct ProbeReport {
    std::vector<ProbeStage> stages;      // the assessed prefix of the schedule
    std::vector<double> reference;       // fixed point at the smallest tau
    double reference_tau = 0.0;
};

// Runs assessed + guard stages unconditionally (outer_tol is ignored) and
// reports the first `assessed` fixed points with their L1 error against the
// final vector, which stands in for the tau -> 0 limit. The guard keeps the
// reference well below the assessed taus so the proxy error is clean.
template <VertexOperator Op>
ProbeReport convergence_probe(std::span<const Op> layers, const ShiftedConfiguration& sc,
                              const SolverSettings& settings, std::size_t assessed_stages,
                              std::size_t guard_stages = 15) {
    settings.validate();
    if (assessed_stages < 1) throw std::invalid_argument("convergence_probe: need >= 1 stage");
    auto chain = resolve_chain(layers, sc.sequence());
    const std::size_t n = layers[0].size();

    ProbeReport report;
    report.stages.reserve(assessed_stages);
    std::vector<double> r;
    std::vector<TauStage> trace;
    double final_tau = 0.0;
    bool converged = false;
    detail::tau_schedule<Op>(
        std::span<const ChainStep<Op>>(chain), n, settings, assessed_stages + guard_stages,
        /*stop_on_outer_tol=*/false, r, trace, final_tau, converged,
        [&](std::size_t h, double tau, const std::vector<double>& fixed_point,
            const detail::StageOutcome& stage) {
            if (h < assessed_stages)
                report.stages.push_back({tau, fixed_point, 0.0, stage.iterations});
        });
    report.reference = r;
    report.reference_tau = final_tau;
    for (ProbeStage& st : report.stages)
        st.error = detail::l1_distance(st.vector, report.reference);
    return report;
}

inline ProbeReport convergence_probe(const MultiplexNetwork& m, const ShiftedConfiguration& sc,
                                     const SolverSettings& settings, std::size_t assessed_stages,
                                     std::size_t guard_stages = 15) {
    return convergence_probe<SparseMatrix>(m.layers(), sc, settings, assessed_stages, guard_stages);
}

}  // namespace multirank
