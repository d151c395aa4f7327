#pragma once

// Classic single-layer PageRank and HITS, the Google transition operator,
// and the preset configurations that express these methods (and their
// multiplex "-like" variants) inside the framework.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multirank/configurations.hpp"
#include "multirank/engine.hpp"
#include "multirank/errors.hpp"
#include "multirank/multiplex.hpp"

namespace multirank {

// damping * P + (1 - damping)/n * ones, where P is the column-normalized
// adjacency (columns = out-links of each vertex) with dangling columns
// replaced by uniform 1/n. Stored as the out-normalized sparse part plus the
// rank-one corrections, so apply() stays O(nnz + n).
class GoogleMatrix {
public:
    GoogleMatrix(const SparseMatrix& a, double damping) : n_(a.size()), d_(damping) {
        if (n_ == 0) throw DimensionError("GoogleMatrix: empty matrix");
        if (!(damping > 0.0) || !(damping < 1.0))
            throw std::invalid_argument("GoogleMatrix: damping must lie in (0, 1)");
        std::vector<double> out_sum(n_, 0.0);
        for (const Edge& e : a.entries()) out_sum[e.src] += e.weight;
        ptr_.assign(n_ + 1, 0);
        for (const Edge& e : a.entries()) ++ptr_[e.src + 1];
        for (std::size_t i = 0; i < n_; ++i) ptr_[i + 1] += ptr_[i];
        idx_.resize(a.edge_count());
        val_.resize(a.edge_count());
        std::vector<std::size_t> cur(ptr_.begin(), ptr_.end() - 1);
        for (const Edge& e : a.entries()) {
            std::size_t p = cur[e.src]++;
            idx_[p] = e.dst;
            val_[p] = e.weight / out_sum[e.src];
        }
        dangling_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) dangling_[i] = out_sum[i] == 0.0;
    }

    std::size_t size() const { return n_; }
    double damping() const { return d_; }

    void apply(std::span<const double> x, std::span<double> y, bool transpose = false) const {
        if (x.size() != n_ || y.size() != n_)
            throw DimensionError("GoogleMatrix::apply: vector length mismatch");
        double total = 0.0;
        for (double v : x) total += v;
        if (!transpose) {
            double dangling_mass = 0.0;
            for (std::size_t j = 0; j < n_; ++j)
                if (dangling_[j]) dangling_mass += x[j];
            const double shift = (d_ * dangling_mass + (1.0 - d_) * total) / static_cast<double>(n_);
            for (std::size_t i = 0; i < n_; ++i) y[i] = shift;
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = ptr_[j]; k < ptr_[j + 1]; ++k) y[idx_[k]] += d_ * val_[k] * x[j];
        } else {
            const double base = (1.0 - d_) * total / static_cast<double>(n_);
            const double dangling_shift = d_ * total / static_cast<double>(n_);
            for (std::size_t j = 0; j < n_; ++j) {
                double sum = 0.0;
                for (std::size_t k = ptr_[j]; k < ptr_[j + 1]; ++k) sum += val_[k] * x[idx_[k]];
                y[j] = d_ * sum + base + (dangling_[j] ? dangling_shift : 0.0);
            }
        }
    }

    std::vector<double> to_dense(bool transpose = false) const {
        std::vector<double> g(n_ * n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            const double col_base =
                ((1.0 - d_) + (dangling_[j] ? d_ : 0.0)) / static_cast<double>(n_);
            for (std::size_t i = 0; i < n_; ++i) g[i * n_ + j] = col_base;
            for (std::size_t k = ptr_[j]; k < ptr_[j + 1]; ++k) g[idx_[k] * n_ + j] += d_ * val_[k];
        }
        if (transpose) {
            std::vector<double> gt(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j) gt[j * n_ + i] = g[i * n_ + j];
            return gt;
        }
        return g;
    }

private:
    std::size_t n_;
    double d_;
    std::vector<std::size_t> ptr_;  // CSR over sources, out-normalized weights
    std::vector<std::uint32_t> idx_;
    std::vector<double> val_;
    std::vector<char> dangling_;
};

inline GoogleMatrix google_matrix(const SparseMatrix& a, double damping = 0.85) {
    return GoogleMatrix(a, damping);
}

// ---------------------------------------------------------------------------
// Native single-layer methods

inline ScoreVector classic_pagerank(const SparseMatrix& a, double damping = 0.85,
                                    double tol = 1e-12, std::size_t max_iters = 100000) {
    GoogleMatrix g(a, damping);
    std::vector<double> x(a.size(), 1.0 / static_cast<double>(a.size()));
    std::vector<double> y(a.size());
    for (std::size_t it = 0; it < max_iters; ++it) {
        g.apply(x, y);
        double norm = 0.0;
        for (double v : y) norm += v;
        detail::scale(y, 1.0 / norm);
        double delta = detail::l1_distance(x, y);
        x.swap(y);
        if (delta <= tol) return ScoreVector::normalize(std::move(x));
    }
    throw NonConvergence("classic_pagerank: iteration cap exhausted", {}, 0.0);
}

struct HitsScores {
    ScoreVector authority;
    ScoreVector hub;
};

// a <- A^T h, h <- A a with L1 normalization per half-step. L1 rather than
// the original L2 normalization; the ranking order is unaffected.
inline HitsScores classic_hits(const SparseMatrix& a, double tol = 1e-12,
                               std::size_t max_iters = 100000) {
    const std::size_t n = a.size();
    if (n == 0) throw DimensionError("classic_hits: empty matrix");
    std::vector<double> hub(n, 1.0 / static_cast<double>(n));
    std::vector<double> auth(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    auto half_step = [&](std::vector<double>& dst, const std::vector<double>& src, bool transpose) {
        a.apply(src, next, transpose);
        double norm = 0.0;
        for (double v : next) norm += v;
        if (!(norm > 0.0))
            throw DegenerateInput("classic_hits: iterate vanished (no in-links or out-links)");
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= norm;
            delta += std::fabs(next[i] - dst[i]);
        }
        dst.swap(next);
        return delta;
    };
    for (std::size_t it = 0; it < max_iters; ++it) {
        double da = half_step(auth, hub, true);
        double dh = half_step(hub, auth, false);
        if (da + dh <= tol)
            return {ScoreVector::normalize(std::move(auth)), ScoreVector::normalize(std::move(hub))};
    }
    throw NonConvergence("classic_hits: iteration cap exhausted", {}, 0.0);
}

// Plain power iteration x <- A x / ||A x||_1. Used as the per-layer reference
// for the versatile-like preset in the experiment harness.
inline ScoreVector eigenvector_centrality(const SparseMatrix& a, double tol = 1e-12,
                                          std::size_t max_iters = 100000) {
    const std::size_t n = a.size();
    if (n == 0) throw DimensionError("eigenvector_centrality: empty matrix");
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> y(n);
    for (std::size_t it = 0; it < max_iters; ++it) {
        a.apply(x, y);
        double norm = 0.0;
        for (double v : y) norm += v;
        if (!(norm > 0.0)) throw DegenerateInput("eigenvector_centrality: iterate vanished");
        detail::scale(y, 1.0 / norm);
        double delta = detail::l1_distance(x, y);
        x.swap(y);
        if (delta <= tol) return ScoreVector::normalize(std::move(x));
    }
    throw NonConvergence("eigenvector_centrality: iteration cap exhausted", {}, 0.0);
}

// ---------------------------------------------------------------------------
// Presets

enum class PresetKind { PageRank, Hits, PageRankLike, HitsLike, VersatileLike };

inline std::string to_string(PresetKind k) {
    switch (k) {
        case PresetKind::PageRank: return "pagerank";
        case PresetKind::Hits: return "hits";
        case PresetKind::PageRankLike: return "pagerank-like";
        case PresetKind::HitsLike: return "hits-like";
        case PresetKind::VersatileLike: return "versatile-like";
    }
    return "?";
}

inline PresetKind parse_preset(std::string_view name) {
    if (name == "pagerank") return PresetKind::PageRank;
    if (name == "hits") return PresetKind::Hits;
    if (name == "pagerank-like") return PresetKind::PageRankLike;
    if (name == "hits-like") return PresetKind::HitsLike;
    if (name == "versatile-like") return PresetKind::VersatileLike;
    throw ConfigError("unknown preset: " + std::string(name));
}

struct BaselinePreset {
    PresetKind kind;
    double damping = 0.85;  // PageRank kinds only
};

struct PresetPlan {
    bool google_transform;  // solve over Google-transformed layers
    ShiftedConfiguration configuration;
};

// pagerank-like: Google-transformed layers, written order A0 A1 ... A_{L-1}.
// hits-like:     raw layers, written order A0T A0 A1T A1 ... (so r_0 is the
//                layer-0 authority, r_1 the layer-0 hub, and so on).
// versatile-like: raw layers, written order A0 A1 ... A_{L-1}.
// pagerank/hits: the single-layer ring formulations (self-loop over the
//                Google matrix; the two-node A^T/A ring), layer count 1 only.
inline PresetPlan preset_configuration(PresetKind kind, std::size_t layer_count) {
    if (layer_count < 1) throw ConfigError("preset_configuration: layer count must be >= 1");
    AtomSequence seq;
    switch (kind) {
        case PresetKind::PageRank:
            if (layer_count != 1)
                throw ConfigError("preset 'pagerank' is single-layer; use 'pagerank-like'");
            return {true, shifted_from_sequence({Atom{0, false}})};
        case PresetKind::Hits:
            if (layer_count != 1)
                throw ConfigError("preset 'hits' is single-layer; use 'hits-like'");
            return {false, shifted_from_sequence({Atom{0, true}, Atom{0, false}})};
        case PresetKind::PageRankLike:
        case PresetKind::VersatileLike:
            for (std::uint32_t l = 0; l < layer_count; ++l) seq.push_back(Atom{l, false});
            return {kind == PresetKind::PageRankLike, shifted_from_sequence(seq)};
        case PresetKind::HitsLike:
            for (std::uint32_t l = 0; l < layer_count; ++l) {
                seq.push_back(Atom{l, true});
                seq.push_back(Atom{l, false});
            }
            return {false, shifted_from_sequence(seq)};
    }
    throw ConfigError("preset_configuration: unknown preset kind");
}

inline SolveReport solve_preset(const MultiplexNetwork& m, const BaselinePreset& preset,
                                const SolverSettings& settings = {}) {
    PresetPlan plan = preset_configuration(preset.kind, m.layer_count());
    if (plan.google_transform) {
        std::vector<GoogleMatrix> mats;
        mats.reserve(m.layer_count());
        for (const SparseMatrix& layer : m.layers()) mats.emplace_back(layer, preset.damping);
        return solve_over<GoogleMatrix>(mats, plan.configuration, settings);
    }
    return solve_over<SparseMatrix>(m.layers(), plan.configuration, settings);
}

}  // namespace multirank
