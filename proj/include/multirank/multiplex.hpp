#pragma once

// Layered directed weighted graphs: sparse per-layer adjacency with a
// compiled row/column-compressed form for matvec, the multiplex container,
// L1-normalized score vectors, union-graph diagnostics, and edge-list I/O.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "multirank/detail/numeric.hpp"
#include "multirank/errors.hpp"

namespace multirank {

struct Edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Nonnegative weighted adjacency of one layer. Entries are kept sorted by
// (src, dst); absent entry means weight zero. The transpose is a view flag
// on apply(), never a materialized matrix.
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(std::size_t n, std::vector<Edge> entries) : n_(n), entries_(std::move(entries)) {
        for (const Edge& e : entries_) {
            if (e.src >= n_ || e.dst >= n_)
                throw std::invalid_argument("SparseMatrix: vertex index out of range");
            if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                throw std::invalid_argument("SparseMatrix: edge weight must be positive and finite");
        }
        std::sort(entries_.begin(), entries_.end(), [](const Edge& a, const Edge& b) {
            return a.src != b.src ? a.src < b.src : a.dst < b.dst;
        });
        for (std::size_t i = 1; i < entries_.size(); ++i) {
            if (entries_[i].src == entries_[i - 1].src && entries_[i].dst == entries_[i - 1].dst)
                throw std::invalid_argument("SparseMatrix: duplicate (src, dst) entry");
        }
        compile();
    }

    std::size_t size() const { return n_; }
    std::size_t edge_count() const { return entries_.size(); }
    const std::vector<Edge>& entries() const { return entries_; }

    // y = A x, or y = A^T x when transpose is set. Pure function of inputs.
    void apply(std::span<const double> x, std::span<double> y, bool transpose = false) const {
        if (x.size() != n_ || y.size() != n_)
            throw DimensionError("SparseMatrix::apply: vector length does not match matrix size");
        const auto& ptr = transpose ? tptr_ : ptr_;
        const auto& idx = transpose ? tidx_ : idx_;
        const auto& val = transpose ? tval_ : val_;
        for (std::size_t i = 0; i < n_; ++i) {
            double sum = 0.0;
            for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) sum += val[k] * x[idx[k]];
            y[i] = sum;
        }
    }

    std::vector<double> apply(std::span<const double> x, bool transpose = false) const {
        std::vector<double> y(n_);
        apply(x, y, transpose);
        return y;
    }

    // Row-major dense copy; intended for small instances and cross-checks.
    std::vector<double> to_dense(bool transpose = false) const {
        std::vector<double> d(n_ * n_, 0.0);
        for (const Edge& e : entries_) {
            if (transpose)
                d[static_cast<std::size_t>(e.dst) * n_ + e.src] = e.weight;
            else
                d[static_cast<std::size_t>(e.src) * n_ + e.dst] = e.weight;
        }
        return d;
    }

    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

private:
    void compile() {
        ptr_.assign(n_ + 1, 0);
        tptr_.assign(n_ + 1, 0);
        for (const Edge& e : entries_) {
            ++ptr_[e.src + 1];
            ++tptr_[e.dst + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) {
            ptr_[i + 1] += ptr_[i];
            tptr_[i + 1] += tptr_[i];
        }
        idx_.resize(entries_.size());
        val_.resize(entries_.size());
        tidx_.resize(entries_.size());
        tval_.resize(entries_.size());
        std::vector<std::size_t> cur(ptr_.begin(), ptr_.end() - 1);
        std::vector<std::size_t> tcur(tptr_.begin(), tptr_.end() - 1);
        for (const Edge& e : entries_) {
            std::size_t p = cur[e.src]++;
            idx_[p] = e.dst;
            val_[p] = e.weight;
            std::size_t q = tcur[e.dst]++;
            tidx_[q] = e.src;
            tval_[q] = e.weight;
        }
    }

    std::size_t n_ = 0;
    std::vector<Edge> entries_;
    std::vector<std::size_t> ptr_;   // CSR over src
    std::vector<std::uint32_t> idx_;
    std::vector<double> val_;
    std::vector<std::size_t> tptr_;  // CSR of the transpose (CSC)
    std::vector<std::uint32_t> tidx_;
    std::vector<double> tval_;
};

inline std::vector<double> matvec(const SparseMatrix& m, bool transpose, std::span<const double> v) {
    return m.apply(v, transpose);
}

// Shared vertex set plus an ordered list of directed layers.
class MultiplexNetwork {
public:
    MultiplexNetwork(std::size_t n, std::vector<SparseMatrix> layers,
                     std::vector<std::uint64_t> node_ids = {})
        : n_(n), layers_(std::move(layers)), node_ids_(std::move(node_ids)) {
        if (layers_.empty()) throw std::invalid_argument("MultiplexNetwork: at least one layer required");
        for (const SparseMatrix& l : layers_)
            if (l.size() != n_)
                throw std::invalid_argument("MultiplexNetwork: all layers must share the vertex count");
        if (node_ids_.empty()) {
            node_ids_.resize(n_);
            std::iota(node_ids_.begin(), node_ids_.end(), std::uint64_t{0});
        } else if (node_ids_.size() != n_) {
            throw std::invalid_argument("MultiplexNetwork: node id map length must equal vertex count");
        }
    }

    std::size_t node_count() const { return n_; }
    std::size_t layer_count() const { return layers_.size(); }
    const SparseMatrix& layer(std::size_t l) const { return layers_.at(l); }
    const std::vector<SparseMatrix>& layers() const { return layers_; }

    // External id of internal vertex i. Internal ids are compacted to [0, n).
    const std::vector<std::uint64_t>& node_ids() const { return node_ids_; }

    bool dense_ids() const {
        for (std::size_t i = 0; i < node_ids_.size(); ++i)
            if (node_ids_[i] != i) return false;
        return true;
    }

private:
    std::size_t n_;
    std::vector<SparseMatrix> layers_;
    std::vector<std::uint64_t> node_ids_;
};

// Nonnegative vector with entries summing to 1 (L1-normalized ranking).
class ScoreVector {
public:
    ScoreVector() = default;

    static ScoreVector uniform(std::size_t n) {
        if (n == 0) throw std::invalid_argument("ScoreVector: empty vector");
        ScoreVector r;
        r.values_.assign(n, 1.0 / static_cast<double>(n));
        return r;
    }

    // Divide by the L1 sum. Throws on negative entries or a nonpositive sum.
    static ScoreVector normalize(std::vector<double> raw) {
        if (raw.empty()) throw std::invalid_argument("ScoreVector: empty vector");
        for (double x : raw)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::invalid_argument("ScoreVector: entries must be finite and nonnegative");
        double sum = detail::compensated_sum(raw);
        if (!(sum > 0.0)) throw DegenerateInput("ScoreVector: cannot normalize a zero vector");
        for (double& x : raw) x /= sum;
        ScoreVector r;
        r.values_ = std::move(raw);
        return r;
    }

    // Accept values that are already normalized to within 1e-12.
    static ScoreVector from_normalized(std::vector<double> values) {
        if (values.empty()) throw std::invalid_argument("ScoreVector: empty vector");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::invalid_argument("ScoreVector: entries must be finite and nonnegative");
        double sum = detail::compensated_sum(values);
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("ScoreVector: entries must sum to 1 within 1e-12");
        ScoreVector r;
        r.values_ = std::move(values);
        return r;
    }

    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Union-graph diagnostics

struct SuperpositionDiagnostic {
    bool irreducible = false;  // union graph strongly connected
    bool aperiodic = false;    // gcd of cycle lengths equals 1
    std::size_t period = 0;    // 0 when the union graph has no cycle
};

namespace detail {

// Strongly connected components, iterative Tarjan. Returns component id per
// vertex; ids are in reverse topological order (unused here beyond counting).
inline std::vector<std::size_t> scc_ids(const std::vector<std::vector<std::uint32_t>>& adj,
                                        std::size_t& comp_count) {
    const std::size_t n = adj.size();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<std::uint32_t> stack;
    std::vector<char> on_stack(n, 0);
    std::size_t next_index = 0;
    comp_count = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    std::vector<Frame> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            auto& [v, child] = frames.back();
            if (child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (child < adj[v].size()) {
                std::uint32_t w = adj[v][child++];
                if (index[w] == kNone) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    std::uint32_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comp_count;
                    if (w == v) break;
                }
                ++comp_count;
            }
            std::uint32_t finished = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
        }
    }
    return comp;
}

// Period of one strongly connected component: gcd of (level(u) + 1 - level(v))
// over its internal edges, from a BFS labelling. 0 if the component is a
// single vertex without a self-loop.
inline std::size_t scc_period(const std::vector<std::vector<std::uint32_t>>& adj,
                              const std::vector<std::size_t>& comp, std::size_t target,
                              std::uint32_t start) {
    std::vector<long long> level(adj.size(), -1);
    std::vector<std::uint32_t> queue{start};
    level[start] = 0;
    long long g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        std::uint32_t u = queue[head];
        for (std::uint32_t w : adj[u]) {
            if (comp[w] != target) continue;
            if (level[w] < 0) {
                level[w] = level[u] + 1;
                queue.push_back(w);
            }
            g = std::gcd(g, std::llabs(level[u] + 1 - level[w]));
        }
    }
    // g stays 0 when every internal edge advances the BFS level by one and no
    // edge closes a cycle, i.e. the component is a lone vertex.
    return static_cast<std::size_t>(g);
}

}  // namespace detail

// Advisory check of the layer superposition G = (V, union of E_l): the solver
// runs regardless, but Perron-Frobenius guarantees at tau = 0 need the union
// to be irreducible and aperiodic.
inline SuperpositionDiagnostic superposition_check(const MultiplexNetwork& m) {
    const std::size_t n = m.node_count();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const SparseMatrix& layer : m.layers())
        for (const Edge& e : layer.entries()) adj[e.src].push_back(e.dst);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }

    SuperpositionDiagnostic diag;
    if (n == 0) return diag;
    std::size_t comp_count = 0;
    std::vector<std::size_t> comp = detail::scc_ids(adj, comp_count);
    diag.irreducible = comp_count == 1;

    // Overall period: gcd over the periods of all components that contain a
    // cycle. No cycles at all leaves period 0 and aperiodic false.
    std::vector<std::uint32_t> first(comp_count, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t v = 0; v < n; ++v) first[comp[v]] = std::min(first[comp[v]], v);
    std::size_t g = 0;
    for (std::size_t c = 0; c < comp_count; ++c) {
        std::size_t p = detail::scc_period(adj, comp, c, first[c]);
        g = std::gcd(g, p);
    }
    diag.period = g;
    diag.aperiodic = g == 1;
    return diag;
}

// ---------------------------------------------------------------------------
// Layered edge-list text format
//
//   # comment
//   nodes <n>          (optional: vertex ids are exactly 0..n-1, isolates kept)
//   layers <L>         (optional: declares layer count, empty layers allowed)
//   <layer> <src> <dst> <weight>
//
// Without a `nodes` header, vertex ids may be arbitrary nonnegative integers
// and are compacted to [0, n) in ascending order; the id map is persisted on
// the returned network. Without a `layers` header every layer id in
// [0, max layer] must occur at least once.

namespace detail {

struct RawEdge {
    std::uint64_t layer, src, dst;
    double weight;
    std::size_t line;
};

inline bool parse_u64(std::string_view tok, std::uint64_t& out) {
    if (tok.empty()) return false;
    std::uint64_t v = 0;
    for (char c : tok) {
        if (c < '0' || c > '9') return false;
        if (v > (std::numeric_limits<std::uint64_t>::max() - (c - '0')) / 10) return false;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    out = v;
    return true;
}

inline bool parse_double(const std::string& tok, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace detail

inline MultiplexNetwork load_multiplex(std::istream& in) {
    std::vector<detail::RawEdge> raw;
    std::uint64_t declared_nodes = 0, declared_layers = 0;
    bool has_nodes = false, has_layers = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        if (tok[0] == "nodes" || tok[0] == "layers") {
            std::uint64_t v = 0;
            if (tok.size() != 2 || !detail::parse_u64(tok[1], v))
                throw ParseError("malformed " + tok[0] + " header", line_no);
            (tok[0] == "nodes" ? declared_nodes : declared_layers) = v;
            (tok[0] == "nodes" ? has_nodes : has_layers) = true;
            continue;
        }
        if (tok.size() != 4) throw ParseError("expected `<layer> <src> <dst> <weight>`", line_no);
        detail::RawEdge e{};
        e.line = line_no;
        if (!detail::parse_u64(tok[0], e.layer)) throw ParseError("invalid layer id", line_no);
        if (!detail::parse_u64(tok[1], e.src)) throw ParseError("invalid source id", line_no);
        if (!detail::parse_u64(tok[2], e.dst)) throw ParseError("invalid destination id", line_no);
        if (!detail::parse_double(tok[3], e.weight)) throw ParseError("invalid weight", line_no);
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw ParseError("weight must be positive", line_no);
        raw.push_back(e);
    }

    std::uint64_t max_layer = 0;
    bool any = !raw.empty();
    for (const auto& e : raw) max_layer = std::max(max_layer, e.layer);
    std::size_t layer_count = has_layers ? declared_layers : (any ? max_layer + 1 : 0);
    if (layer_count == 0) throw ParseError("no layers: file has no edges and no `layers` header");
    std::vector<std::size_t> layer_first_line(layer_count, 0);
    for (const auto& e : raw) {
        if (e.layer >= layer_count)
            throw ParseError("layer id " + std::to_string(e.layer) + " exceeds declared layer count",
                             e.line);
        if (layer_first_line[e.layer] == 0) layer_first_line[e.layer] = e.line;
    }
    if (!has_layers) {
        for (std::size_t l = 0; l < layer_count; ++l)
            if (layer_first_line[l] == 0)
                throw ParseError("layer id gap: layer " + std::to_string(l) + " has no edges");
    }

    // Vertex id space.
    std::vector<std::uint64_t> ids;
    if (has_nodes) {
        for (const auto& e : raw) {
            if (e.src >= declared_nodes || e.dst >= declared_nodes)
                throw ParseError("vertex id exceeds declared node count", e.line);
        }
        ids.resize(declared_nodes);
        std::iota(ids.begin(), ids.end(), std::uint64_t{0});
    } else {
        ids.reserve(raw.size() * 2);
        for (const auto& e : raw) {
            ids.push_back(e.src);
            ids.push_back(e.dst);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    if (ids.empty()) throw ParseError("empty vertex set: declare `nodes <n>` or add edges");
    auto compact = [&](std::uint64_t ext) {
        return static_cast<std::uint32_t>(
            std::lower_bound(ids.begin(), ids.end(), ext) - ids.begin());
    };

    std::vector<std::vector<Edge>> per_layer(layer_count);
    for (const auto& e : raw)
        per_layer[e.layer].push_back(Edge{compact(e.src), compact(e.dst), e.weight});

    // Duplicate detection here, so the error can carry a line number.
    {
        std::vector<std::tuple<std::uint64_t, std::uint32_t, std::uint32_t, std::size_t>> keyed;
        keyed.reserve(raw.size());
        for (const auto& e : raw) keyed.emplace_back(e.layer, compact(e.src), compact(e.dst), e.line);
        std::sort(keyed.begin(), keyed.end());
        for (std::size_t k = 1; k < keyed.size(); ++k) {
            auto [la, sa, da, lna] = keyed[k - 1];
            auto [lb, sb, db, lnb] = keyed[k];
            if (la == lb && sa == sb && da == db)
                throw ParseError("duplicate edge in layer " + std::to_string(lb), lnb);
        }
    }

    const std::size_t n = ids.size();
    std::vector<SparseMatrix> layers;
    layers.reserve(layer_count);
    for (auto& edges : per_layer) layers.emplace_back(n, std::move(edges));
    return MultiplexNetwork(n, std::move(layers), std::move(ids));
}

inline MultiplexNetwork load_multiplex_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return load_multiplex(in);
}

// Canonical form: headers first, then edges sorted by (layer, src, dst) with
// round-trip-exact weights. load(save(m)) reproduces m, and saving a loaded
// canonical file reproduces it byte for byte.
inline void save_multiplex(const MultiplexNetwork& m, std::ostream& out) {
    char buf[64];
    if (m.dense_ids()) out << "nodes " << m.node_count() << "\n";
    out << "layers " << m.layer_count() << "\n";
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        for (const Edge& e : m.layer(l).entries()) {
            std::snprintf(buf, sizeof buf, "%.17g", e.weight);
            out << l << ' ' << m.node_ids()[e.src] << ' ' << m.node_ids()[e.dst] << ' ' << buf
                << "\n";
        }
    }
}

inline void save_multiplex_file(const MultiplexNetwork& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    save_multiplex(m, out);
}

}  // namespace multirank
