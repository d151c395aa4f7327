#pragma once

// Seeded random graph generators. Bases are sampled over unordered vertex
// pairs (no self-loops) and emitted as symmetric arc pairs with weight 1;
// the multiplex synthesizer then distributes base pairs across layers,
// either independently per layer or exclusively to one layer. Every draw is
// a counter-based hash of (seed, stream, pair, layer), so identical specs
// reproduce identical networks byte for byte.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "multirank/detail/rng.hpp"
#include "multirank/errors.hpp"
#include "multirank/multiplex.hpp"

namespace multirank {

struct ErdosRenyiSpec {
    std::uint32_t nodes = 0;
    double edge_prob = 0.0;
};

struct StochasticBlockModelSpec {
    std::uint32_t nodes = 0;
    std::vector<std::uint32_t> block_sizes;
    std::vector<double> probs;  // row-major |blocks| x |blocks|
};

struct GeneratorSpec {
    std::variant<ErdosRenyiSpec, StochasticBlockModelSpec> model;
    std::uint64_t seed = 0;
};

namespace detail {

inline void validate(const ErdosRenyiSpec& s) {
    if (s.nodes == 0) throw std::invalid_argument("erdos_renyi: nodes must be >= 1");
    if (!(s.edge_prob >= 0.0) || !(s.edge_prob <= 1.0))
        throw std::invalid_argument("erdos_renyi: edge probability must lie in [0, 1]");
}

inline void validate(const StochasticBlockModelSpec& s) {
    if (s.nodes == 0) throw std::invalid_argument("sbm: nodes must be >= 1");
    if (s.block_sizes.empty()) throw std::invalid_argument("sbm: need at least one block");
    std::uint64_t total = 0;
    for (std::uint32_t b : s.block_sizes) total += b;
    if (total != s.nodes) throw std::invalid_argument("sbm: block sizes must sum to node count");
    const std::size_t r = s.block_sizes.size();
    if (s.probs.size() != r * r)
        throw std::invalid_argument("sbm: probability matrix must be |blocks|^2 entries");
    for (double p : s.probs)
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::invalid_argument("sbm: probabilities must lie in [0, 1]");
}

}  // namespace detail

// Base graph draw: each unordered pair once, both directed arcs on success.
inline SparseMatrix generate_base(const GeneratorSpec& spec) {
    std::vector<Edge> edges;
    auto add_pair = [&](std::uint32_t i, std::uint32_t j) {
        edges.push_back(Edge{i, j, 1.0});
        edges.push_back(Edge{j, i, 1.0});
    };

    if (const auto* er = std::get_if<ErdosRenyiSpec>(&spec.model)) {
        detail::validate(*er);
        for (std::uint32_t i = 0; i < er->nodes; ++i)
            for (std::uint32_t j = i + 1; j < er->nodes; ++j)
                if (detail::unit_draw(spec.seed, detail::kStreamBaseEdge, i, j) < er->edge_prob)
                    add_pair(i, j);
        return SparseMatrix(er->nodes, std::move(edges));
    }

    const auto& sbm = std::get<StochasticBlockModelSpec>(spec.model);
    detail::validate(sbm);
    std::vector<std::uint32_t> block_of(sbm.nodes);
    std::uint32_t v = 0;
    for (std::uint32_t b = 0; b < sbm.block_sizes.size(); ++b)
        for (std::uint32_t k = 0; k < sbm.block_sizes[b]; ++k) block_of[v++] = b;
    const std::size_t r = sbm.block_sizes.size();
    for (std::uint32_t i = 0; i < sbm.nodes; ++i)
        for (std::uint32_t j = i + 1; j < sbm.nodes; ++j) {
            double p = sbm.probs[block_of[i] * r + block_of[j]];
            if (detail::unit_draw(spec.seed, detail::kStreamBaseEdge, i, j) < p) add_pair(i, j);
        }
    return SparseMatrix(sbm.nodes, std::move(edges));
}

struct MultiplexSpec {
    GeneratorSpec base;
    std::vector<double> layer_probs;
    bool independent = true;  // false: probs sum to 1, each pair goes to one layer
    std::uint64_t seed = 0;
};

inline void validate(const MultiplexSpec& spec) {
    if (spec.layer_probs.empty())
        throw std::invalid_argument("multiplex: need at least one layer probability");
    for (double p : spec.layer_probs)
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::invalid_argument("multiplex: layer probabilities must lie in [0, 1]");
    if (!spec.independent) {
        double sum = 0.0;
        for (double p : spec.layer_probs) sum += p;
        if (std::fabs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("multiplex: exclusive mode requires probabilities summing to 1");
    }
}

inline MultiplexNetwork generate_multiplex(const MultiplexSpec& spec) {
    validate(spec);
    SparseMatrix base = generate_base(spec.base);
    const std::size_t layer_count = spec.layer_probs.size();
    std::vector<std::vector<Edge>> per_layer(layer_count);

    for (const Edge& e : base.entries()) {
        if (e.src >= e.dst) continue;  // one decision per unordered pair
        if (spec.independent) {
            for (std::size_t l = 0; l < layer_count; ++l) {
                if (detail::unit_draw(spec.seed, detail::kStreamLayerCoin, e.src, e.dst, l) <
                    spec.layer_probs[l]) {
                    per_layer[l].push_back(Edge{e.src, e.dst, 1.0});
                    per_layer[l].push_back(Edge{e.dst, e.src, 1.0});
                }
            }
        } else {
            double u = detail::unit_draw(spec.seed, detail::kStreamLayerPick, e.src, e.dst);
            double acc = 0.0;
            std::size_t pick = layer_count - 1;
            for (std::size_t l = 0; l < layer_count; ++l) {
                acc += spec.layer_probs[l];
                if (u < acc) {
                    pick = l;
                    break;
                }
            }
            per_layer[pick].push_back(Edge{e.src, e.dst, 1.0});
            per_layer[pick].push_back(Edge{e.dst, e.src, 1.0});
        }
    }

    std::vector<SparseMatrix> layers;
    layers.reserve(layer_count);
    for (auto& edges : per_layer) layers.emplace_back(base.size(), std::move(edges));
    return MultiplexNetwork(base.size(), std::move(layers));
}

// ---------------------------------------------------------------------------
// JSON round trip for experiment files

inline nlohmann::json to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    if (const auto* er = std::get_if<ErdosRenyiSpec>(&spec.model)) {
        j["kind"] = "erdos-renyi";
        j["nodes"] = er->nodes;
        j["edge_prob"] = er->edge_prob;
    } else {
        const auto& sbm = std::get<StochasticBlockModelSpec>(spec.model);
        j["kind"] = "sbm";
        j["nodes"] = sbm.nodes;
        j["blocks"] = sbm.block_sizes;
        j["probs"] = sbm.probs;
    }
    j["seed"] = spec.seed;
    return j;
}

inline GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "erdos-renyi") {
        ErdosRenyiSpec er;
        er.nodes = j.at("nodes").get<std::uint32_t>();
        er.edge_prob = j.at("edge_prob").get<double>();
        spec.model = er;
    } else if (kind == "sbm") {
        StochasticBlockModelSpec sbm;
        sbm.nodes = j.at("nodes").get<std::uint32_t>();
        sbm.block_sizes = j.at("blocks").get<std::vector<std::uint32_t>>();
        sbm.probs = j.at("probs").get<std::vector<double>>();
        spec.model = sbm;
    } else {
        throw ParseError("generator spec: unknown kind '" + kind + "'");
    }
    return spec;
}

inline nlohmann::json to_json(const MultiplexSpec& spec) {
    nlohmann::json j;
    j["base"] = to_json(spec.base);
    j["layer_probs"] = spec.layer_probs;
    j["independent"] = spec.independent;
    j["seed"] = spec.seed;
    return j;
}

inline MultiplexSpec multiplex_spec_from_json(const nlohmann::json& j) {
    MultiplexSpec spec;
    spec.base = generator_spec_from_json(j.at("base"));
    spec.layer_probs = j.at("layer_probs").get<std::vector<double>>();
    spec.independent = j.value("independent", true);
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
}

}  // namespace multirank
