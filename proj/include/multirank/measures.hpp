#pragma once

// Ranking-comparison and overlap measures: weighted Kendall tau with ties,
// the MultiJaccard layer-overlap coefficient, Student-t confidence
// intervals, and the per-iteration operation-count model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multirank/detail/numeric.hpp"
#include "multirank/detail/student_t.hpp"
#include "multirank/errors.hpp"
#include "multirank/multiplex.hpp"

namespace multirank {

enum class WeightScheme {
    HyperbolicAdditive,  // w(i,j) = 1/(rank_i + 1) + 1/(rank_j + 1), reference ranks
    Constant,            // w(i,j) = 1; reduces to the classic tie-adjusted tau
};

struct TieCounts {
    std::uint64_t first = 0;   // pairs tied in the reference ranking
    std::uint64_t second = 0;  // pairs tied in the compared ranking
    std::uint64_t both = 0;    // pairs tied in both
};

struct ComparisonResult {
    double tau_w = 0.0;
    std::size_t n_items = 0;
    TieCounts ties;
};

namespace detail {

// Fenwick tree accumulating (count, weight sum) per dense rank.
struct WeightedBit {
    explicit WeightedBit(std::size_t n) : count(n + 1, 0), weight(n + 1, 0.0) {}

    void add(std::size_t rank, double f) {
        for (std::size_t i = rank + 1; i < count.size(); i += i & (~i + 1)) {
            count[i] += 1;
            weight[i] += f;
        }
    }

    // Totals over ranks strictly below `rank`.
    std::pair<std::uint64_t, double> prefix(std::size_t rank) const {
        std::uint64_t c = 0;
        double w = 0.0;
        for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) {
            c += count[i];
            w += weight[i];
        }
        return {c, w};
    }

    std::vector<std::uint64_t> count;
    std::vector<double> weight;
};

}  // namespace detail

// tau_w = <r,s>_w / (||r||_w ||s||_w) with
//   <r,s>_w = sum_{i<j} w(i,j) sgn(r_i - r_j) sgn(s_i - s_j),
// so tied pairs contribute zero to the inner product and drop out of the
// norm of the ranking they are tied in. Weights come from the ranks of the
// reference (first) ranking, ties sharing their average rank. Runs in
// O(n log n): discordances are counted against a Fenwick tree over the
// dense ranks of s while sweeping r in descending order.
inline ComparisonResult weighted_kendall_tau(std::span<const double> r, std::span<const double> s,
                                             WeightScheme scheme = WeightScheme::HyperbolicAdditive) {
    const std::size_t n = r.size();
    if (s.size() != n) throw DimensionError("weighted_kendall_tau: length mismatch");
    if (n < 2) throw std::invalid_argument("weighted_kendall_tau: need at least two items");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(r[i]) || !std::isfinite(s[i]))
            throw std::invalid_argument("weighted_kendall_tau: non-finite score");

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (r[a] != r[b]) return r[a] > r[b];
        return a < b;
    });

    // Reference ranks (descending, average over ties) -> per-item weight f.
    std::vector<double> f(n);
    std::vector<std::uint32_t> r_group(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && r[order[j]] == r[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j - 1);
        const double fi = scheme == WeightScheme::HyperbolicAdditive ? 1.0 / (avg_rank + 1.0) : 0.5;
        for (std::size_t k = i; k < j; ++k) {
            f[order[k]] = fi;
            r_group[order[k]] = static_cast<std::uint32_t>(j - i);
        }
        i = j;
    }

    // Dense ranks of s (ascending) and s-group sizes.
    std::vector<double> s_sorted(s.begin(), s.end());
    std::sort(s_sorted.begin(), s_sorted.end());
    s_sorted.erase(std::unique(s_sorted.begin(), s_sorted.end()), s_sorted.end());
    std::vector<std::uint32_t> s_rank(n), s_group_of_rank(s_sorted.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        s_rank[i] = static_cast<std::uint32_t>(
            std::lower_bound(s_sorted.begin(), s_sorted.end(), s[i]) - s_sorted.begin());
        ++s_group_of_rank[s_rank[i]];
    }

    // Joint (r, s) group sizes for the untied-in-both total.
    std::vector<std::uint32_t> rs_group(n);
    {
        std::vector<std::uint32_t> joint(order.begin(), order.end());
        std::sort(joint.begin(), joint.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (r[a] != r[b]) return r[a] < r[b];
            return s[a] < s[b];
        });
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && r[joint[j]] == r[joint[i]] && s[joint[j]] == s[joint[i]]) ++j;
            for (std::size_t k = i; k < j; ++k) rs_group[joint[k]] = static_cast<std::uint32_t>(j - i);
            i = j;
        }
    }

    // sum_i f_i * |{j untied with i}| equals sum over untied pairs of
    // (f_i + f_j): each endpoint contributes its own half of the weight.
    double norm_r_sq = 0.0, norm_s_sq = 0.0, untied_both = 0.0;
    TieCounts ties;
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f[i];
        const auto rg = r_group[i];
        const auto sg = s_group_of_rank[s_rank[i]];
        norm_r_sq += fi * static_cast<double>(n - rg);
        norm_s_sq += fi * static_cast<double>(n - sg);
        untied_both += fi * static_cast<double>(n - rg - sg + rs_group[i]);
    }

    // Discordant weight: sweep r descending; previously inserted items have
    // strictly larger r, so a pair is discordant exactly when the new item's
    // s is strictly larger. Equal-r groups are flushed together so pairs
    // tied in r are never queried against each other.
    double discordant = 0.0;
    detail::WeightedBit bit(s_sorted.size());
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && r[order[j]] == r[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            const std::uint32_t item = order[k];
            auto [c, w] = bit.prefix(s_rank[item]);
            discordant += static_cast<double>(c) * f[item] + w;
        }
        for (std::size_t k = i; k < j; ++k) bit.add(s_rank[order[k]], f[order[k]]);
        i = j;
    }

    const double inner = untied_both - 2.0 * discordant;
    if (!(norm_r_sq > 0.0) || !(norm_s_sq > 0.0))
        throw DegenerateInput("weighted_kendall_tau: all-tied ranking has zero weighted norm");

    // each group of size g contributes g*(g-1)/2 tied pairs; summing (g-1)
    // per member and halving counts them without revisiting the groups
    std::uint64_t first2 = 0, second2 = 0, both2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        first2 += r_group[i] - 1;
        second2 += s_group_of_rank[s_rank[i]] - 1;
        both2 += rs_group[i] - 1;
    }
    ties.first = first2 / 2;
    ties.second = second2 / 2;
    ties.both = both2 / 2;

    ComparisonResult result;
    result.tau_w = inner / std::sqrt(norm_r_sq * norm_s_sq);
    result.n_items = n;
    result.ties = ties;
    return result;
}

// Concatenation of several rankings into one comparable score vector: block k
// occupies the rank range after block k-1, with within-block order given by
// descending scores and ties sharing their average rank. Cross-block pairs
// are ordered by block position in every concatenation built this way, so a
// comparison of two methods' concatenations is decided by their within-block
// agreement and is insensitive to floating-point noise between blocks that
// carry the same scores.
inline std::vector<double> concatenate_rankings(const std::vector<ScoreVector>& blocks) {
    std::size_t total = 0;
    for (const ScoreVector& b : blocks) total += b.size();
    std::vector<double> out(total);
    std::size_t offset = 0;
    for (const ScoreVector& block : blocks) {
        const std::vector<double>& v = block.values();
        const std::size_t n = v.size();
        std::vector<std::uint32_t> ord(n);
        std::iota(ord.begin(), ord.end(), 0u);
        std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (v[a] != v[b]) return v[a] > v[b];
            return a < b;
        });
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && v[ord[j]] == v[ord[i]]) ++j;
            const double avg_rank = 0.5 * static_cast<double>(i + j - 1);
            for (std::size_t k = i; k < j; ++k)
                out[offset + ord[k]] = -(static_cast<double>(offset) + avg_rank);
            i = j;
        }
        offset += n;
    }
    return out;
}

// ---------------------------------------------------------------------------
// MultiJaccard

namespace detail {

inline double edge_jaccard(const std::vector<Edge>& a, const std::vector<Edge>& b) {
    if (a.empty() && b.empty()) return 1.0;  // identical (empty) layers
    std::size_t inter = 0, i = 0, j = 0;
    auto key = [](const Edge& e) { return std::pair<std::uint32_t, std::uint32_t>{e.src, e.dst}; };
    while (i < a.size() && j < b.size()) {
        if (key(a[i]) == key(b[j])) {
            ++inter;
            ++i;
            ++j;
        } else if (key(a[i]) < key(b[j])) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

// Mean Jaccard similarity of layer edge sets over all ordered layer pairs.
// Edge identity is the (src, dst) pair; weights are ignored.
inline double multijaccard(const MultiplexNetwork& m) {
    const std::size_t layers = m.layer_count();
    if (layers < 2) throw std::invalid_argument("multijaccard: need at least two layers");
    double total = 0.0;
    for (std::size_t a = 0; a < layers; ++a)
        for (std::size_t b = 0; b < layers; ++b) {
            if (a == b) continue;
            total += detail::edge_jaccard(m.layer(a).entries(), m.layer(b).entries());
        }
    return total / static_cast<double>(layers * (layers - 1));
}

// ---------------------------------------------------------------------------
// Confidence intervals

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
};

// Two-sided 95% Student-t interval with the unbiased (N-1) deviation.
// Corrected two-pass sum of squares, so constant samples give width zero.
inline ConfidenceInterval confidence_interval(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("confidence_interval: need at least two samples");
    bool constant = true;
    for (double x : samples) constant = constant && x == samples[0];
    if (constant) return {samples[0], samples[0], samples[0]};
    const double mean = detail::compensated_sum(samples) / static_cast<double>(n);
    double ss = 0.0, residual = 0.0;
    for (double x : samples) {
        ss += (x - mean) * (x - mean);
        residual += x - mean;
    }
    ss -= residual * residual / static_cast<double>(n);
    ss = std::max(ss, 0.0);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double half = detail::student_t_975(n - 1) * sd / std::sqrt(static_cast<double>(n));
    return {mean - half, mean + half, mean};
}

inline double student_t_975(std::size_t df) { return detail::student_t_975(df); }

// ---------------------------------------------------------------------------
// Operation-count model (one iteration of each method)

struct CostModelEntry {
    std::string method;
    std::uint64_t nodes = 0;
    std::uint64_t layers = 0;
    std::uint64_t operations = 0;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw std::overflow_error("cost_model: operation count exceeds 64 bits");
    return out;
}

}  // namespace detail

// pagerank:   L * n^2          hits:        L * (n^3 + n^2)
// versatile:  n * (L*n) * n    framework:   (k-1) * n^3 + n^2
// with k = L for pagerank-like/versatile-like and k = 2L for hits-like.
inline CostModelEntry cost_model(std::string_view method, std::uint64_t n, std::uint64_t layers,
                                 std::uint64_t config_length = 0) {
    if (n < 1 || layers < 1) throw std::invalid_argument("cost_model: n and layers must be >= 1");
    const std::uint64_t n2 = detail::checked_mul(n, n);
    const std::uint64_t n3 = detail::checked_mul(n2, n);
    auto framework = [&](std::uint64_t k) {
        if (k < 1) throw std::invalid_argument("cost_model: configuration length must be >= 1");
        return detail::checked_mul(k - 1, n3) + n2;
    };

    std::uint64_t ops = 0;
    if (method == "pagerank")
        ops = detail::checked_mul(layers, n2);
    else if (method == "hits")
        ops = detail::checked_mul(layers, n3 + n2);
    else if (method == "versatile")
        ops = detail::checked_mul(detail::checked_mul(n2, layers), n);
    else if (method == "pagerank-like" || method == "versatile-like")
        ops = framework(layers);
    else if (method == "hits-like")
        ops = framework(detail::checked_mul(2, layers));
    else if (method == "framework")
        ops = framework(config_length);
    else
        throw ConfigError("cost_model: unknown method '" + std::string(method) + "'");
    return {std::string(method), n, layers, ops};
}

inline const std::vector<std::string>& cost_table_methods() {
    static const std::vector<std::string> methods{"pagerank", "pagerank-like",  "hits",
                                                  "hits-like", "versatile", "versatile-like"};
    return methods;
}

}  // namespace multirank
