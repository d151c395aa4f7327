#pragma once

// The algebra of configurations: atoms (a layer matrix or its transpose),
// cyclic equivalence classes with a canonical representative, shifts that
// select one member, and enumeration of all repetition-free classes.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multirank/errors.hpp"

namespace multirank {

// One factor in a composition chain. Total order: layer ascending, with the
// plain matrix before its transpose, which makes "lowest indexed matrix"
// well defined when picking canonical rotations.
struct Atom {
    std::uint32_t layer = 0;
    bool transposed = false;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using AtomSequence = std::vector<Atom>;

inline std::string to_string(const Atom& a) {
    return "A" + std::to_string(a.layer) + (a.transposed ? "T" : "");
}

inline std::string to_string(std::span<const Atom> seq, std::string_view separator = " ") {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += separator;
        out += to_string(seq[i]);
    }
    return out;
}

namespace detail {

inline AtomSequence rotate(const AtomSequence& seq, std::size_t shift) {
    const std::size_t k = seq.size();
    AtomSequence out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = seq[(i + shift) % k];
    return out;
}

// Index of the lexicographically minimal rotation.
inline std::size_t minimal_rotation(const AtomSequence& seq) {
    const std::size_t k = seq.size();
    std::size_t best = 0;
    for (std::size_t cand = 1; cand < k; ++cand) {
        for (std::size_t i = 0; i < k; ++i) {
            const Atom& a = seq[(cand + i) % k];
            const Atom& b = seq[(best + i) % k];
            if (a < b) {
                best = cand;
                break;
            }
            if (b < a) break;
        }
    }
    return best;
}

}  // namespace detail

// Cyclic equivalence class of a non-empty atom sequence, stored as the
// lexicographically minimal rotation. Two sequences construct equal
// configurations iff they are rotations of each other.
class Configuration {
public:
    explicit Configuration(AtomSequence seq) {
        if (seq.empty()) throw ConfigError("Configuration: empty sequence");
        rep_ = detail::rotate(seq, detail::minimal_rotation(seq));
    }

    const AtomSequence& representative() const { return rep_; }
    std::size_t length() const { return rep_.size(); }

    // Member selected by shift h: rotate(representative, h). Shifts always
    // range over 0..length-1; rotationally symmetric sequences repeat.
    AtomSequence member(std::size_t shift) const { return detail::rotate(rep_, shift % rep_.size()); }

    std::vector<AtomSequence> members() const {
        std::vector<AtomSequence> out;
        out.reserve(rep_.size());
        for (std::size_t h = 0; h < rep_.size(); ++h) out.push_back(member(h));
        return out;
    }

    std::uint32_t max_layer() const {
        std::uint32_t m = 0;
        for (const Atom& a : rep_) m = std::max(m, a.layer);
        return m;
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    AtomSequence rep_;
};

inline Configuration canonicalize(AtomSequence seq) { return Configuration(std::move(seq)); }

// A configuration plus the shift selecting its member of interest; the
// member's first factor determines which ranking the solver computes as r_0.
struct ShiftedConfiguration {
    Configuration config;
    std::size_t shift = 0;

    ShiftedConfiguration(Configuration c, std::size_t h) : config(std::move(c)), shift(h) {
        if (shift >= config.length()) throw ConfigError("ShiftedConfiguration: shift out of range");
    }

    AtomSequence sequence() const { return config.member(shift); }
};

// Canonical class of a written sequence plus the smallest shift that
// reproduces the written order.
inline ShiftedConfiguration shifted_from_sequence(const AtomSequence& seq) {
    Configuration config(seq);
    std::size_t shift = 0;
    for (std::size_t h = 0; h < config.length(); ++h) {
        if (config.member(h) == seq) {
            shift = h;
            break;
        }
    }
    return ShiftedConfiguration(std::move(config), shift);
}

// Closed-form count of repetition-free configurations over 2L matrices:
// sum over k of C(2L, k) * (k-1)!.
inline std::uint64_t configuration_count(std::size_t layer_count) {
    if (layer_count < 1) throw ConfigError("configuration_count: layer count must be >= 1");
    if (layer_count > 10) throw ConfigError("configuration_count: layer count too large for 64-bit result");
    const std::uint64_t m = 2 * layer_count;
    std::uint64_t total = 0;
    for (std::uint64_t k = 1; k <= m; ++k) {
        std::uint64_t binom = 1;
        for (std::uint64_t i = 0; i < k; ++i) binom = binom * (m - i) / (i + 1);
        std::uint64_t fact = 1;
        for (std::uint64_t i = 2; i < k; ++i) fact *= i;
        total += binom * fact;
    }
    return total;
}

// All configurations whose sequences use distinct atoms, one canonical
// representative per class, ordered by length then representative.
// With distinct atoms the minimal rotation starts at the unique smallest
// atom, so fixing the subset minimum first and permuting the rest lists
// every class exactly once.
inline std::vector<Configuration> enumerate_configurations(std::size_t layer_count) {
    if (layer_count < 1) throw ConfigError("enumerate_configurations: layer count must be >= 1");
    if (configuration_count(layer_count) > 2'000'000)
        throw ConfigError("enumerate_configurations: class count too large to materialize");
    const std::uint32_t m = static_cast<std::uint32_t>(2 * layer_count);
    auto atom_of = [](std::uint32_t index) {
        return Atom{index / 2, (index % 2) != 0};
    };

    std::vector<Configuration> out;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        AtomSequence atoms;
        for (std::uint32_t i = 0; i < m; ++i)
            if (mask & (1u << i)) atoms.push_back(atom_of(i));
        AtomSequence tail(atoms.begin() + 1, atoms.end());
        std::sort(tail.begin(), tail.end());
        do {
            AtomSequence seq{atoms.front()};
            seq.insert(seq.end(), tail.begin(), tail.end());
            out.emplace_back(std::move(seq));
        } while (std::next_permutation(tail.begin(), tail.end()));
    }
    std::sort(out.begin(), out.end(), [](const Configuration& a, const Configuration& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a.representative() < b.representative();
    });
    return out;
}

// Grammar: atom+ with atom = A<digits> or A<digits>T, whitespace optional.
// Returns the canonical class plus the smallest shift reproducing the
// written order.
inline ShiftedConfiguration parse_configuration(std::string_view text, std::size_t layer_count) {
    AtomSequence seq;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r'))
            ++i;
    };
    skip_ws();
    while (i < text.size()) {
        if (text[i] != 'A' && text[i] != 'a')
            throw ParseError("configuration: expected atom starting with 'A' at position " +
                             std::to_string(i));
        ++i;
        if (i >= text.size() || text[i] < '0' || text[i] > '9')
            throw ParseError("configuration: expected layer index after 'A'");
        std::uint64_t layer = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            layer = layer * 10 + static_cast<std::uint64_t>(text[i] - '0');
            if (layer > 0xffffffffULL) throw ParseError("configuration: layer index too large");
            ++i;
        }
        bool transposed = false;
        if (i < text.size() && (text[i] == 'T' || text[i] == 't')) {
            transposed = true;
            ++i;
        }
        if (layer >= layer_count)
            throw ConfigError("configuration: atom A" + std::to_string(layer) +
                              (transposed ? "T" : "") + " references a missing layer (have " +
                              std::to_string(layer_count) + ")");
        seq.push_back(Atom{static_cast<std::uint32_t>(layer), transposed});
        skip_ws();
    }
    if (seq.empty()) throw ParseError("configuration: empty");
    return shifted_from_sequence(seq);
}

}  // namespace multirank
