#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "multirank/generators.hpp"
#include "multirank/measures.hpp"
#include "oracle_helpers.hpp"

using namespace multirank;

namespace {

std::vector<double> random_scores(std::uint64_t seed, std::size_t n, int alphabet) {
    // small alphabets force ties
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::floor(oracle::draw(seed, 0x5c, i, 0) * alphabet);
    return v;
}

}  // namespace

TEST_CASE("weighted tau basics") {
    std::vector<double> r{3, 2, 1, 0};
    CHECK(weighted_kendall_tau(r, r).tau_w == doctest::Approx(1.0));
    std::vector<double> reversed{0, 1, 2, 3};
    CHECK(weighted_kendall_tau(r, reversed).tau_w == doctest::Approx(-1.0));

    // one discordant pair among the two lowest-ranked items:
    // <r,s> = 61/12, both weighted norms 25/4, tau = 61/75
    std::vector<double> s{3, 2, 0, 1};
    ComparisonResult res = weighted_kendall_tau(r, s);
    CHECK(res.tau_w == doctest::Approx(61.0 / 75.0).epsilon(1e-14));
    CHECK(res.n_items == 4);
    CHECK(res.ties.first == 0);
    CHECK(res.ties.second == 0);
}

TEST_CASE("weighted tau error paths") {
    std::vector<double> r{1, 2, 3};
    std::vector<double> shorter{1, 2};
    CHECK_THROWS_AS(weighted_kendall_tau(r, shorter), DimensionError);
    std::vector<double> single{1};
    CHECK_THROWS_AS(weighted_kendall_tau(single, single), std::invalid_argument);
    std::vector<double> tied{2, 2, 2};
    CHECK_THROWS_AS(weighted_kendall_tau(tied, r), DegenerateInput);
    CHECK_THROWS_AS(weighted_kendall_tau(r, tied), DegenerateInput);
}

TEST_CASE("weighted tau matches the exhaustive-pairs oracle") {
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; checked < 300; ++seed) {
        std::size_t n = 2 + static_cast<std::size_t>(oracle::draw(seed, 1, 1, 1) * 48);
        int alphabet = 2 + static_cast<int>(oracle::draw(seed, 2, 2, 2) * 20);
        std::vector<double> r = random_scores(seed * 2 + 1, n, alphabet);
        std::vector<double> s = random_scores(seed * 2 + 2, n, alphabet);
        double brute;
        try {
            brute = oracle::brute_weighted_tau(r, s);
        } catch (...) {
            continue;
        }
        if (std::isnan(brute)) continue;  // all tied; main path throws instead
        CHECK(std::fabs(weighted_kendall_tau(r, s).tau_w - brute) <= 1e-12);
        ++checked;
    }
}

TEST_CASE("constant weights reduce to the classic tie-adjusted tau") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::size_t n = 3 + static_cast<std::size_t>(oracle::draw(seed, 3, 3, 3) * 20);
        std::vector<double> r = random_scores(seed * 3 + 1, n, 5);
        std::vector<double> s = random_scores(seed * 3 + 2, n, 5);
        double brute = oracle::brute_kendall_tau_b(r, s);
        if (std::isnan(brute) || std::isinf(brute)) continue;
        double got = 0.0;
        bool defined = true;
        try {
            got = weighted_kendall_tau(r, s, WeightScheme::Constant).tau_w;
        } catch (const DegenerateInput&) {
            defined = false;
        }
        if (defined) CHECK(std::fabs(got - brute) <= 1e-12);
    }
}

TEST_CASE("constant weights equal unweighted tau on every 6-permutation") {
    std::vector<double> reference{5, 4, 3, 2, 1, 0};
    std::vector<double> perm{0, 1, 2, 3, 4, 5};
    do {
        double got = weighted_kendall_tau(reference, perm, WeightScheme::Constant).tau_w;
        double want = oracle::brute_kendall_tau_b(reference, perm);
        CHECK(std::fabs(got - want) <= 1e-14);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("weighted tau is invariant under a simultaneous permutation") {
    std::vector<double> r = random_scores(91, 20, 6);
    std::vector<double> s = random_scores(92, 20, 6);
    double base = weighted_kendall_tau(r, s).tau_w;
    std::vector<std::uint32_t> perm(20);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = 20; i-- > 1;) {
        auto j = static_cast<std::size_t>(oracle::draw(93, i, 0, 0) * (i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<double> rp(20), sp(20);
    for (std::size_t i = 0; i < 20; ++i) {
        rp[i] = r[perm[i]];
        sp[i] = s[perm[i]];
    }
    CHECK(weighted_kendall_tau(rp, sp).tau_w == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("tie counting") {
    std::vector<double> r{1, 1, 2, 3};
    std::vector<double> s{4, 4, 4, 5};
    ComparisonResult res = weighted_kendall_tau(r, s);
    CHECK(res.ties.first == 1);   // the pair (0,1)
    CHECK(res.ties.second == 3);  // pairs within {0,1,2}
    CHECK(res.ties.both == 1);
}

TEST_CASE("ranking concatenation") {
    SUBCASE("a single block preserves the tau of the raw scores") {
        std::vector<double> a = random_scores(61, 15, 8);
        std::vector<double> b = random_scores(62, 15, 8);
        auto ca = concatenate_rankings({ScoreVector::normalize(
            [&] { auto v = a; for (double& x : v) x += 1.0; return v; }())});
        auto cb = concatenate_rankings({ScoreVector::normalize(
            [&] { auto v = b; for (double& x : v) x += 1.0; return v; }())});
        // shifting all scores by a constant changes values, not order
        CHECK(weighted_kendall_tau(ca, cb).tau_w ==
              doctest::Approx(weighted_kendall_tau(a, b).tau_w).epsilon(1e-14));
    }
    SUBCASE("cross-block order is fixed by block position") {
        ScoreVector lo = ScoreVector::normalize({0.9, 0.1});
        ScoreVector hi = ScoreVector::normalize({0.2, 0.8});
        auto c = concatenate_rankings({lo, hi});
        REQUIRE(c.size() == 4);
        // every block-0 entry outranks every block-1 entry
        CHECK(std::min(c[0], c[1]) > std::max(c[2], c[3]));
        // within blocks the score order survives
        CHECK(c[0] > c[1]);
        CHECK(c[3] > c[2]);
    }
    SUBCASE("identical block rankings compare to exactly 1") {
        ScoreVector a = ScoreVector::normalize({0.5, 0.3, 0.2});
        ScoreVector b = ScoreVector::normalize({0.48, 0.32, 0.2});  // same order
        double tau = weighted_kendall_tau(concatenate_rankings({a, a}),
                                          concatenate_rankings({b, b}))
                         .tau_w;
        CHECK(tau == 1.0);
    }
    SUBCASE("ties within a block stay tied") {
        ScoreVector tied = ScoreVector::normalize({0.25, 0.25, 0.5});
        auto c = concatenate_rankings({tied});
        CHECK(c[0] == c[1]);
        CHECK(c[2] > c[0]);
    }
}

TEST_CASE("multijaccard") {
    auto make = [](std::vector<std::vector<Edge>> layer_edges, std::size_t n) {
        std::vector<SparseMatrix> layers;
        for (auto& e : layer_edges) layers.emplace_back(n, std::move(e));
        return MultiplexNetwork(n, std::move(layers));
    };
    SUBCASE("identical layers give 1") {
        std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 2.0}};
        std::vector<Edge> e_reweighted{{0, 1, 9.0}, {1, 2, 1.0}};  // weights ignored
        CHECK(multijaccard(make({e, e_reweighted}, 3)) == doctest::Approx(1.0));
    }
    SUBCASE("disjoint nonempty layers give 0") {
        CHECK(multijaccard(make({{{0, 1, 1.0}}, {{1, 2, 1.0}}}, 3)) == doctest::Approx(0.0));
    }
    SUBCASE("the six-node ring layers are disjoint") {
        CHECK(multijaccard(oracle::ring_multiplex()) == doctest::Approx(0.0));
    }
    SUBCASE("empty pair counts as identical") {
        CHECK(multijaccard(make({{}, {}}, 3)) == doctest::Approx(1.0));
    }
    SUBCASE("layer reordering and consistent relabeling do not matter") {
        std::vector<Edge> a{{0, 1, 1.0}, {2, 1, 1.0}, {2, 0, 1.0}};
        std::vector<Edge> b{{0, 1, 1.0}, {1, 2, 1.0}};
        double forward = multijaccard(make({a, b}, 3));
        double swapped = multijaccard(make({b, a}, 3));
        CHECK(forward == doctest::Approx(swapped));
        // relabel 0<->2 in both layers
        auto relabel = [](std::vector<Edge> edges) {
            for (Edge& e : edges) {
                e.src = e.src == 0 ? 2 : (e.src == 2 ? 0 : e.src);
                e.dst = e.dst == 0 ? 2 : (e.dst == 2 ? 0 : e.dst);
            }
            return edges;
        };
        CHECK(multijaccard(make({relabel(a), relabel(b)}, 3)) == doctest::Approx(forward));
    }
    SUBCASE("single layer is an error") {
        CHECK_THROWS_AS(multijaccard(make({{{0, 1, 1.0}}}, 2)), std::invalid_argument);
    }
}

TEST_CASE("confidence intervals") {
    SUBCASE("constant samples collapse to a point") {
        std::vector<double> samples{0.7, 0.7, 0.7, 0.7};
        ConfidenceInterval ci = confidence_interval(samples);
        CHECK(ci.lo == doctest::Approx(0.7));
        CHECK(ci.hi == doctest::Approx(0.7));
        CHECK(ci.mean == doctest::Approx(0.7));
    }
    SUBCASE("two samples use the 12.706 quantile") {
        std::vector<double> samples{0.0, 1.0};
        ConfidenceInterval ci = confidence_interval(samples);
        // s = sqrt(0.5), half-width = 12.706 * sqrt(0.5) / sqrt(2) = 12.706 / 2
        CHECK(ci.mean == doctest::Approx(0.5));
        CHECK(ci.hi == doctest::Approx(0.5 + 12.706 / 2).epsilon(1e-4));
        CHECK(ci.lo == doctest::Approx(0.5 - 12.706 / 2).epsilon(1e-4));
    }
    SUBCASE("interval is symmetric about the mean") {
        std::vector<double> samples{0.2, 0.4, 0.9, 1.4, 0.3};
        ConfidenceInterval ci = confidence_interval(samples);
        CHECK(ci.hi - ci.mean == doctest::Approx(ci.mean - ci.lo).epsilon(1e-12));
    }
    SUBCASE("needs two samples") {
        std::vector<double> one{1.0};
        CHECK_THROWS_AS(confidence_interval(one), std::invalid_argument);
    }
    SUBCASE("quantile anchors from the published table") {
        CHECK(student_t_975(1) == doctest::Approx(12.706).epsilon(5e-4));
        CHECK(student_t_975(2) == doctest::Approx(4.303).epsilon(5e-4));
        CHECK(student_t_975(5) == doctest::Approx(2.571).epsilon(5e-4));
        CHECK(student_t_975(10) == doctest::Approx(2.228).epsilon(5e-4));
        CHECK(student_t_975(30) == doctest::Approx(2.042).epsilon(5e-4));
        CHECK(student_t_975(120) == doctest::Approx(1.980).epsilon(5e-4));
        CHECK(student_t_975(10000) == doctest::Approx(1.96).epsilon(5e-4));
    }
}

TEST_CASE("cost model reproduces every table cell") {
    struct Row {
        std::uint64_t n;
        std::uint64_t ops[6];  // pagerank, pagerank-like, hits, hits-like, versatile, versatile-like
    };
    const Row rows[] = {
        {64, {8192ull, 266240ull, 532480ull, 790528ull, 524288ull, 266240ull}},
        {128, {32768ull, 2113536ull, 4227072ull, 6307840ull, 4194304ull, 2113536ull}},
        {256, {131072ull, 16842752ull, 33685504ull, 50397184ull, 33554432ull, 16842752ull}},
        {512, {524288ull, 134479872ull, 268959744ull, 402915328ull, 268435456ull, 134479872ull}},
        {1024, {2097152ull, 1074790400ull, 2149580800ull, 3222274048ull, 2147483648ull, 1074790400ull}},
        {2048, {8388608ull, 8594128896ull, 17188257792ull, 25773998080ull, 17179869184ull, 8594128896ull}},
        {4096, {33554432ull, 68736253952ull, 137472507904ull, 206175207424ull, 137438953472ull, 68736253952ull}},
    };
    const char* methods[6] = {"pagerank", "pagerank-like", "hits", "hits-like", "versatile", "versatile-like"};
    for (const Row& row : rows)
        for (std::size_t k = 0; k < 6; ++k)
            CHECK(cost_model(methods[k], row.n, 2).operations == row.ops[k]);

    CHECK(cost_model("framework", 64, 2, 4).operations == (4 - 1) * 64ull * 64 * 64 + 64 * 64);
    CHECK(cost_model("framework", 10, 2, 1).operations == 100);
    CHECK_THROWS_AS(cost_model("salsa", 64, 2), ConfigError);
    CHECK_THROWS_AS(cost_model("framework", 64, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(cost_model("pagerank", 0, 2), std::invalid_argument);
}
