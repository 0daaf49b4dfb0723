#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "polymatch/core.hpp"

using namespace polymatch;

TEST_CASE("validate_matching basics") {
    CHECK(validate_matching(std::vector<WeightedEdge>{}, 5));
    CHECK(validate_matching(std::vector<WeightedEdge>{{0, 1, 5.0}}, 5));
    CHECK_FALSE(validate_matching(std::vector<WeightedEdge>{{0, 1, 5.0}, {1, 2, 7.0}}, 5));
    CHECK_FALSE(validate_matching(std::vector<WeightedEdge>{{0, 0, 5.0}}, 5));
    CHECK_FALSE(validate_matching(std::vector<WeightedEdge>{{0, 7, 5.0}}, 5));
}

TEST_CASE("validate_matching is monotone under edge removal") {
    std::vector<WeightedEdge> m = {{0, 1, 5.0}, {2, 3, 7.0}, {4, 5, 1.0}};
    REQUIRE(validate_matching(m, 6));
    for (std::size_t drop = 0; drop < m.size(); ++drop) {
        auto sub = m;
        sub.erase(sub.begin() + static_cast<long>(drop));
        CHECK(validate_matching(sub, 6));
    }
}

TEST_CASE("matching_weight") {
    CHECK(matching_weight({}) == 0.0);
    CHECK(matching_weight({{{0, 1, 5.0}}}) == 5.0);
    CHECK(matching_weight({{{0, 1, 5.0}, {2, 3, 7.0}}}) == 12.0);
}

TEST_CASE("matching_weight is additive over disjoint unions") {
    Matching a{{{0, 1, 5.0}, {2, 3, 7.0}}};
    Matching b{{{4, 5, 2.5}}};
    Matching both = a;
    both.edges.insert(both.edges.end(), b.edges.begin(), b.edges.end());
    CHECK(both.weight() == Catch::Approx(a.weight() + b.weight()));
}

TEST_CASE("normalization filter threshold") {
    // n=4, eps=0.5: threshold = 0.5 * w_max / (2 * 1.5 * 16) = w_max / 96
    CHECK(normalization_keep(1.0, 1.0, 4, 0.5));
    CHECK_FALSE(normalization_keep(1e-12, 1.0, 4, 0.5));
    CHECK(normalization_keep(0.02, 1.0, 4, 0.5));
}

TEST_CASE("kept-weight spread stays polynomially bounded") {
    const std::uint64_t n = 16;
    const double eps = 0.25;
    const double bound = 2.0 * (1.0 + eps) * static_cast<double>(n) * static_cast<double>(n) / eps;
    SplitMix64 rng(42);

    // every kept edge is within the bound of the running maximum at keep time
    double wmax_seen = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double w = std::pow(10.0, rng.uniform(-12.0, 6.0));
        wmax_seen = std::max(wmax_seen, w);
        if (!normalization_keep(w, wmax_seen, n, eps)) continue;
        CHECK(wmax_seen / w <= bound * (1.0 + 1e-12));
    }

    // with the maximum up front, the full kept range obeys the same bound
    wmax_seen = 0.0;
    double kept_min = 1e300, kept_max = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double w = i == 0 ? 1e6 : std::pow(10.0, rng.uniform(-12.0, 6.0));
        wmax_seen = std::max(wmax_seen, w);
        if (!normalization_keep(w, wmax_seen, n, eps)) continue;
        kept_min = std::min(kept_min, w);
        kept_max = std::max(kept_max, w);
        CHECK(kept_max / kept_min <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("engine config validation") {
    EngineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.epsilon = 0.1;
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.k = 8;
    cfg.r = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.r = 4;
    CHECK_NOTHROW(cfg.validate());
    cfg.r = 16;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
