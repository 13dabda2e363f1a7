#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "treeblend/sampling.hpp"
#include "treeblend/util.hpp"

using namespace treeblend;

namespace {

struct Pool {
    std::vector<RecipeRecord> store;
    std::vector<const RecipeRecord*> ptrs;

    void add(const std::string& id, std::vector<double> embedding) {
        RecipeRecord r;
        r.recipe_id = id;
        r.dish = "dish";
        r.embedding = std::move(embedding);
        store.push_back(std::move(r));
    }
    const std::vector<const RecipeRecord*>& records() {
        ptrs.clear();
        for (const auto& r : store) ptrs.push_back(&r);
        return ptrs;
    }
};

double min_pairwise(const std::vector<std::vector<double>>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, embedding_distance(points[i], points[j],
                                                     DistanceMetric::euclidean));
    return best;
}

}  // namespace

TEST_SUITE("seed_sampling") {

TEST_CASE("the diverse pick flees the centroid") {
    // points 0, 1, 10 on a line; centroid 11/3; the far point wins
    Pool pool;
    pool.add("p0", {0.0});
    pool.add("p1", {1.0});
    pool.add("p10", {10.0});
    CHECK(sample_seeds(pool.records(), 0, 1, 7) == std::vector<std::string>{"p10"});
    // second pick: 0 is 3.67 from the centroid and 10 from the first pick,
    // 1 is 2.67 from the centroid; 0 wins
    CHECK(sample_seeds(pool.records(), 0, 2, 7) == std::vector<std::string>{"p10", "p0"});
    CHECK(sample_seeds(pool.records(), 0, 3, 7) ==
          std::vector<std::string>{"p10", "p0", "p1"});
}

TEST_CASE("degenerate requests") {
    Pool pool;
    pool.add("a", {0.0});
    pool.add("b", {1.0});
    CHECK(sample_seeds(pool.records(), 0, 0, 7).empty());
    CHECK(sample_seeds({}, 5, 5, 7).empty());
}

TEST_CASE("a small pool is returned whole") {
    Pool pool;
    for (int i = 0; i < 5; ++i) pool.add("r" + std::to_string(i), {static_cast<double>(i)});
    auto out = sample_seeds(pool.records(), 15, 15, 7);
    REQUIRE(out.size() == 5);
    std::set<std::string> ids(out.begin(), out.end());
    CHECK(ids == std::set<std::string>{"r0", "r1", "r2", "r3", "r4"});
}

TEST_CASE("broken embeddings are reported by record") {
    Pool pool;
    pool.add("ok", {1.0, 2.0});
    pool.store.push_back([] {
        RecipeRecord r;
        r.recipe_id = "bare";
        r.dish = "dish";
        return r;
    }());
    try {
        sample_seeds(pool.records(), 1, 0, 7);
        FAIL("expected a missing-embedding error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("bare") != std::string::npos);
    }

    Pool uneven;
    uneven.add("x", {1.0, 2.0});
    uneven.add("y", {1.0});
    CHECK_THROWS_AS(sample_seeds(uneven.records(), 1, 0, 7), std::runtime_error);
}

TEST_CASE("selection is deterministic, unique, and drawn from the pool") {
    Pool pool;
    Rng rng(derive_seed(0xcafe, "sampling-pool", 0));
    for (int i = 0; i < 20; ++i)
        pool.add("r" + std::to_string(i), {unit_real(rng), unit_real(rng), unit_real(rng)});
    auto a = sample_seeds(pool.records(), 6, 6, 42);
    auto b = sample_seeds(pool.records(), 6, 6, 42);
    CHECK(a == b);
    REQUIRE(a.size() == 12);
    std::set<std::string> ids(a.begin(), a.end());
    CHECK(ids.size() == 12);
    for (const auto& id : ids) CHECK(id.rfind("r", 0) == 0);
    // a fresh seed reshuffles the random half
    auto c = sample_seeds(pool.records(), 6, 6, 43);
    CHECK(a != c);
}

TEST_CASE("cosine ignores magnitude where euclidean chases it") {
    Pool pool;
    pool.add("long", {100.0, 0.0});
    pool.add("short", {1.0, 0.0});
    pool.add("side", {0.0, 1.0});
    CHECK(sample_seeds(pool.records(), 0, 1, 7, DistanceMetric::euclidean) ==
          std::vector<std::string>{"long"});
    CHECK(sample_seeds(pool.records(), 0, 1, 7, DistanceMetric::cosine) ==
          std::vector<std::string>{"side"});
}

TEST_CASE("greedy picks dominate random subsets for dispersion") {
    Rng fixture_rng(derive_seed(0xcafe, "sampling-dispersion", 0));
    Rng baseline_rng(derive_seed(0xcafe, "sampling-baseline", 0));
    int wins = 0;
    const int rounds = 200;
    for (int round = 0; round < rounds; ++round) {
        Pool pool;
        std::vector<std::vector<double>> coords;
        const int n = 12 + static_cast<int>(bounded_uint(fixture_rng, 19));
        for (int i = 0; i < n; ++i) {
            coords.push_back({10.0 * unit_real(fixture_rng), 10.0 * unit_real(fixture_rng)});
            pool.add("r" + std::to_string(i), coords.back());
        }
        auto picked = sample_seeds(pool.records(), 0, 5, static_cast<std::uint64_t>(round));
        std::vector<std::vector<double>> diverse;
        for (const auto& id : picked) diverse.push_back(coords[std::stoul(id.substr(1))]);

        std::vector<std::size_t> order(coords.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        fisher_yates_shuffle(order, baseline_rng);
        std::vector<std::vector<double>> random_subset;
        for (int i = 0; i < 5; ++i) random_subset.push_back(coords[order[i]]);

        if (min_pairwise(diverse) >= min_pairwise(random_subset) - 1e-12) ++wins;
    }
    // the dispersion heuristic must beat (or tie) random draws almost always
    CHECK(wins >= 190);
}

}  // TEST_SUITE
