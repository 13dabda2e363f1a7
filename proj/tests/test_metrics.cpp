#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "treeblend/dot.hpp"
#include "treeblend/metrics.hpp"
#include "treeblend/util.hpp"

using namespace treeblend;

namespace {

// Reference BLEU, written against the pinned definition with its own
// tokenizer (alphanumeric runs) and flat-string n-gram keys.
std::vector<std::string> oracle_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::map<std::string, int> oracle_grams(const std::vector<std::string>& toks, int n) {
    std::map<std::string, int> grams;
    for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) key += toks[static_cast<std::size_t>(i + j)] + "\x1f";
        ++grams[key];
    }
    return grams;
}

double oracle_bleu(const std::string& cand_text, const std::vector<std::string>& ref_texts,
                   int max_n) {
    const auto cand = oracle_tokens(cand_text);
    long double log_sum = 0.0L;
    for (int n = 1; n <= max_n; ++n) {
        const auto cgrams = oracle_grams(cand, n);
        std::map<std::string, int> best_ref;
        for (const auto& ref : ref_texts)
            for (const auto& [g, c] : oracle_grams(oracle_tokens(ref), n))
                best_ref[g] = std::max(best_ref[g], c);
        long long total = 0, hit = 0;
        for (const auto& [g, c] : cgrams) {
            total += c;
            if (best_ref.count(g)) hit += std::min(c, best_ref.at(g));
        }
        long double p = 1.0L;
        if (total > 0) p = hit > 0 ? static_cast<long double>(hit) / total
                                   : 1.0L / (static_cast<long double>(total) + 1.0L);
        log_sum += std::log(p) / max_n;
    }
    const auto c = cand.size();
    std::size_t r = oracle_tokens(ref_texts[0]).size();
    for (const auto& ref : ref_texts) {
        const std::size_t len = oracle_tokens(ref).size();
        const auto gap = [&](std::size_t x) { return x > c ? x - c : c - x; };
        if (gap(len) < gap(r) || (gap(len) == gap(r) && len < r)) r = len;
    }
    long double bp = 1.0L;
    if (c == 0)
        bp = r == 0 ? 1.0L : 0.0L;
    else if (c <= r)
        bp = std::exp(1.0L - static_cast<long double>(r) / c);
    return static_cast<double>(bp * std::exp(log_sum));
}

double oracle_self_bleu(const std::vector<std::string>& texts, int max_n) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        std::vector<std::string> refs;
        for (std::size_t j = 0; j < texts.size(); ++j)
            if (j != i) refs.push_back(texts[j]);
        sum += oracle_bleu(texts[i], refs, max_n);
    }
    return static_cast<double>(sum / texts.size());
}

RecipeTree leaf_under(const std::string& action, const std::string& abstraction,
                      const std::vector<std::string>& leaves) {
    std::string dot = "digraph t {\n  a0 [label=\"" + action + "\", kind=action, abstraction=\"" +
                      abstraction + "\"];\n";
    for (std::size_t i = 0; i < leaves.size(); ++i)
        dot += "  i" + std::to_string(i) + " [label=\"" + leaves[i] + "\", kind=ingredient];\n";
    for (std::size_t i = 0; i < leaves.size(); ++i) dot += "  i" + std::to_string(i) + " -> a0;\n";
    dot += "}\n";
    auto result = parse_dot(dot, ActionHierarchy::builtin());
    REQUIRE(result.ok());
    return *result.tree;
}

}  // namespace

TEST_SUITE("self_bleu") {

TEST_CASE("tokenizer folds case and eats punctuation") {
    CHECK(tokenize("Mix, then BAKE!") == std::vector<std::string>{"mix", "then", "bake"});
    CHECK(tokenize("  ") == std::vector<std::string>{});
    CHECK(tokenize("don't") == std::vector<std::string>{"don", "t"});
}

TEST_CASE("identical texts score one") {
    CHECK(self_bleu({"stir the pot well", "stir the pot well", "stir the pot well"}, 4) ==
          doctest::Approx(1.0));
}

TEST_CASE("a two-text pair works out by hand") {
    // unigrams 1/2, bigrams smoothed to 1/2, BP 1 → each side 0.5
    CHECK(self_bleu({"a b", "a c"}, 2) == doctest::Approx(0.5));
}

TEST_CASE("disjoint vocabularies sink to the smoothing floor") {
    const std::vector<std::string> texts{"a b c", "d e f", "g h i"};
    // every level smooths: sqrt(1/4 * 1/3)
    CHECK(self_bleu(texts, 2) == doctest::Approx(std::sqrt(1.0 / 12.0)));
    CHECK(self_bleu(texts, 2) == doctest::Approx(oracle_self_bleu(texts, 2)).epsilon(1e-9));
}

TEST_CASE("random fixtures agree with the reference implementation") {
    Rng rng(derive_seed(0xfeed, "bleu-fixtures", 0));
    const std::vector<std::string> vocab{"stir", "mix",  "bake", "salt", "oven",
                                        "pan",  "heat", "cool", "serve"};
    for (int round = 0; round < 20; ++round) {
        std::vector<std::string> texts;
        const int count = 3 + static_cast<int>(bounded_uint(rng, 4));
        for (int t = 0; t < count; ++t) {
            std::string text;
            const int words = 3 + static_cast<int>(bounded_uint(rng, 10));
            for (int w = 0; w < words; ++w) {
                if (w) text += " ";
                text += vocab[bounded_uint(rng, vocab.size())];
            }
            texts.push_back(text);
        }
        const int max_n = 2 + static_cast<int>(bounded_uint(rng, 3));
        CHECK(self_bleu(texts, max_n) ==
              doctest::Approx(oracle_self_bleu(texts, max_n)).epsilon(1e-9));
    }
}

TEST_CASE("input order does not matter") {
    std::vector<std::string> texts{"stir the pot", "bake the pie well", "salt to taste",
                                   "heat the pan"};
    const double base = self_bleu(texts, 3);
    std::reverse(texts.begin(), texts.end());
    CHECK(self_bleu(texts, 3) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("degenerate inputs are refused") {
    CHECK_THROWS_AS(self_bleu({"only one"}, 2), std::invalid_argument);
    CHECK_THROWS_AS(self_bleu({"a", "b"}, 5), std::invalid_argument);
    CHECK_THROWS_AS(self_bleu({"a", "b"}, 1), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("tree_diversity") {

TEST_CASE("identical trees have zero diversity") {
    auto t = leaf_under("mix", "preparation", {"salt", "flour"});
    auto div = pairwise_tree_diversity({t, t, t});
    CHECK(div.mean == 0.0);
    for (const auto& row : div.matrix)
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("unmappable trees sit at the ceiling") {
    // every cross pair is cross-kind or agrees on nothing, so nothing maps
    auto a = leaf_under("mix", "preparation", {"salt"});
    auto b = leaf_under("bake", "heat", {"pepper"});
    auto div = pairwise_tree_diversity({a, b});
    CHECK(div.mean == 1.0);
    CHECK(div.matrix[0][1] == 1.0);
}

TEST_CASE("the mean averages the strict upper triangle") {
    std::vector<RecipeTree> trees{
        leaf_under("mix", "preparation", {"salt"}),
        leaf_under("mix", "preparation", {"salt", "flour"}),
        leaf_under("bake", "heat", {"salt"}),
        leaf_under("mix", "preparation", {"basil"}),
    };
    auto div = pairwise_tree_diversity(trees);
    double sum = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        CHECK(div.matrix[i][i] == 0.0);
        for (std::size_t j = i + 1; j < trees.size(); ++j) {
            CHECK(div.matrix[i][j] == div.matrix[j][i]);
            CHECK(div.matrix[i][j] ==
                  normalized_distance(order_siblings(trees[i]), order_siblings(trees[j]),
                                      CostScheme{}));
            sum += div.matrix[i][j];
        }
    }
    CHECK(div.mean == doctest::Approx(sum / 6.0));
    CHECK_THROWS_AS(pairwise_tree_diversity({trees[0]}), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("embedding_stats") {

TEST_CASE("identical unit vectors") {
    auto stats = embedding_similarity_stats({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
    CHECK(stats.mean == doctest::Approx(1.0));
    CHECK(stats.stddev == doctest::Approx(0.0));
}

TEST_CASE("orthogonal basis vectors") {
    auto stats =
        embedding_similarity_stats({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    CHECK(stats.mean == doctest::Approx(0.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(stats.matrix[i][i] == 1.0);
}

TEST_CASE("moments match a double-loop recount") {
    Rng rng(derive_seed(0xfeed, "cosine-fixtures", 0));
    std::vector<std::vector<double>> vectors;
    for (int i = 0; i < 8; ++i) {
        std::vector<double> v;
        for (int d = 0; d < 5; ++d) v.push_back(unit_real(rng) * 2.0 - 1.0);
        vectors.push_back(v);
    }
    auto stats = embedding_similarity_stats(vectors);
    std::vector<double> sims;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            double dot = 0, na = 0, nb = 0;
            for (std::size_t d = 0; d < 5; ++d) {
                dot += vectors[i][d] * vectors[j][d];
                na += vectors[i][d] * vectors[i][d];
                nb += vectors[j][d] * vectors[j][d];
            }
            sims.push_back(dot / std::sqrt(na * nb));
        }
    }
    double mean = 0;
    for (double s : sims) mean += s;
    mean /= static_cast<double>(sims.size());
    double var = 0;
    for (double s : sims) var += (s - mean) * (s - mean);
    CHECK(stats.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(stats.stddev == doctest::Approx(std::sqrt(var / sims.size())).epsilon(1e-12));
}

TEST_CASE("zero vectors are named") {
    try {
        embedding_similarity_stats({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}});
        FAIL("expected zero-norm error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(embedding_similarity_stats({{1.0}, {1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(embedding_similarity_stats({{1.0}}), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("nearest_corpus") {

TEST_CASE("an exact member scores one at its own index") {
    std::vector<std::vector<double>> corpus{{1, 0}, {0, 1}, {1, 1}};
    auto out = nearest_corpus_similarity({{0, 1}}, corpus);
    REQUIRE(out.size() == 1);
    CHECK(out[0].first == 1);
    CHECK(out[0].second == doctest::Approx(1.0));
}

TEST_CASE("a one-vector corpus is its own best match") {
    auto out = nearest_corpus_similarity({{1, 0}}, {{1, 1}});
    CHECK(out[0].first == 0);
    CHECK(out[0].second == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("scans agree with a brute-force oracle") {
    Rng rng(derive_seed(0xfeed, "nn-fixtures", 0));
    auto random_vec = [&] {
        std::vector<double> v;
        for (int d = 0; d < 6; ++d) v.push_back(unit_real(rng) * 2.0 - 1.0);
        return v;
    };
    std::vector<std::vector<double>> corpus, queries;
    for (int i = 0; i < 100; ++i) corpus.push_back(random_vec());
    for (int i = 0; i < 10; ++i) queries.push_back(random_vec());
    auto out = nearest_corpus_similarity(queries, corpus);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        double best = -2.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            double dot = 0, na = 0, nb = 0;
            for (int d = 0; d < 6; ++d) {
                dot += queries[q][d] * corpus[i][d];
                na += queries[q][d] * queries[q][d];
                nb += corpus[i][d] * corpus[i][d];
            }
            const double s = dot / std::sqrt(na * nb);
            if (s > best) {
                best = s;
                best_i = i;
            }
        }
        CHECK(out[q].first == best_i);
        CHECK(out[q].second == doctest::Approx(best).epsilon(1e-12));
    }
    CHECK_THROWS_AS(nearest_corpus_similarity(queries, {}), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("histogram") {

TEST_CASE("fractions come from hand counts over five recipes") {
    std::vector<RecipeRecord> recipes;
    auto with_tree = [&](const std::string& id, const std::vector<std::string>& leaves) {
        RecipeRecord r;
        r.recipe_id = id;
        r.dish = "dish";
        r.tree = leaf_under("mix", "preparation", leaves);
        recipes.push_back(std::move(r));
    };
    with_tree("r0", {"salt", "basil"});
    with_tree("r1", {"salt", "flour"});
    with_tree("r2", {"salt"});
    with_tree("r3", {"salt", "basil"});
    RecipeRecord treeless;
    treeless.recipe_id = "r4";
    treeless.dish = "dish";
    treeless.ingredients = {"salt", "salt", "egg"};  // duplicate counts once
    recipes.push_back(treeless);

    auto hist = ingredient_histogram(recipes);
    CHECK(hist.at("salt") == doctest::Approx(1.0));
    CHECK(hist.at("basil") == doctest::Approx(0.4));
    CHECK(hist.at("flour") == doctest::Approx(0.2));
    CHECK(hist.at("egg") == doctest::Approx(0.2));
    CHECK(hist.count("mix") == 0);  // actions stay out
    CHECK(hist.count("yuzu") == 0);
    CHECK(ingredient_histogram({}).empty());
}

}  // TEST_SUITE

TEST_SUITE("csv") {

TEST_CASE("matrices render with indexed headers") {
    CHECK(matrix_to_csv({{0.0, 0.5}, {0.5, 0.0}}) == ",0,1\n0,0,0.5\n1,0.5,0\n");
    CHECK(matrix_to_csv({}) == "\n");
}

}  // TEST_SUITE
