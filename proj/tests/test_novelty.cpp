#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "treeblend/novelty.hpp"
#include "treeblend/util.hpp"

using namespace treeblend;

namespace {

// Oracle counts work straight off per-recipe element sets, no index involved.
using ESet = std::set<Element>;

int oracle_n(const std::vector<ESet>& recipes, const Element& e) {
    int n = 0;
    for (const auto& r : recipes) n += r.count(e) ? 1 : 0;
    return n;
}

int oracle_pair(const std::vector<ESet>& recipes, const Element& a, const Element& b) {
    int n = 0;
    for (const auto& r : recipes) n += (r.count(a) && r.count(b)) ? 1 : 0;
    return n;
}

double oracle_idf(const std::vector<ESet>& recipes, const Element& e, const Element& ep,
                  double (*log_fn)(double)) {
    const double n = oracle_n(recipes, e);
    double df = oracle_pair(recipes, e, ep);
    if (df == 0.0) df = 1.0;
    return std::max(0.0, log_fn(n / df));
}

double oracle_element_novelty(const std::vector<ESet>& recipes, int min_support, const Element& e,
                              const ESet& tree_elems, double (*log_fn)(double)) {
    if (oracle_n(recipes, e) < min_support) return 0.0;
    std::vector<double> vals;
    for (const auto& ep : tree_elems) {
        if (ep == e) continue;
        const int support = oracle_n(recipes, ep);
        if (support == 0 || support < min_support) continue;
        vals.push_back(oracle_idf(recipes, e, ep, log_fn));
    }
    std::sort(vals.rbegin(), vals.rend());
    double sum = 0.0;
    for (std::size_t i = 0; i < vals.size() && i < 10; ++i) sum += vals[i];
    return sum;
}

double oracle_tree_novelty(const std::vector<ESet>& recipes, int min_support,
                           const ESet& tree_elems, double (*log_fn)(double)) {
    std::vector<double> vals;
    for (const auto& e : tree_elems)
        vals.push_back(oracle_element_novelty(recipes, min_support, e, tree_elems, log_fn));
    std::sort(vals.rbegin(), vals.rend());
    double sum = 0.0;
    for (std::size_t i = 0; i < vals.size() && i < 10; ++i) sum += vals[i];
    return sum;
}

// Star tree: one root action over ingredient leaves.
RecipeTree tree_with(const std::string& root_action, const std::vector<std::string>& ingredients) {
    RecipeTree t;
    t.title = root_action;
    RecipeNode root;
    root.id = "a0";
    root.kind = NodeKind::action;
    root.label = root_action;
    root.abstraction = root_action;
    t.nodes["a0"] = root;
    for (std::size_t i = 0; i < ingredients.size(); ++i) {
        RecipeNode n;
        n.id = "i" + std::to_string(i);
        n.kind = NodeKind::ingredient;
        n.label = ingredients[i];
        n.abstraction = ingredients[i];
        t.nodes[n.id] = n;
        t.parent[n.id] = "a0";
    }
    return t;
}

RecipeRecord rec(const std::string& id, const std::string& root_action,
                 const std::vector<std::string>& ingredients) {
    RecipeRecord r;
    r.recipe_id = id;
    r.dish = "dish";
    r.title = id;
    r.tree = tree_with(root_action, ingredients);
    return r;
}

ESet elements_of(const RecipeTree& t) { return tree_elements(t); }

Element ing(const std::string& label) { return {NodeKind::ingredient, label}; }
Element act(const std::string& label) { return {NodeKind::action, label}; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("novelty_index") {

TEST_CASE("counts use set semantics per recipe") {
    RecipeCorpus corpus;
    corpus.add(rec("r1", "mix", {"salt"}));
    corpus.add(rec("r2", "mix", {"salt"}));
    auto index = build_index(corpus, 1);
    CHECK(index.corpus_size == 2);
    CHECK(index.element_df.at(ing("salt")) == 2);
    CHECK(index.element_df.at(act("mix")) == 2);
    CHECK(index.pair_count(ing("salt"), act("mix")) == 2);
    CHECK(index.pair_count(act("mix"), ing("salt")) == 2);

    // two nodes with one label still count the recipe once
    RecipeCorpus dup;
    RecipeRecord r = rec("r1", "mix", {"salt"});
    RecipeNode extra;
    extra.id = "i9";
    extra.kind = NodeKind::ingredient;
    extra.label = "salt";
    extra.abstraction = "salt";
    r.tree->nodes["i9"] = extra;
    r.tree->parent["i9"] = "a0";
    dup.add(r);
    auto index2 = build_index(dup, 1);
    CHECK(index2.element_df.at(ing("salt")) == 1);
}

TEST_CASE("treeless recipes are skipped with a warning") {
    RecipeCorpus corpus;
    corpus.add(rec("r1", "mix", {"salt"}));
    RecipeRecord bare;
    bare.recipe_id = "r2";
    bare.dish = "dish";
    corpus.add(bare);
    auto index = build_index(corpus, 1);
    CHECK(index.corpus_size == 1);
    REQUIRE(index.warnings.size() == 1);
    CHECK(index.warnings[0].find("r2") != std::string::npos);
}

TEST_CASE("support floor gates scoring, not indexing") {
    RecipeCorpus corpus;
    corpus.add(rec("r1", "mix", {"salt", "truffle"}));
    corpus.add(rec("r2", "mix", {"salt"}));
    auto index = build_index(corpus, 2);
    CHECK(index.indexed(ing("truffle")));
    CHECK_FALSE(index.scorable(ing("truffle")));
    CHECK(index.scorable(ing("salt")));
    CHECK_THROWS_AS(idf(ing("salt"), ing("truffle"), index), std::domain_error);
    CHECK_THROWS_AS(idf(ing("truffle"), ing("salt"), index), std::domain_error);
}

TEST_CASE("unindexed elements are reported by name") {
    RecipeCorpus corpus;
    corpus.add(rec("r1", "mix", {"salt"}));
    auto index = build_index(corpus, 1);
    try {
        idf(ing("salt"), ing("yuzu"), index);
        FAIL("expected UnknownElement");
    } catch (const UnknownElement& e) {
        CHECK(e.element == ing("yuzu"));
    }
}

TEST_CASE("index counts match a naive recount on random corpora") {
    Rng rng(derive_seed(0xbeef, "novelty-recount", 0));
    const std::vector<std::string> pool{"salt",  "flour", "milk",  "basil", "sugar",
                                        "cream", "egg",   "butter"};
    for (int round = 0; round < 25; ++round) {
        RecipeCorpus corpus;
        std::vector<ESet> recipes;
        const int n = 5 + static_cast<int>(bounded_uint(rng, 46));
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> labels;
            for (const auto& label : pool)
                if (bounded_uint(rng, 2)) labels.push_back(label);
            if (labels.empty()) labels.push_back(pool[bounded_uint(rng, pool.size())]);
            auto r = rec("r" + std::to_string(i), bounded_uint(rng, 2) ? "mix" : "bake", labels);
            recipes.push_back(elements_of(*r.tree));
            corpus.add(std::move(r));
        }
        auto index = build_index(corpus, 1);
        CHECK(index.corpus_size == n);
        for (const auto& [e, df] : index.element_df) CHECK(df == oracle_n(recipes, e));
        for (const auto& [pair, df] : index.pair_df) {
            CHECK(df == oracle_pair(recipes, pair.first, pair.second));
            // a pair can never outnumber either of its elements
            CHECK(df <= index.element_df.at(pair.first));
            CHECK(df <= index.element_df.at(pair.second));
        }
    }
}

}  // TEST_SUITE

TEST_SUITE("novelty_score") {

TEST_CASE("idf hits the closed-form anchor points") {
    // 100 recipes with salt, exactly one of them also basil
    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt", "basil"}));
    for (int i = 1; i < 100; ++i) corpus.add(rec("r" + std::to_string(i), "mix", {"salt"}));
    auto index = build_index(corpus, 1);
    CHECK(idf(ing("salt"), ing("basil"), index) == doctest::Approx(std::log(100.0)));
    CHECK(std::log(100.0) == doctest::Approx(4.6052).epsilon(1e-4));
    // co-occurs everywhere: ln(1) = 0
    CHECK(idf(ing("salt"), act("mix"), index) == 0.0);
    // asymmetry: basil sees salt once in its single recipe
    CHECK(idf(ing("basil"), ing("salt"), index) == 0.0);
}

TEST_CASE("a never-seen pair is smoothed, not a crash") {
    RecipeCorpus corpus;
    for (int i = 0; i < 50; ++i) corpus.add(rec("r" + std::to_string(i), "mix", {"salt"}));
    for (int i = 0; i < 5; ++i) corpus.add(rec("p" + std::to_string(i), "bake", {"pepper"}));
    auto index = build_index(corpus, 1);
    CHECK(index.pair_count(ing("salt"), ing("pepper")) == 0);
    CHECK(idf(ing("salt"), ing("pepper"), index) == doctest::Approx(std::log(50.0)));
    CHECK(std::log(50.0) == doctest::Approx(3.912).epsilon(1e-3));
    CHECK(idf(ing("pepper"), ing("salt"), index) == doctest::Approx(std::log(5.0)));
}

TEST_CASE("fewer than ten co-elements all count") {
    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt", "basil", "egg"}));
    for (int i = 1; i < 10; ++i) corpus.add(rec("r" + std::to_string(i), "bake", {"salt"}));
    auto index = build_index(corpus, 1);
    auto tree = tree_with("mix", {"salt", "basil", "egg"});
    const double expected = idf(ing("salt"), ing("basil"), index) +
                            idf(ing("salt"), ing("egg"), index) +
                            idf(ing("salt"), act("mix"), index);
    CHECK(element_novelty(ing("salt"), tree, index) == doctest::Approx(expected));
}

TEST_CASE("perfect co-occurrence scores zero everywhere") {
    RecipeCorpus corpus;
    for (int i = 0; i < 5; ++i)
        corpus.add(rec("r" + std::to_string(i), "mix", {"salt", "pepper", "oil"}));
    auto index = build_index(corpus, 1);
    auto tree = tree_with("mix", {"salt", "pepper", "oil"});
    CHECK(element_novelty(ing("salt"), tree, index) == 0.0);
    CHECK(tree_novelty(tree, index) == 0.0);
}

TEST_CASE("top-ten truncation matches the oracle on a wide tree") {
    // e plus 12 co-elements with varied counts
    Rng rng(derive_seed(0xbeef, "novelty-wide", 0));
    RecipeCorpus corpus;
    std::vector<ESet> recipes;
    std::vector<std::string> wide{"p0", "p1", "p2", "p3", "p4", "p5",
                                  "p6", "p7", "p8", "p9", "pa", "pb"};
    int next_id = 0;
    auto push = [&](const std::vector<std::string>& labels, const std::string& root) {
        auto r = rec("r" + std::to_string(next_id++), root, labels);
        recipes.push_back(elements_of(*r.tree));
        corpus.add(std::move(r));
    };
    push({"salt"}, "serve");
    for (const auto& p : wide) {
        // each partner co-occurs with salt in a random number of recipes
        const int with_salt = 1 + static_cast<int>(bounded_uint(rng, 3));
        for (int i = 0; i < with_salt; ++i) push({"salt", p}, "mix");
        const int alone = static_cast<int>(bounded_uint(rng, 3));
        for (int i = 0; i < alone; ++i) push({p}, "bake");
    }
    auto index = build_index(corpus, 1);
    auto tree = tree_with("serve", [&] {
        auto labels = wide;
        labels.push_back("salt");
        return labels;
    }());
    const auto tree_elems = elements_of(tree);
    CHECK(tree_elems.size() == 14);  // 12 partners + salt + serve
    CHECK(element_novelty(ing("salt"), tree, index) ==
          doctest::Approx(oracle_element_novelty(recipes, 1, ing("salt"), tree_elems, std::log)));
    CHECK(tree_novelty(tree, index) ==
          doctest::Approx(oracle_tree_novelty(recipes, 1, tree_elems, std::log)));
}

TEST_CASE("an element never seen with the rest raises the score") {
    RecipeCorpus corpus;
    for (int i = 0; i < 6; ++i)
        corpus.add(rec("r" + std::to_string(i), "mix", {"salt", "pepper"}));
    for (int i = 0; i < 6; ++i) corpus.add(rec("z" + std::to_string(i), "bake", {"saffron"}));
    auto index = build_index(corpus, 5);
    auto plain = tree_with("mix", {"salt", "pepper"});
    auto spiked = tree_with("mix", {"salt", "pepper", "saffron"});
    CHECK(tree_novelty(plain, index) == 0.0);
    CHECK(tree_novelty(spiked, index) > tree_novelty(plain, index));
}

TEST_CASE("rare and unknown co-elements are skipped, not fatal") {
    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt", "truffle"}));
    for (int i = 1; i < 6; ++i) corpus.add(rec("r" + std::to_string(i), "mix", {"salt"}));
    auto index = build_index(corpus, 2);
    auto tree = tree_with("mix", {"salt", "truffle", "yuzu"});
    // truffle sits below the floor and yuzu is unindexed; both drop out
    const double expected = idf(ing("salt"), act("mix"), index);
    CHECK(element_novelty(ing("salt"), tree, index) == doctest::Approx(expected));
    CHECK(element_novelty(ing("truffle"), tree, index) == 0.0);
    CHECK(element_novelty(ing("yuzu"), tree, index) == 0.0);
    CHECK_NOTHROW(tree_novelty(tree, index));
}

TEST_CASE("scores and ranks match the oracle across log bases") {
    Rng rng(derive_seed(0xbeef, "novelty-base", 0));
    const std::vector<std::string> pool{"salt", "flour", "milk", "basil", "sugar",
                                        "egg",  "oil",   "rice", "bean",  "corn"};
    RecipeCorpus corpus;
    std::vector<ESet> recipes;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> labels;
        for (const auto& label : pool)
            if (bounded_uint(rng, 3) == 0) labels.push_back(label);
        if (labels.empty()) labels.push_back(pool[bounded_uint(rng, pool.size())]);
        auto r = rec("r" + std::to_string(i), "mix", labels);
        recipes.push_back(elements_of(*r.tree));
        corpus.add(std::move(r));
    }
    auto index = build_index(corpus, 2);

    std::vector<RecipeTree> trees;
    for (int i = 0; i < 15; ++i) {
        std::vector<std::string> labels;
        for (const auto& label : pool)
            if (bounded_uint(rng, 2)) labels.push_back(label);
        if (labels.size() < 2) labels = {"salt", "flour"};
        trees.push_back(tree_with("mix", labels));
    }
    std::vector<double> scored, base10;
    for (const auto& t : trees) {
        scored.push_back(tree_novelty(t, index));
        base10.push_back(oracle_tree_novelty(recipes, 2, elements_of(t), std::log10));
    }
    for (std::size_t i = 0; i < trees.size(); ++i) {
        // natural-log scores are the base-10 oracle scaled by ln 10
        CHECK(scored[i] == doctest::Approx(base10[i] * std::log(10.0)).epsilon(1e-9));
        CHECK(scored[i] >= 0.0);
    }
}

TEST_CASE("scoring leaves the index untouched") {
    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt", "basil"}));
    for (int i = 1; i < 8; ++i) corpus.add(rec("r" + std::to_string(i), "mix", {"salt"}));
    auto index = build_index(corpus, 1);
    save_index(index, "tmp_index_before.bin");
    auto tree = tree_with("mix", {"salt", "basil", "yuzu"});
    (void)tree_novelty(tree, index);
    (void)element_novelty(ing("salt"), tree, index);
    save_index(index, "tmp_index_after.bin");
    CHECK(slurp("tmp_index_before.bin") == slurp("tmp_index_after.bin"));
    std::remove("tmp_index_before.bin");
    std::remove("tmp_index_after.bin");
}

}  // TEST_SUITE

TEST_SUITE("novelty_io") {

TEST_CASE("save and load round-trip the index") {
    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt", "basil", "egg"}));
    corpus.add(rec("r1", "bake", {"salt", "egg"}));
    corpus.add(rec("r2", "mix", {"basil"}));
    auto index = build_index(corpus, 2);
    save_index(index, "tmp_roundtrip.bin");
    auto loaded = load_index("tmp_roundtrip.bin");
    CHECK(loaded.corpus_size == index.corpus_size);
    CHECK(loaded.min_support == index.min_support);
    CHECK(loaded.element_df == index.element_df);
    CHECK(loaded.pair_df == index.pair_df);
    // and the loaded copy scores identically
    auto tree = tree_with("mix", {"salt", "basil", "egg"});
    CHECK(tree_novelty(tree, loaded) == tree_novelty(tree, index));
    std::remove("tmp_roundtrip.bin");
}

TEST_CASE("foreign and stale files are refused") {
    {
        std::ofstream out("tmp_bad_magic.bin", std::ios::binary);
        out << "NOPE" << std::string(64, '\0');
    }
    CHECK_THROWS_AS(load_index("tmp_bad_magic.bin"), std::runtime_error);
    std::remove("tmp_bad_magic.bin");

    RecipeCorpus corpus;
    corpus.add(rec("r0", "mix", {"salt"}));
    save_index(build_index(corpus, 1), "tmp_stale.bin");
    {
        // bump the version field in place
        std::fstream f("tmp_stale.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char v99[4] = {99, 0, 0, 0};
        f.write(v99, 4);
    }
    CHECK_THROWS_AS(load_index("tmp_stale.bin"), std::runtime_error);
    std::remove("tmp_stale.bin");

    CHECK_THROWS_AS(load_index("tmp_missing_file.bin"), std::runtime_error);
}

}  // TEST_SUITE
