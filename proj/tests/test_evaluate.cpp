#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "treeblend/dot.hpp"
#include "treeblend/evaluate.hpp"

using namespace treeblend;

namespace {

PairingTable fixture_table() {
    PairingTable table;
    table.raw_molecules["flour"] = {"m1", "m2"};
    table.raw_molecules["water"] = {"m1", "m2"};
    table.raw_molecules["basil"] = {"m1", "m3"};
    table.raw_molecules["anise"] = {"m9"};
    table.validate();
    return table;
}

RecipeTree star(const std::string& title, const std::string& action,
                const std::vector<std::string>& labels) {
    std::string dot = "digraph \"" + title + "\" {\n";
    dot += "  \"" + action + "\" [label=\"" + action +
           "\", kind=\"action\", abstraction=\"combination\"];\n";
    for (const auto& label : labels) {
        dot += "  \"" + label + "\" [label=\"" + label +
               "\", kind=\"ingredient\", ref=\"taste\", core=\"false\", abstraction=\"" + label +
               "\"];\n";
        dot += "  \"" + label + "\" -> \"" + action + "\";\n";
    }
    dot += "}\n";
    auto result = parse_dot(dot, ActionHierarchy::builtin());
    REQUIRE(result.ok());
    return *result.tree;
}

// Eight recipes pin flour/water/mix as common; one holds the rare pair.
NoveltyIndex fixture_index() {
    RecipeCorpus corpus;
    for (int i = 0; i < 8; ++i) {
        RecipeRecord rec;
        rec.recipe_id = "common" + std::to_string(i);
        rec.dish = "paste";
        rec.tree = star("paste", "mix", {"flour", "water"});
        corpus.add(std::move(rec));
    }
    RecipeRecord rare;
    rare.recipe_id = "rare";
    rare.dish = "pesto";
    rare.tree = star("pesto", "chop", {"basil", "anise"});
    corpus.add(std::move(rare));
    return build_index(corpus, 1);
}

BlendCandidate cand(const std::string& id, RecipeTree tree) {
    BlendCandidate c;
    c.id = id;
    c.tree = std::move(tree);
    c.source_pair = {"s", "t"};
    c.fraction_from_source = 0.5;
    c.fraction_from_target = 0.5;
    return c;
}

}  // namespace

TEST_SUITE("evaluate") {
    TEST_CASE("an empty candidate list evaluates to an empty ranking") {
        CHECK(evaluate({}, fixture_table(), fixture_index()).empty());
    }

    TEST_CASE("survivors come back sorted by novelty with rejections dropped") {
        const auto table = fixture_table();
        const auto index = fixture_index();
        std::vector<BlendCandidate> pool{
            cand("clean", star("a", "mix", {"flour", "water", "basil"})),
            cand("clashing", star("b", "mix", {"flour", "water", "anise"})),
            cand("hopeless", star("c", "mix", {"flour", "anise"})),
        };
        const auto ranked = evaluate(pool, table, index, 0.3);

        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].candidate.id == "clean");
        CHECK(ranked[1].candidate.id == "clashing");
        // flour, water, and mix each pair with nothing rarer than basil
        CHECK(ranked[0].novelty == doctest::Approx(3.0 * std::log(8.0)).epsilon(1e-12));
        CHECK(ranked[1].novelty == doctest::Approx(0.0));

        CHECK(ranked[0].verdict.removed.empty());
        REQUIRE(ranked[1].verdict.removed.size() == 1);
        CHECK(ranked[1].verdict.removed[0] == std::pair<std::string, int>{"anise", 2});
        CHECK(ranked[1].verdict.kept == std::set<std::string>{"flour", "water"});
    }

    TEST_CASE("novelty is scored on the repaired tree, not the submitted one") {
        const auto table = fixture_table();
        const auto index = fixture_index();
        const RecipeTree original = star("b", "mix", {"flour", "water", "anise"});
        const auto ranked = evaluate({cand("clashing", original)}, table, index, 0.3);

        REQUIRE(ranked.size() == 1);
        CHECK(ranked[0].novelty ==
              doctest::Approx(tree_novelty(ranked[0].candidate.tree, index)).epsilon(1e-12));
        // the submitted tree still holds the rare pairing and would score high
        CHECK(tree_novelty(original, index) > 1.0);
        CHECK(ranked[0].novelty < 1e-12);
        CHECK_FALSE(ranked[0].candidate.tree.nodes.count("anise"));
    }

    TEST_CASE("equal scores fall back to id order") {
        const auto table = fixture_table();
        const auto index = fixture_index();
        const RecipeTree tree = star("a", "mix", {"flour", "water", "basil"});
        const auto ranked = evaluate({cand("z", tree), cand("f", tree)}, table, index, 0.3);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].candidate.id == "f");
        CHECK(ranked[1].candidate.id == "z");
    }

    TEST_CASE("the reject policy drops what repair would have saved") {
        const auto table = fixture_table();
        const auto index = fixture_index();
        std::vector<BlendCandidate> pool{
            cand("clean", star("a", "mix", {"flour", "water", "basil"})),
            cand("clashing", star("b", "mix", {"flour", "water", "anise"})),
        };
        const auto ranked = evaluate(pool, table, index, 0.3, ValuePolicy::reject);
        REQUIRE(ranked.size() == 1);
        CHECK(ranked[0].candidate.id == "clean");
    }

    TEST_CASE("ingredients without pairing data ride along unscored") {
        const auto ranked = evaluate({cand("odd", star("a", "mix",
                                                       {"flour", "water", "dragonfruit"}))},
                                     fixture_table(), fixture_index(), 0.3);
        REQUIRE(ranked.size() == 1);
        CHECK(ranked[0].verdict.unknown == std::set<std::string>{"dragonfruit"});
        CHECK(ranked[0].candidate.tree.nodes.count("dragonfruit"));
    }

    TEST_CASE("the concurrent map never shuffles the ranking") {
        const auto table = fixture_table();
        const auto index = fixture_index();
        std::vector<BlendCandidate> pool;
        for (int i = 0; i < 40; ++i) {
            const std::string id = "c" + std::to_string(i);
            pool.push_back(cand(id, i % 2 ? star("a", "mix", {"flour", "water", "basil"})
                                          : star("b", "mix", {"flour", "water", "anise"})));
        }
        const auto first = evaluate(pool, table, index, 0.3);
        const auto second = evaluate(pool, table, index, 0.3);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i)
            CHECK(first[i].candidate.id == second[i].candidate.id);
        for (std::size_t i = 1; i < first.size(); ++i) {
            const bool ordered =
                first[i - 1].novelty > first[i].novelty ||
                (first[i - 1].novelty == first[i].novelty &&
                 first[i - 1].candidate.id < first[i].candidate.id);
            CHECK(ordered);
        }
    }
}
