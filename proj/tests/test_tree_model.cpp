#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "treeblend/corpus.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/tree.hpp"

using namespace treeblend;

namespace {

// Fig-2-style lasagna: three ingredients topped and baked.
const char* kLasagnaDot = R"(digraph "lasagna" {
  // leaves are ingredients, inner nodes are actions
  sheets [label="lasagna sheets", kind="ingredient", ref="structure", core="true", abstraction="pasta"];
  sauce  [label="tomato sauce", kind="ingredient", ref="taste", core="true", abstraction="sauce"];
  cheese [label="cheese", kind="ingredient", ref="taste", core="true", abstraction="dairy"];
  boil   [label="boil", kind="action"];
  top    [label="top", kind="action"];
  bake   [label="bake", kind="action"];
  sheets -> boil;
  boil -> top;
  sauce -> top;
  cheese -> top;
  top -> bake;
})";

RecipeTree lasagna() {
    auto result = parse_dot(kLasagnaDot, ActionHierarchy::builtin());
    REQUIRE(result.ok());
    return *result.tree;
}

bool has_violation(const ValidationReport& report, ViolationKind kind) {
    for (const auto& v : report.violations)
        if (v.kind == kind) return true;
    return false;
}

}  // namespace

TEST_SUITE("tree_model") {

TEST_CASE("lasagna fixture parses with expected shape") {
    RecipeTree t = lasagna();
    CHECK(t.title == "lasagna");
    CHECK(t.size() == 6);
    CHECK(t.root_id() == "bake");
    CHECK(t.node("sheets").kind == NodeKind::ingredient);
    CHECK(t.node("sheets").ref_type == RefType::structure);
    CHECK(t.node("sheets").core);
    CHECK(t.node("boil").kind == NodeKind::action);
    // verb falls back to the builtin hierarchy
    CHECK(t.node("boil").abstraction == ActionHierarchy::builtin().category_of("boil"));
    auto kids = t.children("top");
    REQUIRE(kids.size() == 3);
    // children come back ordered by (label, id)
    CHECK(t.node(kids[0]).label == "boil");
    CHECK(t.node(kids[1]).label == "cheese");
    CHECK(t.node(kids[2]).label == "tomato sauce");
}

TEST_CASE("validation accepts the fixture and reports node/edge counts") {
    RecipeTree t = lasagna();
    auto report = validate(t);
    CHECK(report.ok());
    CHECK(report.violations.empty());
}

TEST_CASE("a single ingredient node is not a tree") {
    std::map<std::string, RecipeNode> nodes;
    RecipeNode n;
    n.id = "salt";
    n.kind = NodeKind::ingredient;
    n.label = "salt";
    n.abstraction = "seasoning";
    nodes["salt"] = n;
    auto report = validate_graph(nodes, {});
    CHECK_FALSE(report.ok());
    CHECK(has_violation(report, ViolationKind::root_not_action));
}

TEST_CASE("empty graph is rejected") {
    auto report = validate_graph({}, {});
    CHECK(has_violation(report, ViolationKind::empty_tree));
}

TEST_CASE("two roots are rejected") {
    RecipeTree t = lasagna();
    t.parent.erase("top");  // detaches the subtree under "top" from "bake"
    auto report = validate(t);
    CHECK(has_violation(report, ViolationKind::multiple_roots));
}

TEST_CASE("edge into an ingredient is rejected") {
    RecipeTree t = lasagna();
    t.parent["boil"] = "cheese";
    auto report = validate(t);
    CHECK(has_violation(report, ViolationKind::wrong_edge_direction));
}

TEST_CASE("childless action is rejected") {
    RecipeTree t = lasagna();
    RecipeNode stir;
    stir.id = "stir";
    stir.kind = NodeKind::action;
    stir.label = "stir";
    stir.abstraction = "preparation";
    t.nodes["stir"] = stir;
    t.parent["stir"] = "bake";
    auto report = validate(t);
    CHECK(has_violation(report, ViolationKind::leaf_action));
}

TEST_CASE("cycle is rejected") {
    std::map<std::string, RecipeNode> nodes;
    for (const char* id : {"a", "b"}) {
        RecipeNode n;
        n.id = id;
        n.kind = NodeKind::action;
        n.label = id;
        n.abstraction = "other";
        nodes[id] = n;
    }
    std::vector<std::pair<std::string, std::string>> edges{{"a", "b"}, {"b", "a"}};
    auto report = validate_graph(nodes, edges);
    CHECK(has_violation(report, ViolationKind::cycle));
}

TEST_CASE("second outgoing edge is rejected at the graph level") {
    auto graph = parse_dot_graph(kLasagnaDot, ActionHierarchy::builtin());
    graph.edges.emplace_back("sauce", "bake");  // sauce already feeds "top"
    auto result = build_tree(graph);
    CHECK_FALSE(result.ok());
    CHECK(has_violation(result.report, ViolationKind::multiple_out_edges));
}

TEST_CASE("element_set splits ingredients from actions") {
    auto elems = element_set(lasagna());
    CHECK(elems.ingredients == std::set<std::string>{"lasagna sheets", "tomato sauce", "cheese"});
    CHECK(elems.actions == std::set<std::string>{"boil", "top", "bake"});
}

TEST_CASE("structural equality ignores ids and attributes") {
    RecipeTree a = lasagna();
    RecipeTree b = lasagna();
    CHECK(structurally_equal(a, b));
    CHECK(attributes_equal(a, b));

    b.node_mut("cheese").core = false;
    CHECK(structurally_equal(a, b));
    CHECK_FALSE(attributes_equal(a, b));

    b = lasagna();
    b.node_mut("cheese").label = "ricotta";
    CHECK_FALSE(structurally_equal(a, b));
}

}  // TEST_SUITE

TEST_SUITE("dot_format") {

TEST_CASE("serialize then parse is the identity on the fixture") {
    RecipeTree t = lasagna();
    std::string text = serialize_dot(t);
    auto again = parse_dot(text, ActionHierarchy::builtin());
    REQUIRE(again.ok());
    CHECK(attributes_equal(t, *again.tree));
    CHECK(again.tree->title == t.title);
    // canonical form is a fixed point
    CHECK(serialize_dot(*again.tree) == text);
}

TEST_CASE("json round trip preserves everything") {
    RecipeTree t = lasagna();
    t.source_recipe_id = "r1";
    RecipeTree again = tree_from_json(tree_to_json(t));
    CHECK(attributes_equal(t, again));
    CHECK(again.source_recipe_id == std::optional<std::string>("r1"));
    CHECK(tree_to_json(again) == tree_to_json(t));
}

TEST_CASE("missing kind attribute is a syntax error with position") {
    const char* text = "digraph d {\n  x [label=\"salt\"];\n  x -> y;\n  y [kind=\"action\"];\n}";
    try {
        parse_dot_graph(text, ActionHierarchy::builtin());
        FAIL("expected DotSyntaxError");
    } catch (const DotSyntaxError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("bad enum values are syntax errors") {
    CHECK_THROWS_AS(parse_dot_graph("digraph d { x [kind=\"thing\"]; }", ActionHierarchy::builtin()),
                    DotSyntaxError);
    CHECK_THROWS_AS(
        parse_dot_graph("digraph d { x [kind=\"ingredient\", ref=\"smell\"]; }", ActionHierarchy::builtin()),
        DotSyntaxError);
    CHECK_THROWS_AS(
        parse_dot_graph("digraph d { x [kind=\"ingredient\", core=\"yes\"]; }", ActionHierarchy::builtin()),
        DotSyntaxError);
}

TEST_CASE("unterminated constructs are syntax errors") {
    CHECK_THROWS_AS(parse_dot_graph("digraph d { x [kind=\"action\"", ActionHierarchy::builtin()),
                    DotSyntaxError);
    CHECK_THROWS_AS(parse_dot_graph("digraph d { x [label=\"unclosed]; }", ActionHierarchy::builtin()),
                    DotSyntaxError);
    CHECK_THROWS_AS(parse_dot_graph("graph d { }", ActionHierarchy::builtin()), DotSyntaxError);
}

TEST_CASE("comments, chains, and duplicate statements are tolerated") {
    const char* text = R"(digraph "mini" {
      # hash comment
      /* block
         comment */
      a [kind="ingredient", label="apple"];  // trailing
      a [abstraction="fruit"];
      chop [kind="action"];
      serve [kind="action"];
      a -> chop -> serve;
      a -> chop;  // duplicate edge collapses
    })";
    auto graph = parse_dot_graph(text, ActionHierarchy::builtin());
    CHECK(graph.edges.size() == 2);
    CHECK(graph.nodes.at("a").abstraction == "fruit");
    CHECK(graph.nodes.at("a").label == "apple");
    auto result = build_tree(graph);
    REQUIRE(result.ok());
}

TEST_CASE("node ids may be bare identifiers or quoted strings") {
    const char* text =
        "digraph d { \"two words\" [kind=\"ingredient\"]; mix [kind=\"action\"]; \"two words\" -> mix; }";
    auto result = parse_dot(text, ActionHierarchy::builtin());
    REQUIRE(result.ok());
    CHECK(result.tree->has_node("two words"));
    // label defaults to the id, abstraction of an ingredient defaults to its label
    CHECK(result.tree->node("two words").label == "two words");
    CHECK(result.tree->node("two words").abstraction == "two words");
}

TEST_CASE("serializer refuses an empty title") {
    RecipeTree t = lasagna();
    t.title.clear();
    CHECK_THROWS_AS(serialize_dot(t), std::invalid_argument);
}

TEST_CASE("quotes and backslashes survive the round trip") {
    RecipeTree t = lasagna();
    t.node_mut("cheese").label = "grated \"pecorino\" \\ romano";
    std::string text = serialize_dot(t);
    auto again = parse_dot(text, ActionHierarchy::builtin());
    REQUIRE(again.ok());
    CHECK(again.tree->node("cheese").label == "grated \"pecorino\" \\ romano");
}

}  // TEST_SUITE

TEST_SUITE("corpus") {

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("tmp_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string fixture_jsonl() {
    RecipeTree t = lasagna();
    std::string line1 =
        R"({"recipe_id":"r1","dish":"Lasagna","title":"classic","ingredients":["sheets"],"instructions":["bake it"]})";
    std::string line2 = R"({"recipe_id":"r2","dish":"lasagna","title":"quick"})";
    std::string line3 = R"({"recipe_id":"r3","dish":"chocolate pie","title":"pie"})";
    return line1 + "\n" + line2 + "\n\n" + line3 + "\n";
}

}  // namespace

TEST_CASE("load builds the dish index and lookup case-folds") {
    auto path = write_temp("corpus_basic.jsonl", fixture_jsonl());
    auto corpus = load_corpus(path);
    CHECK(corpus.size() == 3);
    CHECK(corpus.lookup("LASAGNA").size() == 2);
    CHECK(corpus.lookup("Chocolate Pie").size() == 1);
    CHECK(corpus.lookup("tiramisu").empty());
    CHECK(corpus.dishes().size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("duplicate id fails with the line number") {
    auto path = write_temp("corpus_dup.jsonl",
                           R"({"recipe_id":"r1","dish":"a"})"
                           "\n"
                           R"({"recipe_id":"r1","dish":"a"})"
                           "\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains(":2:"), CorpusError);
    std::remove(path.c_str());
}

TEST_CASE("malformed json fails with the line number") {
    auto path = write_temp("corpus_bad.jsonl", "{\"recipe_id\": \"r1\", \"dish\":\n");
    CHECK_THROWS_AS(load_corpus(path), CorpusError);
    std::remove(path.c_str());
}

TEST_CASE("empty file loads as an empty corpus") {
    auto path = write_temp("corpus_empty.jsonl", "");
    auto corpus = load_corpus(path);
    CHECK(corpus.empty());
    std::remove(path.c_str());
}

TEST_CASE("save then load round-trips records, trees, and embeddings") {
    RecipeCorpus corpus;
    RecipeRecord r;
    r.recipe_id = "r1";
    r.dish = "lasagna";
    r.title = "golden";
    r.ingredients = {"sheets", "sauce"};
    r.instructions = {"layer", "bake"};
    r.tree = lasagna();
    r.embedding = std::vector<double>{0.5, -1.25, 3.0};
    corpus.add(r);

    auto path = std::string("tmp_corpus_rt.jsonl");
    save_corpus(corpus, path);
    auto again = load_corpus(path);
    REQUIRE(again.size() == 1);
    const auto& rec = again.record("r1");
    CHECK(rec.ingredients == r.ingredients);
    CHECK(rec.instructions == r.instructions);
    REQUIRE(rec.tree.has_value());
    CHECK(attributes_equal(*rec.tree, *r.tree));
    CHECK(rec.embedding == r.embedding);
    std::remove(path.c_str());
}

TEST_CASE("embedding sidecar merges by id and enforces equal lengths") {
    auto corpus_path = write_temp("corpus_em.jsonl", fixture_jsonl());
    auto emb_path = write_temp("emb.jsonl",
                               R"({"recipe_id":"r1","embedding":[1.0,2.0]})"
                               "\n"
                               R"({"recipe_id":"r3","embedding":[0.0,1.0]})"
                               "\n");
    auto corpus = load_corpus(corpus_path, emb_path);
    CHECK(corpus.record("r1").embedding.has_value());
    CHECK_FALSE(corpus.record("r2").embedding.has_value());
    CHECK(corpus.embedding_dim() == std::optional<std::size_t>(2));

    auto bad_path = write_temp("emb_bad.jsonl", R"({"recipe_id":"r1","embedding":[1.0,2.0,3.0]})"
                                                "\n"
                                                R"({"recipe_id":"r3","embedding":[0.0]})"
                                                "\n");
    CHECK_THROWS_AS(load_corpus(corpus_path, bad_path), CorpusError);
    std::remove(corpus_path.c_str());
    std::remove(emb_path.c_str());
    std::remove(bad_path.c_str());
}

TEST_CASE("categories default to uncategorized") {
    auto corpus_path = write_temp("corpus_cat.jsonl", fixture_jsonl());
    auto cat_path = write_temp("cats.jsonl", R"({"dish":"Lasagna","category":"main course"})"
                                             "\n");
    auto corpus = load_corpus(corpus_path, std::nullopt, cat_path);
    CHECK(corpus.category_of("lasagna") == "main course");
    CHECK(corpus.category_of("chocolate pie") == "uncategorized");
    std::remove(corpus_path.c_str());
    std::remove(cat_path.c_str());
}

}  // TEST_SUITE
