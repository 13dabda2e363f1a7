// Regenerates the bundled fixture dataset and the frozen model-call fixtures.
// Run from the repository root: build/make_fixtures [fixture_dir]. The model
// replies come from the deterministic stub, so reruns are reproducible; the
// recorded exchanges let every test and the bundled config run offline.

#include <filesystem>
#include <iostream>

#include "support/stub_model.hpp"
#include "treeblend/corpus.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/pipeline.hpp"
#include "treeblend/util.hpp"

using namespace treeblend;
namespace fs = std::filesystem;

namespace {

RecipeTree tree_from(const std::string& dot) {
    auto result = parse_dot(dot, ActionHierarchy::builtin());
    if (!result.ok())
        throw std::runtime_error("fixture tree rejected: " + result.report.summary());
    return *result.tree;
}

std::string ingredient(const std::string& label, const std::string& ref, bool core,
                       const std::string& abstraction) {
    return "  \"" + label + "\" [label=\"" + label + "\", kind=\"ingredient\", ref=\"" + ref +
           "\", core=\"" + (core ? "true" : "false") + "\", abstraction=\"" + abstraction +
           "\"];\n";
}

std::string action(const std::string& label, const std::string& abstraction) {
    return "  \"" + label + "\" [label=\"" + label + "\", kind=\"action\", abstraction=\"" +
           abstraction + "\"];\n";
}

std::string edge(const std::string& child, const std::string& parent) {
    return "  \"" + child + "\" -> \"" + parent + "\";\n";
}

RecipeRecord record(const std::string& id, const std::string& dish, const std::string& title,
                    std::vector<std::string> ingredients,
                    std::vector<std::string> instructions, std::vector<double> embedding,
                    std::optional<RecipeTree> tree = std::nullopt) {
    RecipeRecord r;
    r.recipe_id = id;
    r.dish = dish;
    r.title = title;
    r.ingredients = std::move(ingredients);
    r.instructions = std::move(instructions);
    r.embedding = std::move(embedding);
    if (tree) {
        tree->source_recipe_id = id;
        r.tree = std::move(tree);
    }
    return r;
}

RecipeCorpus build_corpus() {
    RecipeCorpus corpus;

    corpus.add(record(
        "lasagna_00", "lasagna", "classic beef lasagna",
        {"beef", "onion", "tomato", "pasta sheets", "mozzarella"},
        {"Brown the beef with onion.", "Simmer with tomato.",
         "Layer pasta sheets with sauce and mozzarella.", "Bake until bubbling."},
        {1.0, 0.1, 0.9, 0.2, 0.1, 0.0},
        tree_from("digraph \"classic beef lasagna\" {\n" +
                  ingredient("beef", "taste", true, "meat") +
                  ingredient("onion", "taste", false, "vegetable") +
                  ingredient("tomato", "taste", true, "vegetable") +
                  ingredient("pasta sheets", "structure", true, "pasta") +
                  ingredient("mozzarella", "taste", false, "cheese") +
                  action("brown", "heat application") + action("simmer", "heat application") +
                  action("layer", "combination") + action("bake", "heat application") +
                  edge("beef", "brown") + edge("onion", "brown") + edge("brown", "simmer") +
                  edge("tomato", "simmer") + edge("simmer", "layer") +
                  edge("pasta sheets", "layer") + edge("mozzarella", "layer") +
                  edge("layer", "bake") + "}\n")));

    corpus.add(record(
        "lasagna_01", "lasagna", "ricotta lasagna",
        {"ricotta", "egg", "tomato", "pasta sheets", "parmesan"},
        {"Whisk ricotta with egg.", "Layer pasta sheets with tomato and the ricotta mix.",
         "Top with parmesan.", "Bake until set."},
        {0.9, 0.0, 1.0, 0.1, 0.2, 0.1},
        tree_from("digraph \"ricotta lasagna\" {\n" +
                  ingredient("ricotta", "taste", true, "cheese") +
                  ingredient("egg", "structure", false, "egg") +
                  ingredient("tomato", "taste", true, "vegetable") +
                  ingredient("pasta sheets", "structure", true, "pasta") +
                  ingredient("parmesan", "taste", false, "cheese") +
                  action("whisk", "preparation") + action("layer", "combination") +
                  action("top", "combination") + action("bake", "heat application") +
                  edge("ricotta", "whisk") + edge("egg", "whisk") + edge("whisk", "layer") +
                  edge("tomato", "layer") + edge("pasta sheets", "layer") +
                  edge("layer", "top") + edge("parmesan", "top") + edge("top", "bake") +
                  "}\n")));

    corpus.add(record(
        "lasagna_02", "lasagna", "basil garden lasagna",
        {"tomato", "basil", "garlic", "pasta sheets", "olive oil"},
        {"Saute garlic in olive oil.", "Simmer tomato with basil.",
         "Layer pasta sheets with the sauce.", "Bake until golden."},
        {1.1, 0.2, 0.8, 0.0, 0.0, 0.2},
        tree_from("digraph \"basil garden lasagna\" {\n" +
                  ingredient("tomato", "taste", true, "vegetable") +
                  ingredient("basil", "taste", false, "herb") +
                  ingredient("garlic", "taste", false, "vegetable") +
                  ingredient("pasta sheets", "structure", true, "pasta") +
                  ingredient("olive oil", "structure", false, "oil") +
                  action("saute", "heat application") + action("simmer", "heat application") +
                  action("layer", "combination") + action("bake", "heat application") +
                  edge("garlic", "saute") + edge("olive oil", "saute") +
                  edge("saute", "simmer") + edge("tomato", "simmer") +
                  edge("basil", "simmer") + edge("simmer", "layer") +
                  edge("pasta sheets", "layer") + edge("layer", "bake") + "}\n")));

    corpus.add(record(
        "lasagna_03", "lasagna", "weeknight skillet lasagna",
        {"beef", "tomato", "pasta sheets", "mozzarella", "salt"},
        {"Brown the beef.", "Stir in tomato and salt.", "Fold in pasta sheets.",
         "Melt mozzarella on top."},
        {0.8, 0.1, 1.1, 0.1, 0.1, 0.0},
        tree_from("digraph \"weeknight skillet lasagna\" {\n" +
                  ingredient("beef", "taste", true, "meat") +
                  ingredient("tomato", "taste", true, "vegetable") +
                  ingredient("pasta sheets", "structure", true, "pasta") +
                  ingredient("mozzarella", "taste", false, "cheese") +
                  ingredient("salt", "taste", false, "mineral") +
                  action("brown", "heat application") + action("stir", "combination") +
                  action("fold", "combination") + action("melt", "heat application") +
                  edge("beef", "brown") + edge("brown", "stir") + edge("tomato", "stir") +
                  edge("salt", "stir") + edge("stir", "fold") + edge("pasta sheets", "fold") +
                  edge("fold", "melt") + edge("mozzarella", "melt") + "}\n")));

    corpus.add(record("lasagna_04", "lasagna", "spinach lasagna",
                      {"spinach", "ricotta", "pasta sheets", "tomato", "garlic"},
                      {"Saute garlic with spinach.", "Mix in ricotta.",
                       "Layer pasta sheets with tomato.", "Bake until golden."},
                      {1.0, 0.0, 1.0, 0.1, 0.3, 0.1}));

    corpus.add(record(
        "pie_00", "chocolate pie", "silk chocolate pie",
        {"chocolate", "butter", "sugar", "egg", "pie crust"},
        {"Melt chocolate with butter.", "Beat in sugar and egg.", "Pour into pie crust.",
         "Chill until firm."},
        {0.1, 1.0, 0.1, 0.9, 0.0, 0.1},
        tree_from("digraph \"silk chocolate pie\" {\n" +
                  ingredient("chocolate", "taste", true, "chocolate") +
                  ingredient("butter", "structure", false, "fat") +
                  ingredient("sugar", "taste", true, "sweetener") +
                  ingredient("egg", "structure", false, "egg") +
                  ingredient("pie crust", "structure", true, "pastry") +
                  action("melt", "heat application") + action("beat", "preparation") +
                  action("pour", "combination") + action("chill", "cooling") +
                  edge("chocolate", "melt") + edge("butter", "melt") + edge("melt", "beat") +
                  edge("sugar", "beat") + edge("egg", "beat") + edge("beat", "pour") +
                  edge("pie crust", "pour") + edge("pour", "chill") + "}\n")));

    corpus.add(record(
        "pie_01", "chocolate pie", "cocoa cream pie",
        {"cocoa", "cream", "sugar", "pie crust", "vanilla"},
        {"Whip the cream.", "Fold in cocoa, sugar, and vanilla.", "Spoon into pie crust.",
         "Chill before serving."},
        {0.0, 0.9, 0.2, 1.0, 0.1, 0.0},
        tree_from("digraph \"cocoa cream pie\" {\n" +
                  ingredient("cocoa", "taste", true, "chocolate") +
                  ingredient("cream", "structure", false, "dairy") +
                  ingredient("sugar", "taste", true, "sweetener") +
                  ingredient("pie crust", "structure", true, "pastry") +
                  ingredient("vanilla", "taste", false, "spice") +
                  action("whip", "preparation") + action("fold", "combination") +
                  action("spoon", "combination") + action("chill", "cooling") +
                  edge("cream", "whip") + edge("whip", "fold") + edge("cocoa", "fold") +
                  edge("sugar", "fold") + edge("vanilla", "fold") + edge("fold", "spoon") +
                  edge("pie crust", "spoon") + edge("spoon", "chill") + "}\n")));

    corpus.add(record(
        "pie_02", "chocolate pie", "baked fudge pie",
        {"chocolate", "flour", "sugar", "egg", "butter"},
        {"Melt chocolate with butter.", "Whisk in sugar, egg, and flour.",
         "Pour into a pan.", "Bake until just set."},
        {0.2, 1.1, 0.0, 0.8, 0.1, 0.2},
        tree_from("digraph \"baked fudge pie\" {\n" +
                  ingredient("chocolate", "taste", true, "chocolate") +
                  ingredient("flour", "structure", false, "grain") +
                  ingredient("sugar", "taste", true, "sweetener") +
                  ingredient("egg", "structure", false, "egg") +
                  ingredient("butter", "structure", false, "fat") +
                  action("melt", "heat application") + action("whisk", "preparation") +
                  action("pour", "combination") + action("bake", "heat application") +
                  edge("chocolate", "melt") + edge("butter", "melt") + edge("melt", "whisk") +
                  edge("sugar", "whisk") + edge("egg", "whisk") + edge("flour", "whisk") +
                  edge("whisk", "pour") + edge("pour", "bake") + "}\n")));

    corpus.add(record(
        "pie_03", "chocolate pie", "milk chocolate custard pie",
        {"chocolate", "milk", "sugar", "egg", "pie crust"},
        {"Warm the milk.", "Melt chocolate into the milk.", "Whisk in sugar and egg.",
         "Pour into pie crust.", "Bake until the custard sets."},
        {0.1, 0.8, 0.1, 1.1, 0.2, 0.0},
        tree_from("digraph \"milk chocolate custard pie\" {\n" +
                  ingredient("chocolate", "taste", true, "chocolate") +
                  ingredient("milk", "structure", false, "dairy") +
                  ingredient("sugar", "taste", true, "sweetener") +
                  ingredient("egg", "structure", false, "egg") +
                  ingredient("pie crust", "structure", true, "pastry") +
                  action("warm", "heat application") + action("melt", "heat application") +
                  action("whisk", "preparation") + action("pour", "combination") +
                  action("bake", "heat application") + edge("milk", "warm") +
                  edge("warm", "melt") + edge("chocolate", "melt") + edge("melt", "whisk") +
                  edge("sugar", "whisk") + edge("egg", "whisk") + edge("whisk", "pour") +
                  edge("pie crust", "pour") + edge("pour", "bake") + "}\n")));

    corpus.add(record("pie_04", "chocolate pie", "pecan chocolate tart",
                      {"chocolate", "pecan", "butter", "sugar", "pie crust"},
                      {"Toast the pecans.", "Melt chocolate with butter.",
                       "Stir in sugar.", "Pour into pie crust.", "Bake until firm."},
                      {0.0, 1.0, 0.2, 0.9, 0.1, 0.2}));

    corpus.set_category("lasagna", "savory");
    corpus.set_category("chocolate pie", "dessert");
    return corpus;
}

// Every raw label shares the g1/g2 core so cross-dish pairs clear the 0.3
// Jaccard bar; basil gets no core and clashes with everything, planting one
// repair per blend that carries it.
const char* kMolecules = R"(ingredient,molecule_id
beef,g1
beef,g2
beef,v1
onion,g1
onion,g2
onion,v2
tomato,g1
tomato,g2
tomato,v3
mozzarella,g1
mozzarella,g2
mozzarella,d1
parmesan,g1
parmesan,g2
parmesan,d1
ricotta,g1
ricotta,g2
ricotta,d2
egg,g1
egg,g2
egg,d3
garlic,g1
garlic,g2
garlic,v2
olive oil,g1
olive oil,g2
olive oil,f1
spinach,g1
spinach,g2
spinach,v4
salt,g1
salt,g2
chocolate,g1
chocolate,g2
chocolate,w1
cocoa,g1
cocoa,g2
cocoa,w1
sugar,g1
sugar,g2
sugar,w2
butter,g1
butter,g2
butter,f1
cream,g1
cream,g2
cream,d2
milk,g1
milk,g2
milk,d3
vanilla,g1
vanilla,g2
vanilla,w3
flour,g1
flour,g2
flour,r1
pecan,g1
pecan,g2
pecan,n1
basil,b1
basil,b2
)";

const char* kComposites = R"(ingredient,constituent
pasta sheets,flour
pasta sheets,egg
pie crust,flour
pie crust,butter
)";

const char* kRunConfig = R"(# Bundled demonstration run: blends the two fixture dishes offline.
# Paths resolve relative to this file; model calls replay from llm/.

[corpus]
file = "corpus.jsonl"
embeddings = "embeddings.jsonl"
categories = "categories.jsonl"

[pairing]
molecules = "molecules.csv"
composites = "composites.csv"
threshold = 0.3
policy = "repair"

[novelty]
min_support = 1

[pairs]
dishes = [["lasagna", "chocolate pie"]]
cross_category_only = true

[seeds]
n_random = 2
n_diverse = 2
metric = "euclidean"

[blend]
min_fraction = 0.3
intermediates_per_pair = 6
direction = "a_to_b"
dish_freq_min = 0.5
# two dishes only, so dish staples are corpus staples too
global_freq_max = 0.5

[select]
top_k = 5
target_size = 3
max_per_dish = 3
steps = 2000

[bridge]
mode = "replay"
fixture_dir = "llm"

[run]
seed = 17
out_dir = "out"
)";

}  // namespace

int main(int argc, char** argv) {
    const fs::path fixture_dir = argc > 1 ? argv[1] : "data/fixtures";
    fs::create_directories(fixture_dir);

    const RecipeCorpus corpus = build_corpus();

    // corpus.jsonl keeps the trees; the sidecars exercise the merge paths
    std::string embeddings, categories;
    RecipeCorpus stripped;
    for (const auto& [id, rec] : corpus.records()) {
        nlohmann::ordered_json line;
        line["recipe_id"] = id;
        line["embedding"] = *rec.embedding;
        embeddings += line.dump() + "\n";
        RecipeRecord copy = rec;
        copy.embedding.reset();
        stripped.add(std::move(copy));
    }
    for (const auto& dish : corpus.dishes()) {
        nlohmann::ordered_json line;
        line["dish"] = dish;
        line["category"] = corpus.category_of(dish);
        categories += line.dump() + "\n";
    }
    save_corpus(stripped, (fixture_dir / "corpus.jsonl").string());
    write_file((fixture_dir / "embeddings.jsonl").string(), embeddings);
    write_file((fixture_dir / "categories.jsonl").string(), categories);
    write_file((fixture_dir / "molecules.csv").string(), kMolecules);
    write_file((fixture_dir / "composites.csv").string(), kComposites);
    write_file((fixture_dir / "run.toml").string(), kRunConfig);

    // One recording pass against the stub freezes every model exchange the
    // bundled config will replay.
    const fs::path scratch = fixture_dir / ".record_scratch";
    fs::remove_all(scratch);
    fs::remove_all(fixture_dir / "llm");
    Config config = load_config((fixture_dir / "run.toml").string());
    ConfigValue mode;
    mode.kind = ConfigValue::Kind::string;
    mode.str = "record";
    config.set("bridge", "mode", mode);
    ConfigValue out;
    out.kind = ConfigValue::Kind::string;
    out.str = fs::absolute(scratch).string();
    config.set("run", "out_dir", out);

    const auto summary =
        run_pipeline(config, std::make_shared<treeblend::testing::StubModel>());
    fs::remove_all(scratch);

    std::size_t fixtures = 0;
    for (const auto& entry : fs::directory_iterator(fixture_dir / "llm"))
        fixtures += entry.is_regular_file();
    std::cout << "fixtures written to " << fixture_dir.string() << ": " << corpus.size()
              << " recipes, " << summary.candidate_count << " candidates, "
              << summary.ranked_count << " ranked, " << summary.recipe_count
              << " rendered, " << fixtures << " model exchanges\n";
    return 0;
}
