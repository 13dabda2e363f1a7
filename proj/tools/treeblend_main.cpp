// Command-line front end. Every subcommand wraps one library call so scripts
// can drive the machinery piecemeal; `run` executes the whole staged pipeline
// from a config file. Exit codes: 0 success, 2 bad settings, 3 stage failure,
// 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "treeblend/config.hpp"
#include "treeblend/corpus.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/edit_distance.hpp"
#include "treeblend/evaluate.hpp"
#include "treeblend/metrics.hpp"
#include "treeblend/novelty.hpp"
#include "treeblend/pairing.hpp"
#include "treeblend/pipeline.hpp"
#include "treeblend/recombine.hpp"
#include "treeblend/sampling.hpp"
#include "treeblend/select.hpp"
#include "treeblend/tree.hpp"
#include "treeblend/util.hpp"

using namespace treeblend;
using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

RecipeTree load_tree(const std::string& path) {
    auto result = parse_dot(read_file(path), ActionHierarchy::builtin());
    if (!result.ok())
        throw std::runtime_error(path + ": " + result.report.summary());
    return std::move(*result.tree);
}

CostScheme load_costs(const std::string& path) {
    return path.empty() ? CostScheme{} : CostScheme::from_json_file(path);
}

ValuePolicy policy_from(const std::string& name) {
    if (name == "repair") return ValuePolicy::repair;
    if (name == "reject") return ValuePolicy::reject;
    throw std::runtime_error("policy must be repair or reject, got \"" + name + "\"");
}

DistanceMetric metric_from(const std::string& name) {
    if (name == "euclidean") return DistanceMetric::euclidean;
    if (name == "cosine") return DistanceMetric::cosine;
    throw std::runtime_error("metric must be euclidean or cosine, got \"" + name + "\"");
}

// stdout unless --out was given
void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

ordered_json verdict_to_json(const ValueVerdict& verdict) {
    ordered_json body;
    body["kept"] = std::vector<std::string>(verdict.kept.begin(), verdict.kept.end());
    body["removed"] = json::array();
    for (const auto& [label, clashes] : verdict.removed)
        body["removed"].push_back({label, clashes});
    body["min_pair_score_after"] = verdict.min_pair_score_after;
    body["rejected"] = verdict.rejected;
    body["unknown"] = std::vector<std::string>(verdict.unknown.begin(), verdict.unknown.end());
    return body;
}

ordered_json candidate_metadata(const BlendCandidate& c, const std::string& dish_a,
                                const std::string& dish_b, const std::string& dot_file) {
    ordered_json meta;
    meta["id"] = c.id;
    meta["dish_a"] = dish_a;
    meta["dish_b"] = dish_b;
    meta["source_pair"] = {c.source_pair.first, c.source_pair.second};
    meta["applied_ops"] = c.applied_ops;
    meta["fraction_from_source"] = c.fraction_from_source;
    meta["fraction_from_target"] = c.fraction_from_target;
    meta["dot_file"] = dot_file;
    return meta;
}

// {"recipe_id": ..., "embedding": [...]} per line, order preserved
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> load_embedding_rows(
    const std::string& path) {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> vectors;
    std::size_t line_no = 0;
    for (const auto& line : split(read_file(path), '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto row = json::parse(line);
            ids.push_back(row.at("recipe_id").get<std::string>());
            vectors.push_back(row.at("embedding").get<std::vector<double>>());
        } catch (const json::exception& e) {
            throw std::runtime_error(path + " line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return {std::move(ids), std::move(vectors)};
}

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& extension) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_run(const std::string& config_path) {
    try {
        const PipelineSummary summary = run_pipeline_file(config_path);
        std::cout << "pipeline finished: " << summary.recipe_count << " recipes from "
                  << summary.ranked_count << " ranked candidates in "
                  << summary.out_dir.string() << "\n";
        for (const auto& warning : summary.warnings)
            std::cerr << "warning: " << warning << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StageError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}

int cmd_treedist(const std::string& a_path, const std::string& b_path,
                 const std::string& costs_path, const std::string& script_path,
                 bool normalized) {
    const RecipeTree a = load_tree(a_path);
    const RecipeTree b = load_tree(b_path);
    const CostScheme costs = load_costs(costs_path);
    const OrderedTree oa = order_siblings(a);
    const OrderedTree ob = order_siblings(b);
    const auto [dist, script] = distance(oa, ob, costs);

    if (!script_path.empty()) {
        ordered_json body;
        body["total_cost"] = script.total_cost;
        body["ops"] = json::array();
        for (const auto& op : script.ops) {
            ordered_json row;
            row["kind"] = to_string(op.kind);
            if (op.source_id) row["source_id"] = *op.source_id;
            if (op.target_id) row["target_id"] = *op.target_id;
            row["cost"] = op.cost;
            body["ops"].push_back(row);
        }
        body["mapping"] = json::array();
        for (const auto& [s, t] : script.mapping) body["mapping"].push_back({s, t});
        write_file(script_path, body.dump(2) + "\n");
    }
    std::cout << format_double(normalized ? normalized_distance(oa, ob, costs) : dist)
              << "\n";
    return 0;
}

int cmd_blend(const std::string& corpus_path, const std::string& dish_a,
              const std::string& dish_b, std::uint64_t seed, const std::string& out_dir,
              const BlendConstraints& constraints, const std::string& costs_path,
              double dish_freq_min, double global_freq_max, bool no_essentials) {
    const RecipeCorpus corpus = load_corpus(corpus_path);
    const CostScheme costs = load_costs(costs_path);
    for (const auto* dish : {&dish_a, &dish_b})
        if (corpus.lookup(*dish).empty())
            throw std::runtime_error("dish \"" + *dish + "\" has no recipes in the corpus");

    EssentialIngredientIndex essentials;
    if (!no_essentials) {
        essentials = build_essential_index(corpus, dish_freq_min, global_freq_max);
        for (const auto& warning : essentials.warnings)
            std::cerr << "warning: " << warning << "\n";
    }

    fs::create_directories(out_dir);
    std::uint64_t counter = 0;
    std::size_t written = 0;
    for (const auto* ra : corpus.lookup(dish_a)) {
        if (!ra->tree) continue;
        for (const auto* rb : corpus.lookup(dish_b)) {
            if (!rb->tree) continue;
            const auto batch =
                intermediates(*ra->tree, *rb->tree, constraints, costs,
                              derive_seed(seed, "blend", counter++),
                              no_essentials ? nullptr : &essentials, dish_a, dish_b);
            for (const auto& c : batch) {
                write_file((fs::path(out_dir) / (c.id + ".dot")).string(),
                           serialize_dot(c.tree));
                write_file((fs::path(out_dir) / (c.id + ".json")).string(),
                           candidate_metadata(c, dish_a, dish_b, c.id + ".dot").dump(2) +
                               "\n");
                ++written;
            }
        }
    }
    std::cout << written << " candidates written to " << out_dir << "\n";
    return 0;
}

int cmd_valuecheck(const std::string& tree_path, const std::string& molecules,
                   const std::string& composites, double threshold,
                   const std::string& policy, const std::string& repaired_out) {
    const RecipeTree tree = load_tree(tree_path);
    const PairingTable table = PairingTable::from_csv_files(molecules, composites);
    const auto [repaired, verdict] =
        enforce_value(tree, table, threshold, policy_from(policy));
    if (!repaired_out.empty()) write_file(repaired_out, serialize_dot(repaired));
    std::cout << verdict_to_json(verdict).dump(2) << "\n";
    return verdict.rejected ? 1 : 0;
}

int cmd_novelty_build(const std::string& corpus_path, int min_support,
                      const std::string& out_path) {
    const RecipeCorpus corpus = load_corpus(corpus_path);
    const NoveltyIndex index = build_index(corpus, min_support);
    save_index(index, out_path);
    for (const auto& warning : index.warnings) std::cerr << "warning: " << warning << "\n";
    std::cout << "indexed " << index.corpus_size << " recipes, "
              << index.element_df.size() << " elements, " << index.pair_df.size()
              << " pairs to " << out_path << "\n";
    return 0;
}

int cmd_novelty_score(const std::string& tree_path, const std::string& index_path) {
    const RecipeTree tree = load_tree(tree_path);
    const NoveltyIndex index = load_index(index_path);
    std::cout << format_double(tree_novelty(tree, index)) << "\n";
    return 0;
}

int cmd_sample_seeds(const std::string& corpus_path, const std::string& embeddings,
                     const std::string& dish, std::uint64_t seed, std::size_t n_random,
                     std::size_t n_diverse, const std::string& metric) {
    const RecipeCorpus corpus = load_corpus(
        corpus_path,
        embeddings.empty() ? std::nullopt : std::optional<std::string>(embeddings));
    const auto pool = corpus.lookup(dish);
    if (pool.empty())
        throw std::runtime_error("dish \"" + dish + "\" has no recipes in the corpus");
    for (const auto& id :
         sample_seeds(pool, n_random, n_diverse, seed, metric_from(metric)))
        std::cout << id << "\n";
    return 0;
}

int cmd_select(const std::string& pool_path, const AnnealConfig& cfg,
               const std::string& out_path) {
    std::vector<ScoredCandidate> pool;
    std::size_t line_no = 0;
    for (const auto& line : split(read_file(pool_path), '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto row = json::parse(line);
            ScoredCandidate c;
            c.id = row.at("id").get<std::string>();
            c.dish_a = row.at("dish_a").get<std::string>();
            c.dish_b = row.at("dish_b").get<std::string>();
            c.novelty = row.at("novelty").get<double>();
            // both the evaluator's spelling and the selector's are accepted
            c.source_fraction = row.value("fraction_from_source",
                                          row.value("source_fraction", 0.0));
            c.target_fraction = row.value("fraction_from_target",
                                          row.value("target_fraction", 0.0));
            pool.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw std::runtime_error(pool_path + " line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    }
    const AnnealResult result = anneal_select(pool, cfg);
    ordered_json body;
    body["ids"] = result.selected_ids;
    body["objective"] = result.objective;
    body["greedy_objective"] = result.greedy_objective;
    emit(body.dump(2) + "\n", out_path);
    return 0;
}

int cmd_evaluate(const std::string& candidates_dir, const std::string& index_path,
                 const std::string& molecules, const std::string& composites,
                 double threshold, const std::string& policy,
                 const std::string& corpus_path, const std::string& out_path) {
    const NoveltyIndex index = load_index(index_path);
    const PairingTable table = PairingTable::from_csv_files(molecules, composites);

    std::map<std::string, int> corpus_frequency;
    if (!corpus_path.empty()) {
        const RecipeCorpus corpus = load_corpus(corpus_path);
        for (const auto& [id, record] : corpus.records()) {
            if (!record.tree) continue;
            for (const auto& label : element_set(*record.tree).ingredients)
                ++corpus_frequency[label];
        }
    }

    std::vector<BlendCandidate> candidates;
    std::map<std::string, std::pair<std::string, std::string>> dishes;
    for (const auto& meta_path : sorted_files(candidates_dir, ".json")) {
        const auto meta = json::parse(read_file(meta_path.string()));
        BlendCandidate c;
        c.id = meta.at("id").get<std::string>();
        c.source_pair = {meta.at("source_pair").at(0).get<std::string>(),
                         meta.at("source_pair").at(1).get<std::string>()};
        c.applied_ops = meta.at("applied_ops").get<int>();
        c.fraction_from_source = meta.at("fraction_from_source").get<double>();
        c.fraction_from_target = meta.at("fraction_from_target").get<double>();
        const fs::path dot_path =
            meta_path.parent_path() / meta.at("dot_file").get<std::string>();
        c.tree = load_tree(dot_path.string());
        dishes[c.id] = {meta.at("dish_a").get<std::string>(),
                        meta.at("dish_b").get<std::string>()};
        candidates.push_back(std::move(c));
    }

    const auto evaluated =
        evaluate(candidates, table, index, threshold, policy_from(policy),
                 corpus_frequency.empty() ? nullptr : &corpus_frequency);
    std::string lines;
    for (const auto& item : evaluated) {
        ordered_json row;
        row["id"] = item.candidate.id;
        row["dish_a"] = dishes.at(item.candidate.id).first;
        row["dish_b"] = dishes.at(item.candidate.id).second;
        row["source_pair"] = {item.candidate.source_pair.first,
                              item.candidate.source_pair.second};
        row["novelty"] = item.novelty;
        row["fraction_from_source"] = item.candidate.fraction_from_source;
        row["fraction_from_target"] = item.candidate.fraction_from_target;
        row["kept"] =
            std::vector<std::string>(item.verdict.kept.begin(), item.verdict.kept.end());
        row["removed"] = json::array();
        for (const auto& [label, clashes] : item.verdict.removed)
            row["removed"].push_back({label, clashes});
        row["min_pair_score_after"] = item.verdict.min_pair_score_after;
        row["unknown"] = std::vector<std::string>(item.verdict.unknown.begin(),
                                                  item.verdict.unknown.end());
        row["tree"] = json::parse(tree_to_json(item.candidate.tree));
        lines += row.dump() + "\n";
    }
    emit(lines, out_path);
    std::cerr << evaluated.size() << " of " << candidates.size()
              << " candidates survived\n";
    return 0;
}

int cmd_metrics_self_bleu(const std::string& texts_path, const std::string& field,
                          int max_n, const std::string& out_path) {
    std::vector<std::string> texts;
    for (const auto& line : split(read_file(texts_path), '\n')) {
        if (trim(line).empty()) continue;
        texts.push_back(json::parse(line).at(field).get<std::string>());
    }
    emit("metric,value\nself_bleu," + format_double(self_bleu(texts, max_n)) + "\n",
         out_path);
    return 0;
}

int cmd_metrics_treedist(const std::string& trees_dir, const std::string& costs_path,
                         const std::string& out_path) {
    std::vector<RecipeTree> trees;
    for (const auto& path : sorted_files(trees_dir, ".dot"))
        trees.push_back(load_tree(path.string()));
    const TreeDiversity diversity = pairwise_tree_diversity(trees, load_costs(costs_path));
    emit("# mean_normalized_distance=" + format_double(diversity.mean) + "\n" +
             matrix_to_csv(diversity.matrix),
         out_path);
    return 0;
}

int cmd_metrics_cosine(const std::string& embeddings_path, const std::string& out_path) {
    const auto [ids, vectors] = load_embedding_rows(embeddings_path);
    const SimilarityStats stats = embedding_similarity_stats(vectors);
    emit("# mean=" + format_double(stats.mean) + " stddev=" + format_double(stats.stddev) +
             "\n" + matrix_to_csv(stats.matrix),
         out_path);
    return 0;
}

int cmd_metrics_nncorpus(const std::string& queries_path, const std::string& corpus_path,
                         const std::string& out_path) {
    const auto [query_ids, queries] = load_embedding_rows(queries_path);
    const auto [corpus_ids, corpus_vectors] = load_embedding_rows(corpus_path);
    const auto matches = nearest_corpus_similarity(queries, corpus_vectors);
    std::string csv = "query_id,match_id,similarity\n";
    for (std::size_t i = 0; i < matches.size(); ++i)
        csv += query_ids[i] + "," + corpus_ids[matches[i].first] + "," +
               format_double(matches[i].second) + "\n";
    emit(csv, out_path);
    return 0;
}

int cmd_metrics_hist(const std::string& corpus_path, const std::string& out_path) {
    const RecipeCorpus corpus = load_corpus(corpus_path);
    std::vector<RecipeRecord> records;
    for (const auto& [id, record] : corpus.records()) records.push_back(record);
    std::string csv = "ingredient,fraction\n";
    for (const auto& [label, fraction] : ingredient_histogram(records))
        csv += label + "," + format_double(fraction) + "\n";
    emit(csv, out_path);
    return 0;
}

int cmd_corpus_stats(const std::string& corpus_path, const std::string& embeddings,
                     const std::string& categories) {
    const RecipeCorpus corpus = load_corpus(
        corpus_path,
        embeddings.empty() ? std::nullopt : std::optional<std::string>(embeddings),
        categories.empty() ? std::nullopt : std::optional<std::string>(categories));
    std::size_t with_tree = 0;
    std::size_t with_embedding = 0;
    for (const auto& [id, record] : corpus.records()) {
        with_tree += record.tree.has_value();
        with_embedding += record.embedding.has_value();
    }
    std::cout << "recipes," << corpus.size() << "\n";
    std::cout << "dishes," << corpus.dishes().size() << "\n";
    std::cout << "with_tree," << with_tree << "\n";
    std::cout << "with_embedding," << with_embedding << "\n";
    if (corpus.embedding_dim())
        std::cout << "embedding_dim," << *corpus.embedding_dim() << "\n";
    for (const auto& dish : corpus.dishes())
        std::cout << "dish," << dish << "," << corpus.lookup(dish).size() << ","
                  << corpus.category_of(dish) << "\n";
    return 0;
}

int cmd_corpus_validate(const std::string& corpus_path, const std::string& embeddings,
                        const std::string& categories) {
    RecipeCorpus corpus;
    try {
        corpus = load_corpus(
            corpus_path,
            embeddings.empty() ? std::nullopt : std::optional<std::string>(embeddings),
            categories.empty() ? std::nullopt : std::optional<std::string>(categories));
    } catch (const std::exception& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return 1;
    }
    std::vector<std::string> problems;
    for (const auto& [id, record] : corpus.records()) {
        if (record.tree) {
            const auto report = validate(*record.tree);
            if (!report.ok())
                problems.push_back("recipe \"" + id + "\" tree: " + report.summary());
        }
        if (record.ingredients.empty())
            problems.push_back("recipe \"" + id + "\" lists no ingredients");
        if (record.instructions.empty())
            problems.push_back("recipe \"" + id + "\" lists no instructions");
    }
    if (problems.empty()) {
        std::cout << "ok: " << corpus.size() << " recipes\n";
        return 0;
    }
    for (const auto& problem : problems) std::cout << problem << "\n";
    return 1;
}

// Set overlap agreement between two trees: nodes compare as (kind, label),
// edges as (child label, parent label).
int cmd_compare_trees(const std::string& a_path, const std::string& b_path) {
    const RecipeTree a = load_tree(a_path);
    const RecipeTree b = load_tree(b_path);

    const auto node_set = [](const RecipeTree& t) {
        std::set<std::pair<NodeKind, std::string>> out;
        for (const auto& [id, node] : t.nodes) out.insert({node.kind, node.label});
        return out;
    };
    const auto edge_set = [](const RecipeTree& t) {
        std::set<std::pair<std::string, std::string>> out;
        for (const auto& [child, parent] : t.parent)
            out.insert({t.node(child).label, t.node(parent).label});
        return out;
    };
    const auto f1_row = [](const std::string& name, const auto& got, const auto& want) {
        std::size_t overlap = 0;
        for (const auto& item : got) overlap += want.count(item);
        const double precision = got.empty() ? 0.0 : double(overlap) / double(got.size());
        const double recall = want.empty() ? 0.0 : double(overlap) / double(want.size());
        const double f1 = (precision + recall) == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        std::cout << name << "," << format_double(precision) << ","
                  << format_double(recall) << "," << format_double(f1) << "\n";
    };
    std::cout << "metric,precision,recall,f1\n";
    f1_row("nodes", node_set(a), node_set(b));
    f1_row("edges", edge_set(a), edge_set(b));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recipe idea blending toolkit"};
    app.require_subcommand(1);

    // run
    std::string config_path;
    auto* run = app.add_subcommand("run", "execute the staged pipeline from a config file");
    run->add_option("--config", config_path, "declarative run settings")->required();

    // treedist
    std::string td_a, td_b, td_costs, td_script;
    bool td_normalized = false;
    auto* treedist_cmd =
        app.add_subcommand("treedist", "minimal edit distance between two recipe trees");
    treedist_cmd->add_option("a", td_a, "first tree (DOT)")->required();
    treedist_cmd->add_option("b", td_b, "second tree (DOT)")->required();
    treedist_cmd->add_option("--costs", td_costs, "cost scheme JSON");
    treedist_cmd->add_option("--script", td_script, "write the edit script here");
    treedist_cmd->add_flag("--normalized", td_normalized,
                           "print the size-normalized distance");

    // blend
    std::string bl_corpus, bl_dish_a, bl_dish_b, bl_out, bl_costs, bl_direction = "a_to_b";
    std::uint64_t bl_seed = 0;
    BlendConstraints bl_constraints;
    double bl_dish_freq_min = 0.5, bl_global_freq_max = 0.05;
    bool bl_no_essentials = false;
    auto* blend_cmd =
        app.add_subcommand("blend", "emit blended intermediates for a dish pair");
    blend_cmd->add_option("--corpus", bl_corpus, "corpus JSONL")->required();
    blend_cmd->add_option("--dish-a", bl_dish_a, "source dish")->required();
    blend_cmd->add_option("--dish-b", bl_dish_b, "target dish")->required();
    blend_cmd->add_option("--seed", bl_seed, "master seed")->required();
    blend_cmd->add_option("--out", bl_out, "output directory")->required();
    blend_cmd->add_option("--costs", bl_costs, "cost scheme JSON");
    blend_cmd->add_option("--min-fraction", bl_constraints.min_fraction_per_source,
                          "per-source material floor");
    blend_cmd->add_option("--intermediates", bl_constraints.intermediates_per_pair,
                          "stop points per tree pair");
    blend_cmd->add_option("--direction", bl_direction, "a_to_b, b_to_a, or both");
    blend_cmd->add_option("--dish-freq-min", bl_dish_freq_min,
                          "essential: minimum within-dish frequency");
    blend_cmd->add_option("--global-freq-max", bl_global_freq_max,
                          "essential: maximum corpus-wide frequency");
    blend_cmd->add_flag("--no-essentials", bl_no_essentials,
                        "skip the essential-ingredient requirement");

    // valuecheck
    std::string vc_tree, vc_molecules, vc_composites, vc_policy = "repair", vc_repaired;
    double vc_threshold = 0.3;
    auto* valuecheck_cmd =
        app.add_subcommand("valuecheck", "flavor-pairing verdict for one tree");
    valuecheck_cmd->add_option("tree", vc_tree, "recipe tree (DOT)")->required();
    valuecheck_cmd->add_option("--molecules", vc_molecules, "ingredient,molecule_id CSV")
        ->required();
    valuecheck_cmd->add_option("--composites", vc_composites, "ingredient,constituent CSV")
        ->required();
    valuecheck_cmd->add_option("--threshold", vc_threshold, "pair score floor");
    valuecheck_cmd->add_option("--policy", vc_policy, "repair or reject");
    valuecheck_cmd->add_option("--repaired-out", vc_repaired,
                               "write the repaired tree here");

    // novelty
    auto* novelty_cmd = app.add_subcommand("novelty", "co-occurrence novelty scoring");
    novelty_cmd->require_subcommand(1);
    std::string nb_corpus, nb_out;
    int nb_min_support = 5;
    auto* novelty_build = novelty_cmd->add_subcommand("build-index",
                                                      "count element co-occurrence");
    novelty_build->add_option("--corpus", nb_corpus, "corpus JSONL")->required();
    novelty_build->add_option("--min-support", nb_min_support, "support floor");
    novelty_build->add_option("--out", nb_out, "index file")->required();
    std::string ns_tree, ns_index;
    auto* novelty_score = novelty_cmd->add_subcommand("score", "score one tree");
    novelty_score->add_option("tree", ns_tree, "recipe tree (DOT)")->required();
    novelty_score->add_option("--index", ns_index, "index file")->required();

    // sample-seeds
    std::string ss_corpus, ss_embeddings, ss_dish, ss_metric = "euclidean";
    std::uint64_t ss_seed = 0;
    std::size_t ss_n_random = 15, ss_n_diverse = 15;
    auto* seeds_cmd =
        app.add_subcommand("sample-seeds", "random plus max-min diverse seed recipes");
    seeds_cmd->add_option("--corpus", ss_corpus, "corpus JSONL")->required();
    seeds_cmd->add_option("--embeddings", ss_embeddings, "embeddings sidecar");
    seeds_cmd->add_option("--dish", ss_dish, "dish name")->required();
    seeds_cmd->add_option("--seed", ss_seed, "rng seed")->required();
    seeds_cmd->add_option("--n-random", ss_n_random, "random half size");
    seeds_cmd->add_option("--n-diverse", ss_n_diverse, "diverse half size");
    seeds_cmd->add_option("--metric", ss_metric, "euclidean or cosine");

    // select anneal
    auto* select_cmd = app.add_subcommand("select", "subset selection");
    select_cmd->require_subcommand(1);
    std::string sa_pool, sa_out;
    AnnealConfig sa_cfg;
    auto* anneal_cmd = select_cmd->add_subcommand(
        "anneal", "simulated annealing under per-dish caps");
    anneal_cmd->add_option("--pool", sa_pool, "scored candidates JSONL")->required();
    anneal_cmd->add_option("--size", sa_cfg.target_size, "selection size")->required();
    anneal_cmd->add_option("--max-per-dish", sa_cfg.max_per_dish,
                           "appearance cap per dish")
        ->required();
    anneal_cmd->add_option("--seed", sa_cfg.rng_seed, "rng seed")->required();
    anneal_cmd->add_option("--t0", sa_cfg.initial_temperature, "initial temperature");
    anneal_cmd->add_option("--cooling", sa_cfg.cooling_rate, "geometric cooling rate");
    anneal_cmd->add_option("--steps", sa_cfg.steps, "annealing steps");
    anneal_cmd->add_option("--out", sa_out, "write the selection JSON here");

    // evaluate
    std::string ev_candidates, ev_index, ev_molecules, ev_composites, ev_policy = "repair";
    std::string ev_corpus, ev_out;
    double ev_threshold = 0.3;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "filter, repair, and rank blended candidates");
    evaluate_cmd->add_option("--candidates", ev_candidates, "candidate directory")
        ->required();
    evaluate_cmd->add_option("--index", ev_index, "novelty index file")->required();
    evaluate_cmd->add_option("--molecules", ev_molecules, "ingredient,molecule_id CSV")
        ->required();
    evaluate_cmd->add_option("--composites", ev_composites, "ingredient,constituent CSV")
        ->required();
    evaluate_cmd->add_option("--threshold", ev_threshold, "pair score floor");
    evaluate_cmd->add_option("--policy", ev_policy, "repair or reject");
    evaluate_cmd->add_option("--corpus", ev_corpus,
                             "corpus JSONL for tie-break frequencies");
    evaluate_cmd->add_option("--out", ev_out, "ranked JSONL destination");

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "diversity and similarity metrics");
    metrics_cmd->require_subcommand(1);
    std::string mb_texts, mb_field = "final_text", mb_out;
    int mb_max_n = 4;
    auto* mb_cmd = metrics_cmd->add_subcommand("self-bleu", "corpus-internal BLEU");
    mb_cmd->add_option("--texts", mb_texts, "JSONL with one text per row")->required();
    mb_cmd->add_option("--field", mb_field, "JSON field holding the text");
    mb_cmd->add_option("--max-n", mb_max_n, "n-gram ceiling");
    mb_cmd->add_option("--out", mb_out, "CSV destination");
    std::string mt_trees, mt_costs, mt_out;
    auto* mt_cmd =
        metrics_cmd->add_subcommand("treedist", "pairwise normalized tree distances");
    mt_cmd->add_option("--trees", mt_trees, "directory of DOT trees")->required();
    mt_cmd->add_option("--costs", mt_costs, "cost scheme JSON");
    mt_cmd->add_option("--out", mt_out, "CSV destination");
    std::string mc_embeddings, mc_out;
    auto* mc_cmd =
        metrics_cmd->add_subcommand("cosine", "pairwise embedding similarity");
    mc_cmd->add_option("--embeddings", mc_embeddings, "embedding JSONL")->required();
    mc_cmd->add_option("--out", mc_out, "CSV destination");
    std::string mn_queries, mn_corpus, mn_out;
    auto* mn_cmd =
        metrics_cmd->add_subcommand("nncorpus", "nearest corpus neighbor per query");
    mn_cmd->add_option("--queries", mn_queries, "query embedding JSONL")->required();
    mn_cmd->add_option("--corpus", mn_corpus, "corpus embedding JSONL")->required();
    mn_cmd->add_option("--out", mn_out, "CSV destination");
    std::string mh_corpus, mh_out;
    auto* mh_cmd =
        metrics_cmd->add_subcommand("hist", "ingredient usage fractions");
    mh_cmd->add_option("--corpus", mh_corpus, "corpus JSONL")->required();
    mh_cmd->add_option("--out", mh_out, "CSV destination");

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "inspect a recipe corpus");
    corpus_cmd->require_subcommand(1);
    std::string cs_corpus, cs_embeddings, cs_categories;
    auto* stats_cmd = corpus_cmd->add_subcommand("stats", "size and coverage counts");
    stats_cmd->add_option("--corpus", cs_corpus, "corpus JSONL")->required();
    stats_cmd->add_option("--embeddings", cs_embeddings, "embeddings sidecar");
    stats_cmd->add_option("--categories", cs_categories, "category file");
    std::string cv_corpus, cv_embeddings, cv_categories;
    auto* validate_cmd = corpus_cmd->add_subcommand("validate", "structural checks");
    validate_cmd->add_option("--corpus", cv_corpus, "corpus JSONL")->required();
    validate_cmd->add_option("--embeddings", cv_embeddings, "embeddings sidecar");
    validate_cmd->add_option("--categories", cv_categories, "category file");

    // compare-trees
    std::string ct_a, ct_b;
    auto* compare_cmd =
        app.add_subcommand("compare-trees", "node and edge overlap of two trees");
    compare_cmd->add_option("a", ct_a, "first tree (DOT)")->required();
    compare_cmd->add_option("b", ct_b, "reference tree (DOT)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path);
        if (*treedist_cmd)
            return cmd_treedist(td_a, td_b, td_costs, td_script, td_normalized);
        if (*blend_cmd) {
            if (bl_direction == "a_to_b")
                bl_constraints.direction = BlendDirection::a_to_b;
            else if (bl_direction == "b_to_a")
                bl_constraints.direction = BlendDirection::b_to_a;
            else if (bl_direction == "both")
                bl_constraints.direction = BlendDirection::both;
            else
                throw std::runtime_error("direction must be a_to_b, b_to_a, or both");
            return cmd_blend(bl_corpus, bl_dish_a, bl_dish_b, bl_seed, bl_out,
                             bl_constraints, bl_costs, bl_dish_freq_min,
                             bl_global_freq_max, bl_no_essentials);
        }
        if (*valuecheck_cmd)
            return cmd_valuecheck(vc_tree, vc_molecules, vc_composites, vc_threshold,
                                  vc_policy, vc_repaired);
        if (*novelty_build) return cmd_novelty_build(nb_corpus, nb_min_support, nb_out);
        if (*novelty_score) return cmd_novelty_score(ns_tree, ns_index);
        if (*seeds_cmd)
            return cmd_sample_seeds(ss_corpus, ss_embeddings, ss_dish, ss_seed,
                                    ss_n_random, ss_n_diverse, ss_metric);
        if (*anneal_cmd) return cmd_select(sa_pool, sa_cfg, sa_out);
        if (*evaluate_cmd)
            return cmd_evaluate(ev_candidates, ev_index, ev_molecules, ev_composites,
                                ev_threshold, ev_policy, ev_corpus, ev_out);
        if (*mb_cmd) return cmd_metrics_self_bleu(mb_texts, mb_field, mb_max_n, mb_out);
        if (*mt_cmd) return cmd_metrics_treedist(mt_trees, mt_costs, mt_out);
        if (*mc_cmd) return cmd_metrics_cosine(mc_embeddings, mc_out);
        if (*mn_cmd) return cmd_metrics_nncorpus(mn_queries, mn_corpus, mn_out);
        if (*mh_cmd) return cmd_metrics_hist(mh_corpus, mh_out);
        if (*stats_cmd) return cmd_corpus_stats(cs_corpus, cs_embeddings, cs_categories);
        if (*validate_cmd)
            return cmd_corpus_validate(cv_corpus, cv_embeddings, cv_categories);
        if (*compare_cmd) return cmd_compare_trees(ct_a, ct_b);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
