#include "treeblend/pipeline.hpp"

#include <functional>
#include <iostream>
#include <set>

#include "json.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/evaluate.hpp"
#include "treeblend/novelty.hpp"
#include "treeblend/pairing.hpp"
#include "treeblend/recombine.hpp"
#include "treeblend/sampling.hpp"
#include "treeblend/select.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Settings {
    std::string corpus_file;
    std::optional<std::string> embeddings_file;
    std::optional<std::string> categories_file;
    std::optional<std::string> hierarchy_file;

    std::string molecules_file;
    std::string composites_file;
    double threshold = 0.3;
    ValuePolicy policy = ValuePolicy::repair;

    int min_support = 5;
    std::optional<std::string> index_file;

    std::vector<std::pair<std::string, std::string>> dish_pairs;  // explicit
    long long pair_count = 0;                                     // sampled when > 0
    bool cross_category_only = true;

    std::size_t n_random = 15;
    std::size_t n_diverse = 15;
    DistanceMetric metric = DistanceMetric::euclidean;

    BlendConstraints blend;
    std::optional<std::string> costs_file;
    double dish_freq_min = 0.5;
    double global_freq_max = 0.05;

    std::size_t top_k = 5;
    AnnealConfig anneal;

    BridgeConfig bridge;

    std::uint64_t seed = 0;
    fs::path out_dir;
};

std::optional<std::string> optional_path(const Config& config, const std::string& section,
                                         const std::string& key) {
    if (!config.has(section, key)) return std::nullopt;
    return config.resolve_path(config.get_string(section, key));
}

Settings read_settings(const Config& config) {
    Settings s;
    s.corpus_file = config.resolve_path(config.get_string("corpus", "file"));
    s.embeddings_file = optional_path(config, "corpus", "embeddings");
    s.categories_file = optional_path(config, "corpus", "categories");
    s.hierarchy_file = optional_path(config, "corpus", "hierarchy");

    s.molecules_file = config.resolve_path(config.get_string("pairing", "molecules"));
    s.composites_file = config.resolve_path(config.get_string("pairing", "composites"));
    s.threshold = config.get_real_or("pairing", "threshold", 0.3);
    const std::string policy = config.get_string_or("pairing", "policy", "repair");
    if (policy == "repair")
        s.policy = ValuePolicy::repair;
    else if (policy == "reject")
        s.policy = ValuePolicy::reject;
    else
        throw ConfigError("[pairing] policy must be \"repair\" or \"reject\"");

    s.min_support = static_cast<int>(config.get_int_or("novelty", "min_support", 5));
    s.index_file = optional_path(config, "novelty", "index");

    if (config.has("pairs", "dishes"))
        s.dish_pairs = config.get_pair_array("pairs", "dishes");
    if (config.has("pairs", "count")) s.pair_count = config.get_int("pairs", "count");
    if (s.dish_pairs.empty() && s.pair_count <= 0)
        throw ConfigError("[pairs] needs either dishes = [[a, b], ...] or count = N");
    s.cross_category_only = config.get_bool_or("pairs", "cross_category_only", true);

    s.n_random = static_cast<std::size_t>(config.get_int_or("seeds", "n_random", 15));
    s.n_diverse = static_cast<std::size_t>(config.get_int_or("seeds", "n_diverse", 15));
    const std::string metric = config.get_string_or("seeds", "metric", "euclidean");
    if (metric == "euclidean")
        s.metric = DistanceMetric::euclidean;
    else if (metric == "cosine")
        s.metric = DistanceMetric::cosine;
    else
        throw ConfigError("[seeds] metric must be \"euclidean\" or \"cosine\"");

    s.blend.min_fraction_per_source = config.get_real_or("blend", "min_fraction", 0.30);
    s.blend.require_essential_from_both =
        config.get_bool_or("blend", "require_essential", true);
    s.blend.intermediates_per_pair =
        static_cast<int>(config.get_int_or("blend", "intermediates_per_pair", 6));
    const std::string direction = config.get_string_or("blend", "direction", "a_to_b");
    if (direction == "a_to_b")
        s.blend.direction = BlendDirection::a_to_b;
    else if (direction == "b_to_a")
        s.blend.direction = BlendDirection::b_to_a;
    else if (direction == "both")
        s.blend.direction = BlendDirection::both;
    else
        throw ConfigError("[blend] direction must be a_to_b, b_to_a, or both");
    s.costs_file = optional_path(config, "blend", "costs");
    s.dish_freq_min = config.get_real_or("blend", "dish_freq_min", 0.5);
    s.global_freq_max = config.get_real_or("blend", "global_freq_max", 0.05);

    s.top_k = static_cast<std::size_t>(config.get_int_or("select", "top_k", 5));
    s.anneal.target_size =
        static_cast<std::size_t>(config.get_int_or("select", "target_size", 100));
    // deliberately has no fallback; the cap shapes results too much to guess
    s.anneal.max_per_dish =
        static_cast<std::size_t>(config.get_int("select", "max_per_dish"));
    s.anneal.initial_temperature =
        config.get_real_or("select", "initial_temperature", 1.0);
    s.anneal.cooling_rate = config.get_real_or("select", "cooling_rate", 0.995);
    s.anneal.steps = static_cast<std::size_t>(config.get_int_or("select", "steps", 50000));

    const std::string mode = config.get_string_or("bridge", "mode", "replay");
    if (mode == "live")
        s.bridge.mode = BridgeMode::live;
    else if (mode == "record")
        s.bridge.mode = BridgeMode::record;
    else if (mode == "replay")
        s.bridge.mode = BridgeMode::replay;
    else
        throw ConfigError("[bridge] mode must be live, record, or replay");
    s.bridge.endpoint = config.get_string_or("bridge", "endpoint", "");
    s.bridge.model = config.get_string_or("bridge", "model", s.bridge.model);
    s.bridge.temperature = config.get_real_or("bridge", "temperature", s.bridge.temperature);
    if (config.has("bridge", "fixture_dir"))
        s.bridge.fixture_dir = config.resolve_path(config.get_string("bridge", "fixture_dir"));
    s.bridge.max_correction_rounds = static_cast<int>(
        config.get_int_or("bridge", "max_correction_rounds", s.bridge.max_correction_rounds));
    s.bridge.max_in_flight = static_cast<int>(
        config.get_int_or("bridge", "max_in_flight", s.bridge.max_in_flight));

    s.seed = static_cast<std::uint64_t>(config.get_int("run", "seed"));
    s.out_dir = config.resolve_path(config.get_string("run", "out_dir"));
    return s;
}

std::string slug(const std::string& name) {
    std::string out;
    for (char c : to_lower(name))
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

bool stage_done(const fs::path& out_dir, const std::string& stage) {
    return fs::exists(out_dir / (stage + ".done"));
}

json read_marker(const fs::path& out_dir, const std::string& stage) {
    return json::parse(read_file((out_dir / (stage + ".done")).string()));
}

void write_marker(const fs::path& out_dir, const std::string& stage, const ordered_json& body) {
    write_file((out_dir / (stage + ".done")).string(), body.dump() + "\n");
}

void note_stage(PipelineSummary& summary, const std::string& stage, bool skipped) {
    (skipped ? summary.stages_skipped : summary.stages_run).push_back(stage);
    std::cerr << "[pipeline] " << stage << (skipped ? " (cached)" : "") << "\n";
}

[[noreturn]] void stage_fail(const std::string& stage, const std::exception& e) {
    throw StageError(stage, e.what());
}

// Everything the stages pass between each other.
struct RunState {
    RecipeCorpus corpus;
    ActionHierarchy hierarchy;
    PairingTable table;
    CostScheme costs;
    std::optional<LlmBridge> bridge;

    std::vector<std::pair<std::string, std::string>> pairs;
    std::map<std::string, std::vector<std::string>> seeds_by_dish;
    std::map<std::string, RecipeTree> trees;  // recipe id -> tree
    std::vector<BlendCandidate> candidates;
    std::map<std::string, std::pair<std::string, std::string>> candidate_dishes;

    struct RankedEntry {
        std::string id;
        std::string dish_a;
        std::string dish_b;
        double novelty = 0.0;
        double source_fraction = 0.0;
        double target_fraction = 0.0;
        RecipeTree tree;
    };
    std::vector<RankedEntry> ranked;
    std::vector<std::string> selected_ids;
};

void run_pairs_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "pairs";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        const json marker = read_marker(s.out_dir, stage);
        for (const auto& p : marker.at("pairs"))
            state.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        return;
    }
    note_stage(summary, stage, false);
    try {
        if (!s.dish_pairs.empty()) {
            for (const auto& [a, b] : s.dish_pairs) {
                if (state.corpus.lookup(a).empty())
                    throw std::runtime_error("dish \"" + a + "\" has no recipes in the corpus");
                if (state.corpus.lookup(b).empty())
                    throw std::runtime_error("dish \"" + b + "\" has no recipes in the corpus");
                if (to_lower(a) == to_lower(b))
                    throw std::runtime_error("pair (" + a + ", " + b +
                                             ") blends a dish with itself");
                if (s.cross_category_only &&
                    state.corpus.category_of(a) == state.corpus.category_of(b))
                    throw std::runtime_error(
                        "pairs must cross categories, but \"" + a + "\" and \"" + b +
                        "\" share category \"" + state.corpus.category_of(a) + "\"");
                state.pairs.emplace_back(a, b);
            }
        } else {
            std::vector<std::pair<std::string, std::string>> eligible;
            const auto dishes = state.corpus.dishes();
            for (std::size_t i = 0; i < dishes.size(); ++i)
                for (std::size_t j = i + 1; j < dishes.size(); ++j) {
                    if (s.cross_category_only && state.corpus.category_of(dishes[i]) ==
                                                     state.corpus.category_of(dishes[j]))
                        continue;
                    eligible.emplace_back(dishes[i], dishes[j]);
                }
            if (static_cast<long long>(eligible.size()) < s.pair_count)
                throw std::runtime_error("only " + std::to_string(eligible.size()) +
                                         " eligible dish pairs exist; " +
                                         std::to_string(s.pair_count) + " requested");
            Rng rng(derive_seed(s.seed, stage, 0));
            fisher_yates_shuffle(eligible, rng);
            eligible.resize(static_cast<std::size_t>(s.pair_count));
            state.pairs = std::move(eligible);
        }
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    ordered_json marker;
    marker["pairs"] = json::array();
    for (const auto& [a, b] : state.pairs) marker["pairs"].push_back({a, b});
    write_marker(s.out_dir, stage, marker);
}

void run_seeds_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "seeds";
    std::set<std::string> dish_set;
    for (const auto& [a, b] : state.pairs) {
        dish_set.insert(a);
        dish_set.insert(b);
    }
    const std::vector<std::string> dishes(dish_set.begin(), dish_set.end());

    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        const json marker = read_marker(s.out_dir, stage);
        for (const auto& file : marker.at("files")) {
            const auto body = json::parse(read_file((s.out_dir / file.get<std::string>()).string()));
            state.seeds_by_dish[body.at("dish").get<std::string>()] =
                body.at("recipe_ids").get<std::vector<std::string>>();
        }
        return;
    }
    note_stage(summary, stage, false);
    fs::create_directories(s.out_dir / "seeds");
    std::vector<std::string> files;
    try {
        for (std::size_t d = 0; d < dishes.size(); ++d) {
            const auto pool = state.corpus.lookup(dishes[d]);
            const auto ids = sample_seeds(pool, s.n_random, s.n_diverse,
                                          derive_seed(s.seed, stage, d), s.metric);
            state.seeds_by_dish[dishes[d]] = ids;
            ordered_json body;
            body["dish"] = dishes[d];
            body["recipe_ids"] = ids;
            const std::string file = "seeds/" + slug(dishes[d]) + ".json";
            write_file((s.out_dir / file).string(), body.dump(2) + "\n");
            files.push_back(file);
        }
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    ordered_json marker;
    marker["files"] = files;
    write_marker(s.out_dir, stage, marker);
}

void run_trees_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "trees";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        const auto marker = read_marker(s.out_dir, stage);
        for (const auto& warning : marker.value("warnings", std::vector<std::string>{}))
            summary.warnings.push_back(warning);
        for (const auto& file : marker.at("files")) {
            const fs::path path = s.out_dir / file.get<std::string>();
            auto result = parse_dot(read_file(path.string()), state.hierarchy);
            if (!result.ok())
                stage_fail(stage, std::runtime_error("cached tree " + path.string() +
                                                     " no longer validates"));
            const std::string id = path.stem().string();
            result.tree->source_recipe_id = id;
            state.trees.emplace(id, std::move(*result.tree));
        }
        summary.tree_count = state.trees.size();
        return;
    }
    note_stage(summary, stage, false);
    fs::create_directories(s.out_dir / "trees");
    std::set<std::string> seed_ids;
    for (const auto& [dish, ids] : state.seeds_by_dish) seed_ids.insert(ids.begin(), ids.end());
    std::vector<std::string> files;
    std::vector<std::string> stage_warnings;
    try {
        for (const auto& id : seed_ids) {
            const RecipeRecord& record = state.corpus.record(id);
            RecipeTree tree;
            if (record.tree) {
                tree = *record.tree;
            } else {
                try {
                    tree = text_to_tree(record, *state.bridge, state.hierarchy);
                } catch (const TreeParseFailed&) {
                    stage_warnings.push_back("recipe \"" + id +
                                             "\" failed tree parsing; skipped");
                    continue;
                }
            }
            tree.source_recipe_id = id;
            const std::string file = "trees/" + id + ".dot";
            write_file((s.out_dir / file).string(), serialize_dot(tree));
            state.trees.emplace(id, std::move(tree));
            files.push_back(file);
        }
        for (const auto& [dish, ids] : state.seeds_by_dish) {
            const bool any = std::any_of(ids.begin(), ids.end(), [&](const std::string& id) {
                return state.trees.count(id) != 0;
            });
            if (!any)
                throw std::runtime_error("no seed of dish \"" + dish +
                                         "\" produced a valid tree");
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    summary.tree_count = state.trees.size();
    for (const auto& warning : stage_warnings) summary.warnings.push_back(warning);
    ordered_json marker;
    marker["files"] = files;
    marker["warnings"] = stage_warnings;
    write_marker(s.out_dir, stage, marker);
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

void run_candidates_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "candidates";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        const auto marker = read_marker(s.out_dir, stage);
        for (const auto& warning : marker.value("warnings", std::vector<std::string>{}))
            summary.warnings.push_back(warning);
        for (const auto& file : marker.at("files")) {
            const auto meta = json::parse(read_file((s.out_dir / file.get<std::string>()).string()));
            BlendCandidate c;
            c.id = meta.at("id").get<std::string>();
            c.source_pair = {meta.at("source_pair").at(0).get<std::string>(),
                             meta.at("source_pair").at(1).get<std::string>()};
            c.applied_ops = meta.at("applied_ops").get<int>();
            c.fraction_from_source = meta.at("fraction_from_source").get<double>();
            c.fraction_from_target = meta.at("fraction_from_target").get<double>();
            auto parsed = parse_dot(
                read_file((s.out_dir / meta.at("dot_file").get<std::string>()).string()),
                state.hierarchy);
            if (!parsed.ok())
                stage_fail(stage, std::runtime_error("cached candidate " + c.id +
                                                     " no longer validates"));
            c.tree = std::move(*parsed.tree);
            state.candidate_dishes[c.id] = {meta.at("dish_a").get<std::string>(),
                                            meta.at("dish_b").get<std::string>()};
            state.candidates.push_back(std::move(c));
        }
        summary.candidate_count = state.candidates.size();
        return;
    }
    note_stage(summary, stage, false);
    const auto essentials =
        build_essential_index(state.corpus, s.dish_freq_min, s.global_freq_max);
    for (const auto& warning : essentials.warnings) summary.warnings.push_back(warning);

    std::vector<std::string> files;
    const std::vector<std::string>& stage_warnings = essentials.warnings;
    std::uint64_t counter = 0;
    try {
        for (const auto& [dish_a, dish_b] : state.pairs) {
            const std::string pair_dir = "candidates/" + slug(dish_a) + "__" + slug(dish_b);
            fs::create_directories(s.out_dir / pair_dir);
            for (const auto& id_a : state.seeds_by_dish.at(dish_a)) {
                if (!state.trees.count(id_a)) continue;
                for (const auto& id_b : state.seeds_by_dish.at(dish_b)) {
                    if (!state.trees.count(id_b)) continue;
                    const auto batch = intermediates(
                        state.trees.at(id_a), state.trees.at(id_b), s.blend, state.costs,
                        derive_seed(s.seed, stage, counter++), &essentials, dish_a, dish_b);
                    for (const auto& c : batch) {
                        const std::string dot_file = pair_dir + "/" + c.id + ".dot";
                        const std::string meta_file = pair_dir + "/" + c.id + ".json";
                        write_file((s.out_dir / dot_file).string(), serialize_dot(c.tree));
                        write_file(
                            (s.out_dir / meta_file).string(),
                            candidate_metadata(c, dish_a, dish_b, dot_file).dump(2) + "\n");
                        state.candidate_dishes[c.id] = {dish_a, dish_b};
                        state.candidates.push_back(c);
                        files.push_back(meta_file);
                    }
                }
            }
        }
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    summary.candidate_count = state.candidates.size();
    ordered_json marker;
    marker["files"] = files;
    marker["warnings"] = stage_warnings;
    write_marker(s.out_dir, stage, marker);
}

void run_ranked_stage(const Settings& s, RunState& state, PipelineSummary& summary,
                      const NoveltyIndex& index,
                      const std::map<std::string, int>& corpus_frequency) {
    const std::string stage = "ranked";
    const fs::path ranked_path = s.out_dir / "ranked.jsonl";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        for (const auto& line : split(read_file(ranked_path.string()), '\n')) {
            if (trim(line).empty()) continue;
            const auto row = json::parse(line);
            RunState::RankedEntry entry;
            entry.id = row.at("id").get<std::string>();
            entry.dish_a = row.at("dish_a").get<std::string>();
            entry.dish_b = row.at("dish_b").get<std::string>();
            entry.novelty = row.at("novelty").get<double>();
            entry.source_fraction = row.at("fraction_from_source").get<double>();
            entry.target_fraction = row.at("fraction_from_target").get<double>();
            entry.tree = tree_from_json(row.at("tree").dump());
            state.ranked.push_back(std::move(entry));
        }
        summary.ranked_count = state.ranked.size();
        return;
    }
    note_stage(summary, stage, false);
    try {
        const auto evaluated =
            evaluate(state.candidates, state.table, index, s.threshold, s.policy,
                     &corpus_frequency);
        std::string lines;
        for (const auto& item : evaluated) {
            const auto& dishes = state.candidate_dishes.at(item.candidate.id);
            ordered_json row;
            row["id"] = item.candidate.id;
            row["dish_a"] = dishes.first;
            row["dish_b"] = dishes.second;
            row["source_pair"] = {item.candidate.source_pair.first,
                                  item.candidate.source_pair.second};
            row["novelty"] = item.novelty;
            row["fraction_from_source"] = item.candidate.fraction_from_source;
            row["fraction_from_target"] = item.candidate.fraction_from_target;
            row["kept"] = std::vector<std::string>(item.verdict.kept.begin(),
                                                   item.verdict.kept.end());
            row["removed"] = json::array();
            for (const auto& [label, clashes] : item.verdict.removed)
                row["removed"].push_back({label, clashes});
            row["min_pair_score_after"] = item.verdict.min_pair_score_after;
            row["unknown"] = std::vector<std::string>(item.verdict.unknown.begin(),
                                                      item.verdict.unknown.end());
            row["tree"] = json::parse(tree_to_json(item.candidate.tree));
            lines += row.dump() + "\n";

            RunState::RankedEntry entry;
            entry.id = item.candidate.id;
            entry.dish_a = dishes.first;
            entry.dish_b = dishes.second;
            entry.novelty = item.novelty;
            entry.source_fraction = item.candidate.fraction_from_source;
            entry.target_fraction = item.candidate.fraction_from_target;
            entry.tree = item.candidate.tree;
            state.ranked.push_back(std::move(entry));
        }
        write_file(ranked_path.string(), lines);
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    summary.ranked_count = state.ranked.size();
    ordered_json marker;
    marker["count"] = state.ranked.size();
    write_marker(s.out_dir, stage, marker);
}

void run_selected_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "selected";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        const auto body =
            json::parse(read_file((s.out_dir / "selected" / "selected.json").string()));
        state.selected_ids = body.at("ids").get<std::vector<std::string>>();
        summary.selected_count = state.selected_ids.size();
        return;
    }
    note_stage(summary, stage, false);
    try {
        std::vector<ScoredCandidate> scored;
        for (const auto& entry : state.ranked) {
            ScoredCandidate c;
            c.id = entry.id;
            c.dish_a = entry.dish_a;
            c.dish_b = entry.dish_b;
            c.novelty = entry.novelty;
            c.source_fraction = entry.source_fraction;
            c.target_fraction = entry.target_fraction;
            scored.push_back(std::move(c));
        }
        std::vector<ScoredCandidate> pool;
        for (const auto& [pair, group] : top_k_per_pair(scored, s.top_k))
            pool.insert(pool.end(), group.begin(), group.end());

        AnnealConfig cfg = s.anneal;
        cfg.target_size = std::min(cfg.target_size, pool.size());
        cfg.rng_seed = derive_seed(s.seed, stage, 0);
        const AnnealResult result = anneal_select(pool, cfg);
        state.selected_ids = result.selected_ids;

        fs::create_directories(s.out_dir / "selected");
        std::map<std::string, const RecipeTree*> by_id;
        for (const auto& entry : state.ranked) by_id[entry.id] = &entry.tree;
        for (const auto& id : state.selected_ids)
            write_file((s.out_dir / "selected" / (id + ".dot")).string(),
                       serialize_dot(*by_id.at(id)));
        ordered_json body;
        body["ids"] = state.selected_ids;
        body["objective"] = result.objective;
        body["greedy_objective"] = result.greedy_objective;
        write_file((s.out_dir / "selected" / "selected.json").string(), body.dump(2) + "\n");
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    summary.selected_count = state.selected_ids.size();
    write_marker(s.out_dir, stage, ordered_json{{"count", state.selected_ids.size()}});
}

void run_recipes_stage(const Settings& s, RunState& state, PipelineSummary& summary) {
    const std::string stage = "recipes";
    if (stage_done(s.out_dir, stage)) {
        note_stage(summary, stage, true);
        summary.recipe_count = read_marker(s.out_dir, stage).at("count").get<std::size_t>();
        return;
    }
    note_stage(summary, stage, false);
    fs::create_directories(s.out_dir / "recipes");
    std::map<std::string, const RecipeTree*> by_id;
    for (const auto& entry : state.ranked) by_id[entry.id] = &entry.tree;
    std::size_t written = 0;
    try {
        for (const auto& id : state.selected_ids) {
            const RenderedRecipe rendered = tree_to_text(*by_id.at(id), *state.bridge);
            ordered_json body;
            body["id"] = id;
            body["final_text"] = rendered.final_text;
            body["summary"] = rendered.summary;
            body["review"] = rendered.review;
            write_file((s.out_dir / "recipes" / (id + ".json")).string(),
                       body.dump(2) + "\n");
            ++written;
        }
    } catch (const std::exception& e) {
        stage_fail(stage, e);
    }
    summary.recipe_count = written;
    write_marker(s.out_dir, stage, ordered_json{{"count", written}});
}

ordered_json config_echo(const Config& config) {
    ordered_json echo;
    for (const auto& [section, keys] : config.sections()) {
        ordered_json block;
        for (const auto& [key, value] : keys) {
            std::function<ordered_json(const ConfigValue&)> to_json =
                [&](const ConfigValue& v) -> ordered_json {
                switch (v.kind) {
                    case ConfigValue::Kind::string: return v.str;
                    case ConfigValue::Kind::integer: return v.integer;
                    case ConfigValue::Kind::real: return v.real;
                    case ConfigValue::Kind::boolean: return v.boolean;
                    case ConfigValue::Kind::array: {
                        ordered_json arr = ordered_json::array();
                        for (const auto& item : v.items) arr.push_back(to_json(item));
                        return arr;
                    }
                }
                return nullptr;
            };
            block[key] = to_json(value);
        }
        echo[section] = block;
    }
    return echo;
}

}  // namespace

PipelineSummary run_pipeline(const Config& config, std::shared_ptr<Transport> transport) {
    const Settings s = read_settings(config);
    PipelineSummary summary;
    summary.out_dir = s.out_dir;
    fs::create_directories(s.out_dir);

    RunState state;
    try {
        state.corpus = load_corpus(s.corpus_file, s.embeddings_file, s.categories_file);
        state.hierarchy = s.hierarchy_file ? ActionHierarchy::from_json_file(*s.hierarchy_file)
                                           : ActionHierarchy::builtin();
        state.table = PairingTable::from_csv_files(s.molecules_file, s.composites_file);
        state.costs = s.costs_file ? CostScheme::from_json_file(*s.costs_file) : CostScheme{};
        state.bridge.emplace(s.bridge, transport);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    run_pairs_stage(s, state, summary);
    run_seeds_stage(s, state, summary);
    run_trees_stage(s, state, summary);

    // corpus statistics from here on include the trees this run parsed
    {
        RecipeCorpus augmented;
        for (const auto& [id, record] : state.corpus.records()) {
            RecipeRecord copy = record;
            if (!copy.tree && state.trees.count(id)) copy.tree = state.trees.at(id);
            augmented.add(std::move(copy));
        }
        for (const auto& dish : state.corpus.dishes())
            augmented.set_category(dish, state.corpus.category_of(dish));
        state.corpus = std::move(augmented);
    }

    run_candidates_stage(s, state, summary);

    NoveltyIndex index;
    std::map<std::string, int> corpus_frequency;
    try {
        index = s.index_file ? load_index(*s.index_file)
                             : build_index(state.corpus, s.min_support);
        for (const auto& warning : index.warnings) summary.warnings.push_back(warning);
        for (const auto& [id, record] : state.corpus.records()) {
            if (!record.tree) continue;
            for (const auto& label : element_set(*record.tree).ingredients)
                ++corpus_frequency[label];
        }
    } catch (const std::exception& e) {
        throw StageError("ranked", e.what());
    }

    run_ranked_stage(s, state, summary, index, corpus_frequency);
    run_selected_stage(s, state, summary);
    run_recipes_stage(s, state, summary);

    ordered_json manifest;
    manifest["config"] = config_echo(config);
    manifest["seed_rule"] =
        "stage seeds come from splitmix64(master ^ fnv1a64(stage) ^ splitmix64(index))";
    manifest["pairs"] = json::array();
    for (const auto& [a, b] : state.pairs) manifest["pairs"].push_back({a, b});
    manifest["seeds"] = ordered_json::object();
    for (const auto& [dish, ids] : state.seeds_by_dish) manifest["seeds"][dish] = ids;
    manifest["counts"] = {{"trees", summary.tree_count},
                          {"candidates", summary.candidate_count},
                          {"ranked", summary.ranked_count},
                          {"selected", summary.selected_count},
                          {"recipes", summary.recipe_count}};
    manifest["warnings"] = summary.warnings;
    write_file((s.out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return summary;
}

PipelineSummary run_pipeline_file(const std::string& config_path,
                                  std::shared_ptr<Transport> transport) {
    return run_pipeline(load_config(config_path), transport);
}

}  // namespace treeblend
