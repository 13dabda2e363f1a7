#include "treeblend/corpus.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

void RecipeCorpus::add(RecipeRecord record) {
    if (record.recipe_id.empty()) throw CorpusError("recipe_id must be nonempty");
    if (record.dish.empty())
        throw CorpusError("recipe \"" + record.recipe_id + "\": dish must be nonempty");
    if (records_.count(record.recipe_id))
        throw CorpusError("duplicate recipe_id \"" + record.recipe_id + "\"");
    if (record.embedding) {
        if (embedding_dim_ && record.embedding->size() != *embedding_dim_)
            throw CorpusError("recipe \"" + record.recipe_id + "\": embedding length " +
                              std::to_string(record.embedding->size()) + " != corpus length " +
                              std::to_string(*embedding_dim_));
        embedding_dim_ = record.embedding->size();
    }
    const std::string folded = to_lower(record.dish);
    auto& entry = dish_index_[folded];
    if (entry.first.empty()) entry.first = record.dish;
    entry.second.push_back(record.recipe_id);
    records_[record.recipe_id] = std::move(record);
}

void RecipeCorpus::set_category(const std::string& dish, const std::string& category) {
    categories_[to_lower(dish)] = category;
}

const RecipeRecord& RecipeCorpus::record(const std::string& recipe_id) const {
    auto it = records_.find(recipe_id);
    if (it == records_.end()) throw CorpusError("unknown recipe_id \"" + recipe_id + "\"");
    return it->second;
}

std::vector<const RecipeRecord*> RecipeCorpus::lookup(const std::string& dish_description) const {
    std::vector<const RecipeRecord*> out;
    auto it = dish_index_.find(to_lower(dish_description));
    if (it == dish_index_.end()) return out;
    for (const auto& id : it->second.second) out.push_back(&records_.at(id));
    return out;
}

std::vector<std::string> RecipeCorpus::dishes() const {
    std::vector<std::string> out;
    for (const auto& [folded, entry] : dish_index_) out.push_back(entry.first);
    return out;
}

std::string RecipeCorpus::category_of(const std::string& dish) const {
    auto it = categories_.find(to_lower(dish));
    return it == categories_.end() ? std::string("uncategorized") : it->second;
}

std::string record_to_json_line(const RecipeRecord& record) {
    using json = nlohmann::ordered_json;
    json j;
    j["recipe_id"] = record.recipe_id;
    j["dish"] = record.dish;
    j["title"] = record.title;
    j["ingredients"] = record.ingredients;
    j["instructions"] = record.instructions;
    if (record.tree) j["tree"] = json::parse(tree_to_json(*record.tree));
    if (record.embedding) j["embedding"] = *record.embedding;
    return j.dump();
}

RecipeRecord record_from_json_line(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    RecipeRecord r;
    r.recipe_id = j.at("recipe_id").get<std::string>();
    r.dish = j.at("dish").get<std::string>();
    r.title = j.value("title", r.dish);
    if (j.contains("ingredients")) r.ingredients = j["ingredients"].get<std::vector<std::string>>();
    if (j.contains("instructions")) r.instructions = j["instructions"].get<std::vector<std::string>>();
    if (j.contains("tree") && !j["tree"].is_null()) r.tree = tree_from_json(j["tree"].dump());
    if (j.contains("embedding") && !j["embedding"].is_null())
        r.embedding = j["embedding"].get<std::vector<double>>();
    return r;
}

namespace {

// Runs fn over every nonblank line, rethrowing any parse failure as a
// CorpusError carrying the 1-based line number.
template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            fn(line);
        } catch (const std::exception& e) {
            throw CorpusError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace

RecipeCorpus load_corpus(const std::string& path, const std::optional<std::string>& embeddings_path,
                         const std::optional<std::string>& categories_path) {
    RecipeCorpus corpus;
    for_each_jsonl_line(path, [&](const std::string& line) { corpus.add(record_from_json_line(line)); });

    if (embeddings_path) {
        std::map<std::string, std::vector<double>> sidecar;
        for_each_jsonl_line(*embeddings_path, [&](const std::string& line) {
            auto j = nlohmann::json::parse(line);
            sidecar[j.at("recipe_id").get<std::string>()] =
                j.at("embedding").get<std::vector<double>>();
        });
        // Rebuild so the add() path re-checks embedding-length consistency.
        RecipeCorpus merged;
        for (const auto& [id, rec] : corpus.records()) {
            RecipeRecord copy = rec;
            auto it = sidecar.find(id);
            if (it != sidecar.end()) copy.embedding = it->second;
            merged.add(std::move(copy));
        }
        corpus = std::move(merged);
    }

    if (categories_path) {
        for_each_jsonl_line(*categories_path, [&](const std::string& line) {
            auto j = nlohmann::json::parse(line);
            corpus.set_category(j.at("dish").get<std::string>(), j.at("category").get<std::string>());
        });
    }
    return corpus;
}

void save_corpus(const RecipeCorpus& corpus, const std::string& path) {
    std::ostringstream out;
    for (const auto& [id, rec] : corpus.records()) out << record_to_json_line(rec) << "\n";
    write_file(path, out.str());
}

}  // namespace treeblend
