#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeblend/tree.hpp"

namespace treeblend {

struct RecipeRecord {
    std::string recipe_id;
    std::string dish;
    std::string title;
    std::vector<std::string> ingredients;
    std::vector<std::string> instructions;
    std::optional<RecipeTree> tree;
    std::optional<std::vector<double>> embedding;
};

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable after load. The dish index and category map are built once;
// concurrent readers need no synchronization.
class RecipeCorpus {
public:
    RecipeCorpus() = default;

    // Throws CorpusError on a duplicate recipe_id or empty dish name.
    void add(RecipeRecord record);
    void set_category(const std::string& dish, const std::string& category);

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    bool has(const std::string& recipe_id) const { return records_.count(recipe_id) != 0; }
    const RecipeRecord& record(const std::string& recipe_id) const;

    // Exact case-insensitive dish match; unknown dish yields an empty list.
    std::vector<const RecipeRecord*> lookup(const std::string& dish_description) const;

    // Dish names as stored, sorted. Case-insensitive duplicates collapse to
    // the first spelling seen.
    std::vector<std::string> dishes() const;
    std::string category_of(const std::string& dish) const;

    const std::map<std::string, RecipeRecord>& records() const { return records_; }

    // Embedding length shared by every embedded record, when any exist.
    std::optional<std::size_t> embedding_dim() const { return embedding_dim_; }

private:
    std::map<std::string, RecipeRecord> records_;
    // case-folded dish -> (stored spelling, recipe ids in insertion order)
    std::map<std::string, std::pair<std::string, std::vector<std::string>>> dish_index_;
    std::map<std::string, std::string> categories_;  // case-folded dish -> category
    std::optional<std::size_t> embedding_dim_;
};

// One RecipeRecord per line. Throws CorpusError naming the offending line on
// malformed JSON, a missing field, or a duplicate id. An optional embeddings
// sidecar ({"recipe_id": ..., "embedding": [...]} per line) is merged in; an
// optional categories file ({"dish": ..., "category": ...} per line) fills the
// category map. Dishes absent from the file report category "uncategorized".
RecipeCorpus load_corpus(const std::string& path,
                         const std::optional<std::string>& embeddings_path = std::nullopt,
                         const std::optional<std::string>& categories_path = std::nullopt);

// Inverse of load_corpus for the main file: one canonical JSON line per
// record, ordered by recipe_id.
void save_corpus(const RecipeCorpus& corpus, const std::string& path);

std::string record_to_json_line(const RecipeRecord& record);
RecipeRecord record_from_json_line(const std::string& line);

}  // namespace treeblend
