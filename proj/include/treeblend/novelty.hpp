#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeblend/corpus.hpp"
#include "treeblend/tree.hpp"

namespace treeblend {

// Actions and ingredients score identically; the kind only keeps labels like
// "mix" (a verb) and "mix" (a packaged product) apart.
using Element = std::pair<NodeKind, std::string>;

std::set<Element> tree_elements(const RecipeTree& tree);

class UnknownElement : public std::runtime_error {
public:
    explicit UnknownElement(Element e);
    const Element element;
};

// Document-frequency counts with set semantics: a recipe contributes each
// element and each unordered element pair at most once.
struct NoveltyIndex {
    std::map<Element, int> element_df;
    std::map<std::pair<Element, Element>, int> pair_df;  // key ordered (small, large)
    int corpus_size = 0;
    int min_support = 5;
    std::vector<std::string> warnings;

    bool indexed(const Element& e) const { return element_df.count(e) != 0; }
    // Elements below the support floor exist in the maps but never score.
    bool scorable(const Element& e) const;
    int pair_count(const Element& a, const Element& b) const;
};

// Counts over every tree-bearing recipe; a treeless recipe is skipped with a
// warning on the index.
NoveltyIndex build_index(const RecipeCorpus& corpus, int min_support = 5);

// ln(N_e / df_e(e')). A zero df is smoothed to 1 first; results clamp at 0 so
// a pair more common than its base element cannot score negative. Throws
// UnknownElement when either side is unindexed, and std::domain_error when
// either side sits below the support floor.
double idf(const Element& e, const Element& e_prime, const NoveltyIndex& index);

// Sum of the ten largest idf(e, e') over the tree's other elements; co-elements
// that are unindexed or below the support floor are skipped, and an unscorable
// e yields 0.
double element_novelty(const Element& e, const RecipeTree& tree, const NoveltyIndex& index);

// Sum of the ten largest element_novelty values over the tree's elements.
double tree_novelty(const RecipeTree& tree, const NoveltyIndex& index);

void save_index(const NoveltyIndex& index, const std::string& path);
// Rejects files whose magic or version does not match the writer's.
NoveltyIndex load_index(const std::string& path);

}  // namespace treeblend
