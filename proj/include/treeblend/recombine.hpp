#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treeblend/corpus.hpp"
#include "treeblend/edit_distance.hpp"
#include "treeblend/tree.hpp"

namespace treeblend {

enum class BlendDirection { a_to_b, b_to_a, both };

struct BlendConstraints {
    double min_fraction_per_source = 0.30;  // in [0, 0.5]
    bool require_essential_from_both = true;
    int intermediates_per_pair = 6;  // >= 1
    BlendDirection direction = BlendDirection::a_to_b;
};

// Ingredient labels frequent within a dish but rare corpus-wide; these anchor
// a blend to its parents' identities.
struct EssentialIngredientIndex {
    std::map<std::string, std::set<std::string>> by_dish;  // case-folded dish -> labels
    std::vector<std::string> warnings;

    const std::set<std::string>& essential_for(const std::string& dish) const;
};

// essential(e, d) iff freq(e | d) >= dish_freq_min and freq(e | corpus)
// <= global_freq_max, frequencies counted over tree-bearing recipes. A dish
// with no trees contributes an empty set and a warning.
EssentialIngredientIndex build_essential_index(const RecipeCorpus& corpus,
                                               double dish_freq_min = 0.5,
                                               double global_freq_max = 0.05);

struct BlendCandidate {
    std::string id;
    RecipeTree tree;
    std::pair<std::string, std::string> source_pair;  // (source, target) recipe ids
    int applied_ops = 0;
    double fraction_from_source = 0.0;
    double fraction_from_target = 0.0;
};

// Uniform shuffle of script.ops re-sorted stably into three priority bands:
// ops landing a taste+core target node first, ops leaving a structure source
// node last, everything else between. Deferral then pushes each insert after
// its target parent. Same seed, same order.
std::vector<EditOp> shuffle_ops(const EditScript& script, const RecipeTree& source,
                                const RecipeTree& target, std::uint64_t rng_seed);

// Same order expressed as indices into script.ops; intermediates() consumes
// this form to build applied-op masks.
std::vector<int> shuffle_op_indices(const EditScript& script, const RecipeTree& source,
                                    const RecipeTree& target, std::uint64_t rng_seed);

// Node and edge share attributable to each side of a blend, over the
// candidate's nodes+edges. A surviving source node counts for the source; it
// counts for the target too when it is mapped and either shares the target
// label outright or has its update applied. Inserted nodes count for the
// target. An edge follows both its endpoints.
std::pair<double, double> attribution_fractions(const RecipeTree& candidate,
                                                const RecipeTree& source,
                                                const RecipeTree& target,
                                                const EditScript& script,
                                                const std::vector<bool>& applied);

// Blended trees at evenly spaced stop points of one shuffled script, strict
// nonempty non-total prefixes only. Candidates failing validation, the
// per-source fraction floor, or the essential-ingredient requirement are
// dropped, so fewer than intermediates_per_pair (or none) may come back.
// `dish_a`/`dish_b` name the essential sets; an empty essential set for a
// dish waives its requirement.
std::vector<BlendCandidate> intermediates(const RecipeTree& a, const RecipeTree& b,
                                          const BlendConstraints& constraints,
                                          const CostScheme& costs, std::uint64_t rng_seed,
                                          const EssentialIngredientIndex* essentials = nullptr,
                                          const std::string& dish_a = "",
                                          const std::string& dish_b = "");

}  // namespace treeblend
