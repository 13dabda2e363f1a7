#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeblend/tree.hpp"

namespace treeblend {

class UnknownIngredient : public std::runtime_error {
public:
    explicit UnknownIngredient(const std::string& label)
        : std::runtime_error("no pairing data for ingredient \"" + label + "\""), label(label) {}
    const std::string label;
};

// Taste-molecule sets for raw ingredients plus a decomposition map for
// composites. Composites may nest but must bottom out in raw entries without
// cycles; validate() enforces that and nonempty molecule sets.
struct PairingTable {
    std::map<std::string, std::set<std::string>> raw_molecules;
    std::map<std::string, std::set<std::string>> composites;

    // molecules.csv: "ingredient,molecule_id" rows; composites.csv:
    // "ingredient,constituent" rows. Blank lines, # comments, and a leading
    // header row are skipped. Validates before returning.
    static PairingTable from_csv_files(const std::string& molecules_path,
                                       const std::string& composites_path);

    void validate() const;  // throws std::runtime_error naming the offender

    bool known(const std::string& label) const;
    // Raw labels a label decomposes to; {label} itself when raw. Throws
    // UnknownIngredient when any leaf of the decomposition is missing.
    std::set<std::string> resolve_raw(const std::string& label) const;
};

// Jaccard overlap of molecule sets for raw pairs; composites score as the
// minimum over all constituent raw pairs. Throws UnknownIngredient.
double pairing_score(const std::string& a, const std::string& b, const PairingTable& table);

enum class ValuePolicy { repair, reject };

struct ValueVerdict {
    std::set<std::string> kept;
    // removal order, each with the number of sub-threshold pairs it sat in
    std::vector<std::pair<std::string, int>> removed;
    double min_pair_score_after = 1.0;
    bool rejected = false;
    std::set<std::string> unknown;  // labels that passed unscored
};

// Repeatedly removes the ingredient with the most sub-threshold pairings
// (ties: lower corpus frequency, then lexicographic) together with ancestor
// actions left childless, until every resolvable kept pair clears the
// threshold. A removal that would leave fewer than two ingredient labels
// rejects the candidate instead, returning the input tree unchanged. Policy
// reject skips repair: any sub-threshold pair rejects outright.
// corpus_frequency (label -> recipe count) feeds the tie-break; absent
// entries count 0, and a null map makes the tie purely lexicographic.
std::pair<RecipeTree, ValueVerdict> enforce_value(
    const RecipeTree& tree, const PairingTable& table, double threshold = 0.3,
    ValuePolicy policy = ValuePolicy::repair,
    const std::map<std::string, int>* corpus_frequency = nullptr);

}  // namespace treeblend
