#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeblend/tree.hpp"

namespace treeblend {

// Typed relabel costs. Cross-kind updates and updates between nodes agreeing
// on neither label nor abstraction are infeasible, never merely expensive;
// delete+insert bounds every instance, so an infeasible update is never forced.
struct CostScheme {
    double insert_cost = 100.0;
    double delete_cost = 100.0;
    double same_label_cost = 0.0;
    double same_abstraction_cost = 5.0;

    // nullopt marks an infeasible pair. Same label wins over same abstraction
    // and ignores attribute differences (ref_type, core).
    std::optional<double> update_cost(const RecipeNode& from, const RecipeNode& to) const;

    static CostScheme from_json_file(const std::string& path);
};

// Left-to-right postorder flattening of a valid RecipeTree with the sibling
// order fixed to (label, id) ascending. Index 0 is the leftmost leaf; the
// last index is the root.
struct OrderedTree {
    std::vector<std::string> ids;
    std::vector<int> parent;  // postorder index of parent, -1 at the root
    std::vector<int> lld;     // leftmost leaf descendant, per Zhang-Shasha
    std::vector<int> keyroots;
    const RecipeTree* tree = nullptr;  // borrowed; must outlive the OrderedTree

    int size() const { return static_cast<int>(ids.size()); }
    const RecipeNode& node(int index) const { return tree->node(ids[index]); }
};

OrderedTree order_siblings(const RecipeTree& tree);

enum class EditOpKind { insert_op, delete_op, update_op };

struct EditOp {
    EditOpKind kind;
    std::optional<std::string> source_id;  // delete and update
    std::optional<std::string> target_id;  // insert and update
    double cost = 0.0;
};

std::string to_string(EditOpKind kind);

struct EditScript {
    // Effective operations only: inserts, deletes, and paid updates. Zero-cost
    // matches are not ops, so distance(T, T) yields an empty list. Deletes are
    // ordered children-first, inserts parents-first, so sequential replay
    // stays well-founded.
    std::vector<EditOp> ops;
    double total_cost = 0.0;
    // Every mapped (source id, target id) pair, zero-cost matches included.
    std::vector<std::pair<std::string, std::string>> mapping;
};

// Minimal edit distance and one minimal script achieving it. Ties are broken
// update > delete > insert within 1e-9, which pins the returned script.
std::pair<double, EditScript> distance(const OrderedTree& a, const OrderedTree& b,
                                       const CostScheme& costs);

// distance / (delete_cost * |a| + insert_cost * |b|), in [0, 1].
double normalized_distance(const OrderedTree& a, const OrderedTree& b, const CostScheme& costs);

}  // namespace treeblend
