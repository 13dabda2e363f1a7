// Recipe trees: leaves are ingredients, internal nodes are the actions that
// consume them. Edges point child -> parent (an ingredient flows into the
// action using it). Trees are immutable once built and validated.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace treeblend {

enum class NodeKind { ingredient, action };
enum class RefType { structure, taste };

const char* to_string(NodeKind k);
const char* to_string(RefType r);

// One node of a recipe tree. Ingredient nodes are always leaves and carry
// ref_type/core; action nodes carry only a label and a verb-category
// abstraction. `extra` holds unrecognized DOT attributes so serialization can
// round-trip them.
struct RecipeNode {
    std::string id;
    NodeKind kind = NodeKind::ingredient;
    std::string label;
    std::string abstraction;
    RefType ref_type = RefType::taste;   // ingredients only
    bool core = false;                   // ingredients only
    std::map<std::string, std::string> extra;
};

struct RecipeTree {
    std::string title;
    std::map<std::string, RecipeNode> nodes;    // id -> node
    std::map<std::string, std::string> parent;  // child id -> parent id (root absent)
    std::optional<std::string> source_recipe_id;

    bool has_node(const std::string& id) const { return nodes.count(id) != 0; }
    const RecipeNode& node(const std::string& id) const;
    RecipeNode& node_mut(const std::string& id);
    std::string root_id() const;  // requires a valid tree
    std::size_t size() const { return nodes.size(); }
    // Children grouped by parent, each list sorted by (label, id).
    std::map<std::string, std::vector<std::string>> children() const;
    std::vector<std::string> children(const std::string& id) const;
};

enum class ViolationKind {
    empty_tree,
    no_root,
    multiple_roots,
    orphan_node,
    multiple_out_edges,
    wrong_edge_direction,  // edge into an ingredient node
    cycle,
    leaf_action,  // action node with no children
    root_not_action,
    unknown_node,  // edge endpoint with no node statement
    empty_label,
    empty_abstraction,
};

const char* to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string node_id;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

// Checks all structural invariants: exactly one root, single parent per
// non-root node, no cycles or orphans, ingredient leaves, action root,
// nonempty labels and abstractions.
ValidationReport validate(const RecipeTree& tree);

// Same checks over a raw node set and child->parent edge list, where
// multi-out-edge nodes are still representable. The DOT parser and the edge
// correction loop work at this level.
ValidationReport validate_graph(const std::map<std::string, RecipeNode>& nodes,
                                const std::vector<std::pair<std::string, std::string>>& edges);

// Verb -> category lookup for action abstractions. Unknown verbs fall back to
// "other"; "other" actions substitute only against "other".
class ActionHierarchy {
public:
    static const char* kFallbackCategory;

    ActionHierarchy() = default;
    static ActionHierarchy builtin();
    static ActionHierarchy from_json_file(const std::string& path);

    void add(const std::string& verb, const std::string& category);
    std::string category_of(const std::string& verb) const;
    std::size_t size() const { return verb_to_category_.size(); }

private:
    std::map<std::string, std::string> verb_to_category_;
};

struct ElementSet {
    std::set<std::string> ingredients;
    std::set<std::string> actions;
    std::size_t size() const { return ingredients.size() + actions.size(); }
};

// Distinct node labels of a tree, partitioned by kind.
ElementSet element_set(const RecipeTree& tree);

// Label/shape equality, ignoring node ids and ingredient attributes.
bool structurally_equal(const RecipeTree& a, const RecipeTree& b);

// Full equality used by round-trip checks: labels, kinds, attributes, extras.
bool attributes_equal(const RecipeTree& a, const RecipeTree& b);

}  // namespace treeblend
