// DOT dialect for recipe trees plus the canonical JSON form.
//
// Node statements carry the node attributes, edges run child -> parent:
//
//   digraph "simple lasagna" {
//     "n1" [label="lasagna sheets", kind="ingredient", ref="structure",
//           core="true", abstraction="pasta"];
//     "n2" [label="boil", kind="action", abstraction="heat application"];
//     "n1" -> "n2";
//   }
//
// Unrecognized node attributes are preserved through round trips. Syntax
// errors throw DotSyntaxError with line/column; semantic violations (orphans,
// multiple outgoing edges, cycles, ...) come back as a ValidationReport so the
// correction loop can act on them.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeblend/tree.hpp"

namespace treeblend {

class DotSyntaxError : public std::runtime_error {
public:
    DotSyntaxError(const std::string& message, int line, int column)
        : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line(line),
          column(column) {}
    int line;
    int column;
};

// Syntactic form of a parsed DOT file, before tree invariants are imposed.
struct DotGraph {
    std::string title;
    std::map<std::string, RecipeNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;  // child -> parent
};

// Throws DotSyntaxError on malformed input. `hierarchy` fills in missing
// action abstractions; missing ingredient abstractions default to the label.
DotGraph parse_dot_graph(const std::string& text, const ActionHierarchy& hierarchy);

struct TreeParseResult {
    std::optional<RecipeTree> tree;  // set iff report.ok()
    ValidationReport report;
    bool ok() const { return tree.has_value(); }
};

// Builds a RecipeTree when all structural invariants hold; otherwise reports
// every violation found.
TreeParseResult build_tree(const DotGraph& graph);

TreeParseResult parse_dot(const std::string& text, const ActionHierarchy& hierarchy);

// Canonical serialization: node statements sorted by id, edges sorted by child
// id, all identifiers quoted. Throws std::invalid_argument on an empty title.
std::string serialize_dot(const RecipeTree& tree);

// Canonical JSON: fixed field order, node and edge arrays sorted by
// (label, id) of the node / edge child.
std::string tree_to_json(const RecipeTree& tree);
RecipeTree tree_from_json(const std::string& json_text);

}  // namespace treeblend
