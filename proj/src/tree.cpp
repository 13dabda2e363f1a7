#include "treeblend/tree.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

const char* to_string(NodeKind k) {
    return k == NodeKind::ingredient ? "ingredient" : "action";
}

const char* to_string(RefType r) {
    return r == RefType::structure ? "structure" : "taste";
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::empty_tree: return "empty_tree";
        case ViolationKind::no_root: return "no_root";
        case ViolationKind::multiple_roots: return "multiple_roots";
        case ViolationKind::orphan_node: return "orphan_node";
        case ViolationKind::multiple_out_edges: return "multiple_out_edges";
        case ViolationKind::wrong_edge_direction: return "wrong_edge_direction";
        case ViolationKind::cycle: return "cycle";
        case ViolationKind::leaf_action: return "leaf_action";
        case ViolationKind::root_not_action: return "root_not_action";
        case ViolationKind::unknown_node: return "unknown_node";
        case ViolationKind::empty_label: return "empty_label";
        case ViolationKind::empty_abstraction: return "empty_abstraction";
    }
    return "unknown";
}

const RecipeNode& RecipeTree::node(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw std::out_of_range("no such node: " + id);
    return it->second;
}

RecipeNode& RecipeTree::node_mut(const std::string& id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw std::out_of_range("no such node: " + id);
    return it->second;
}

std::string RecipeTree::root_id() const {
    for (const auto& [id, n] : nodes) {
        if (parent.find(id) == parent.end()) return id;
    }
    throw std::logic_error("tree has no root");
}

std::map<std::string, std::vector<std::string>> RecipeTree::children() const {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [child, par] : parent) out[par].push_back(child);
    for (auto& [par, kids] : out) {
        std::sort(kids.begin(), kids.end(), [this](const std::string& x, const std::string& y) {
            const auto& nx = nodes.at(x);
            const auto& ny = nodes.at(y);
            if (nx.label != ny.label) return nx.label < ny.label;
            return x < y;
        });
    }
    return out;
}

std::vector<std::string> RecipeTree::children(const std::string& id) const {
    std::vector<std::string> kids;
    for (const auto& [child, par] : parent) {
        if (par == id) kids.push_back(child);
    }
    std::sort(kids.begin(), kids.end(), [this](const std::string& x, const std::string& y) {
        const auto& nx = nodes.at(x);
        const auto& ny = nodes.at(y);
        if (nx.label != ny.label) return nx.label < ny.label;
        return x < y;
    });
    return kids;
}

std::string ValidationReport::summary() const {
    std::ostringstream ss;
    for (const auto& v : violations) {
        ss << to_string(v.kind) << ": " << v.node_id;
        if (!v.detail.empty()) ss << " (" << v.detail << ")";
        ss << "\n";
    }
    return ss.str();
}

ValidationReport validate_graph(const std::map<std::string, RecipeNode>& nodes,
                                const std::vector<std::pair<std::string, std::string>>& edges) {
    ValidationReport report;
    auto flag = [&report](ViolationKind kind, const std::string& id, std::string detail = "") {
        report.violations.push_back({kind, id, std::move(detail)});
    };

    if (nodes.empty()) {
        flag(ViolationKind::empty_tree, "");
        return report;
    }

    bool endpoints_ok = true;
    for (const auto& [child, par] : edges) {
        if (!nodes.count(child)) {
            flag(ViolationKind::unknown_node, child, "edge source");
            endpoints_ok = false;
        }
        if (!nodes.count(par)) {
            flag(ViolationKind::unknown_node, par, "edge target");
            endpoints_ok = false;
        }
    }
    if (!endpoints_ok) return report;

    for (const auto& [id, n] : nodes) {
        if (n.label.empty()) flag(ViolationKind::empty_label, id);
        if (n.abstraction.empty()) flag(ViolationKind::empty_abstraction, id);
    }

    std::map<std::string, std::vector<std::string>> out;   // child -> parents
    std::map<std::string, std::vector<std::string>> in;    // parent -> children
    for (const auto& [child, par] : edges) {
        out[child].push_back(par);
        in[par].push_back(child);
    }

    for (const auto& [id, parents] : out) {
        if (parents.size() > 1) flag(ViolationKind::multiple_out_edges, id);
    }

    for (const auto& [child, par] : edges) {
        if (nodes.at(par).kind == NodeKind::ingredient)
            flag(ViolationKind::wrong_edge_direction, child, "edge into ingredient " + par);
    }

    std::vector<std::string> roots;
    for (const auto& [id, n] : nodes) {
        if (out.find(id) == out.end()) roots.push_back(id);
    }
    if (roots.empty()) {
        flag(ViolationKind::no_root, "");
    } else if (roots.size() > 1) {
        for (const auto& id : roots) flag(ViolationKind::multiple_roots, id);
    }

    for (const auto& [id, n] : nodes) {
        const bool has_children = in.count(id) && !in.at(id).empty();
        if (n.kind == NodeKind::action && !has_children) flag(ViolationKind::leaf_action, id);
    }

    // Iterative coloring DFS over outgoing edges; a back edge marks a cycle.
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    std::set<std::string> on_cycle;
    for (const auto& [start, n] : nodes) {
        if (color[start] != 0) continue;
        std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
        static const std::vector<std::string> kNoParents;
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            if (next == 0) color[id] = 1;
            auto oit = out.find(id);
            const std::vector<std::string>& parents = oit == out.end() ? kNoParents : oit->second;
            if (next < parents.size()) {
                const std::string& to = parents[next++];
                if (color[to] == 1) {
                    // Everything currently gray from `to` up the stack is on the cycle.
                    bool in_cycle = false;
                    for (const auto& [sid, _] : stack) {
                        if (sid == to) in_cycle = true;
                        if (in_cycle && on_cycle.insert(sid).second)
                            flag(ViolationKind::cycle, sid);
                    }
                } else if (color[to] == 0) {
                    stack.emplace_back(to, 0);
                }
            } else {
                color[id] = 2;
                stack.pop_back();
            }
        }
    }

    if (roots.size() == 1) {
        const RecipeNode& root = nodes.at(roots.front());
        if (root.kind != NodeKind::action) flag(ViolationKind::root_not_action, roots.front());
        // Orphans: nodes whose parent chains never reach the root.
        for (const auto& [id, n] : nodes) {
            std::set<std::string> seen;
            std::vector<std::string> frontier{id};
            bool reaches = false;
            while (!frontier.empty() && !reaches) {
                std::string cur = frontier.back();
                frontier.pop_back();
                if (cur == roots.front()) {
                    reaches = true;
                    break;
                }
                if (!seen.insert(cur).second) continue;
                if (out.count(cur))
                    for (const auto& p : out.at(cur)) frontier.push_back(p);
            }
            if (!reaches && !on_cycle.count(id)) flag(ViolationKind::orphan_node, id);
        }
    }

    return report;
}

ValidationReport validate(const RecipeTree& tree) {
    std::vector<std::pair<std::string, std::string>> edges(tree.parent.begin(), tree.parent.end());
    return validate_graph(tree.nodes, edges);
}

const char* ActionHierarchy::kFallbackCategory = "other";

void ActionHierarchy::add(const std::string& verb, const std::string& category) {
    verb_to_category_[to_lower(verb)] = category;
}

std::string ActionHierarchy::category_of(const std::string& verb) const {
    auto it = verb_to_category_.find(to_lower(verb));
    return it == verb_to_category_.end() ? kFallbackCategory : it->second;
}

ActionHierarchy ActionHierarchy::from_json_file(const std::string& path) {
    ActionHierarchy h;
    auto j = nlohmann::json::parse(read_file(path));
    for (auto& [category, verbs] : j.items()) {
        for (const auto& verb : verbs) h.add(verb.get<std::string>(), category);
    }
    return h;
}

ActionHierarchy ActionHierarchy::builtin() {
    ActionHierarchy h;
    static const struct {
        const char* category;
        const char* verbs;
    } kGroups[] = {
        {"heat application",
         "bake boil broil simmer fry roast microwave grill toast steam saute sear brown scald char "
         "braise poach blanch warm heat reheat cook barbecue deep-fry stir-fry preheat melt caramelize reduce"},
        {"preparation",
         "mix chop slice dice whisk knead blend stir beat mince grate peel core trim cut shred mash "
         "crush puree sift cube halve quarter juice zest crack separate combine fold whip rinse wash "
         "drain dry pat soak dissolve defrost thaw unroll roll flatten pound tenderize stuff fillet "
         "debone crumble split open measure prepare process grind scramble"},
        {"positioning",
         "top layer place spread fill cover arrange stack pour transfer set put lay wrap line scoop "
         "spoon ladle tuck nest insert sandwich assemble shape form mold press flip turn invert "
         "unmold remove lift divide distribute dollop pipe thread skewer"},
        {"flavor enhancement",
         "season sprinkle salt pepper marinate garnish drizzle glaze baste brush coat dust rub "
         "infuse sweeten spice dress toss frost ice decorate"},
        {"temperature change", "chill cool freeze refrigerate rest stand ferment proof rise cure age"},
        {"serving", "serve plate present slice-and-serve portion enjoy garnish-and-serve"},
        {"monitoring", "check watch wait let leave bring return repeat continue"},
    };
    for (const auto& group : kGroups) {
        for (const auto& verb : split(group.verbs, ' ')) {
            if (!verb.empty()) h.add(verb, group.category);
        }
    }
    return h;
}

ElementSet element_set(const RecipeTree& tree) {
    ElementSet out;
    for (const auto& [id, n] : tree.nodes) {
        if (n.kind == NodeKind::ingredient) {
            out.ingredients.insert(n.label);
        } else {
            out.actions.insert(n.label);
        }
    }
    return out;
}

namespace {

// Canonical signature: (kind, label, sorted child signatures). Ids and
// ingredient attributes do not participate.
std::string shape_signature(const RecipeTree& tree, const std::string& id,
                            const std::map<std::string, std::vector<std::string>>& children,
                            bool with_attrs) {
    const RecipeNode& n = tree.nodes.at(id);
    std::string sig = "(";
    sig += to_string(n.kind);
    sig += '|';
    sig += n.label;
    if (with_attrs) {
        sig += '|';
        sig += n.abstraction;
        if (n.kind == NodeKind::ingredient) {
            sig += '|';
            sig += to_string(n.ref_type);
            sig += n.core ? "|core" : "|aux";
        }
        for (const auto& [k, v] : n.extra) {
            sig += '|';
            sig += k;
            sig += '=';
            sig += v;
        }
    }
    std::vector<std::string> kid_sigs;
    auto it = children.find(id);
    if (it != children.end()) {
        for (const auto& child : it->second)
            kid_sigs.push_back(shape_signature(tree, child, children, with_attrs));
    }
    std::sort(kid_sigs.begin(), kid_sigs.end());
    for (const auto& s : kid_sigs) sig += s;
    sig += ')';
    return sig;
}

bool equal_by_signature(const RecipeTree& a, const RecipeTree& b, bool with_attrs) {
    if (a.nodes.size() != b.nodes.size() || a.parent.size() != b.parent.size()) return false;
    if (a.nodes.empty()) return true;
    std::string root_a, root_b;
    try {
        root_a = a.root_id();
        root_b = b.root_id();
    } catch (const std::logic_error&) {
        return false;
    }
    return shape_signature(a, root_a, a.children(), with_attrs) ==
           shape_signature(b, root_b, b.children(), with_attrs);
}

}  // namespace

bool structurally_equal(const RecipeTree& a, const RecipeTree& b) {
    return equal_by_signature(a, b, false);
}

bool attributes_equal(const RecipeTree& a, const RecipeTree& b) {
    return a.title == b.title && equal_by_signature(a, b, true);
}

}  // namespace treeblend
