#include "treeblend/recombine.hpp"

#include <algorithm>
#include <cmath>

#include "treeblend/edit_apply.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

const std::set<std::string>& EssentialIngredientIndex::essential_for(const std::string& dish) const {
    static const std::set<std::string> kEmpty;
    auto it = by_dish.find(to_lower(dish));
    return it == by_dish.end() ? kEmpty : it->second;
}

EssentialIngredientIndex build_essential_index(const RecipeCorpus& corpus, double dish_freq_min,
                                               double global_freq_max) {
    EssentialIngredientIndex index;
    std::map<std::string, int> global_count;  // label -> tree-bearing recipes containing it
    int global_trees = 0;
    std::map<std::string, std::map<std::string, int>> dish_count;
    std::map<std::string, int> dish_trees;

    for (const auto& dish : corpus.dishes()) {
        const std::string folded = to_lower(dish);
        index.by_dish[folded];  // dishes with no trees still get an entry
        for (const RecipeRecord* rec : corpus.lookup(dish)) {
            if (!rec->tree) continue;
            ++global_trees;
            ++dish_trees[folded];
            for (const auto& label : element_set(*rec->tree).ingredients) {
                ++global_count[label];
                ++dish_count[folded][label];
            }
        }
        if (dish_trees[folded] == 0)
            index.warnings.push_back("dish \"" + dish + "\" has no trees; essential set is empty");
    }

    for (auto& [dish, labels] : dish_count) {
        const int trees = dish_trees[dish];
        for (const auto& [label, count] : labels) {
            const double dish_freq = static_cast<double>(count) / trees;
            const double global_freq = static_cast<double>(global_count[label]) / global_trees;
            if (dish_freq >= dish_freq_min && global_freq <= global_freq_max)
                index.by_dish[dish].insert(label);
        }
    }
    return index;
}

namespace {

// Band 0 ops land a taste+core target node, band 2 ops disturb a structure
// source node, band 1 takes the rest. When an update qualifies for both,
// protecting the incoming flavor wins.
int priority_band(const EditOp& op, const RecipeTree& source, const RecipeTree& target) {
    if (op.target_id) {
        const RecipeNode& t = target.node(*op.target_id);
        if (t.ref_type == RefType::taste && t.core) return 0;
    }
    if (op.source_id) {
        const RecipeNode& s = source.node(*op.source_id);
        if (s.ref_type == RefType::structure) return 2;
    }
    return 1;
}

}  // namespace

std::vector<int> shuffle_op_indices(const EditScript& script, const RecipeTree& source,
                                    const RecipeTree& target, std::uint64_t rng_seed) {
    std::vector<int> order(script.ops.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(rng_seed);
    fisher_yates_shuffle(order, rng);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return priority_band(script.ops[x], source, target) <
               priority_band(script.ops[y], source, target);
    });
    return repair_order(order, target, script);
}

std::vector<EditOp> shuffle_ops(const EditScript& script, const RecipeTree& source,
                                const RecipeTree& target, std::uint64_t rng_seed) {
    std::vector<EditOp> out;
    for (int i : shuffle_op_indices(script, source, target, rng_seed)) out.push_back(script.ops[i]);
    return out;
}

std::pair<double, double> attribution_fractions(const RecipeTree& candidate,
                                                const RecipeTree& source, const RecipeTree& target,
                                                const EditScript& script,
                                                const std::vector<bool>& applied) {
    std::map<std::string, std::string> src_to_tgt;
    for (const auto& [s, t] : script.mapping) src_to_tgt[s] = t;
    std::map<std::string, std::size_t> update_of_source;
    for (std::size_t i = 0; i < script.ops.size(); ++i) {
        if (script.ops[i].kind == EditOpKind::update_op)
            update_of_source[*script.ops[i].source_id] = i;
    }

    auto node_sides = [&](const std::string& cand_id) -> std::pair<bool, bool> {
        if (cand_id.rfind("t_", 0) == 0) return {false, true};
        const std::string sid = cand_id.substr(2);
        auto mapped = src_to_tgt.find(sid);
        if (mapped == src_to_tgt.end()) return {true, false};
        auto up = update_of_source.find(sid);
        const bool shares_target_label = up == update_of_source.end()  // zero-cost match
                                         || applied[up->second];
        return {true, shares_target_label};
    };

    int total = 0, from_source = 0, from_target = 0;
    for (const auto& [id, node] : candidate.nodes) {
        auto [s, t] = node_sides(id);
        ++total;
        from_source += s;
        from_target += t;
    }
    for (const auto& [child, par] : candidate.parent) {
        auto [cs, ct] = node_sides(child);
        auto [ps, pt] = node_sides(par);
        ++total;
        from_source += cs && ps;
        from_target += ct && pt;
    }
    if (total == 0) return {0.0, 0.0};
    return {static_cast<double>(from_source) / total, static_cast<double>(from_target) / total};
}

namespace {

bool contains_any_label(const RecipeTree& tree, const std::set<std::string>& labels) {
    if (labels.empty()) return true;
    for (const auto& [id, node] : tree.nodes) {
        if (node.kind == NodeKind::ingredient && labels.count(node.label)) return true;
    }
    return false;
}

void blend_one_direction(const RecipeTree& src, const RecipeTree& tgt,
                         const BlendConstraints& constraints, const CostScheme& costs,
                         std::uint64_t rng_seed, const std::set<std::string>& essential_src,
                         const std::set<std::string>& essential_tgt,
                         std::vector<BlendCandidate>& out) {
    auto ordered_src = order_siblings(src);
    auto ordered_tgt = order_siblings(tgt);
    auto [cost, script] = distance(ordered_src, ordered_tgt, costs);
    (void)cost;
    const int n = static_cast<int>(script.ops.size());
    if (n == 0) return;  // identical trees have no strict intermediates

    auto order = shuffle_op_indices(script, src, tgt, rng_seed);
    const int slots = constraints.intermediates_per_pair;
    std::set<int> stops;
    for (int k = 1; k <= slots; ++k) {
        const int stop = (k * n + slots) / (slots + 1);  // ceil(k*n/(slots+1))
        if (stop > 0 && stop < n) stops.insert(stop);
    }

    const std::string src_id = src.source_recipe_id.value_or(src.title);
    const std::string tgt_id = tgt.source_recipe_id.value_or(tgt.title);
    for (int stop : stops) {
        std::vector<bool> applied(script.ops.size(), false);
        for (int i = 0; i < stop; ++i) applied[order[i]] = true;

        RecipeTree tree = materialize(src, tgt, script, applied);
        tree.title = src_id + "__" + tgt_id + "__k" + std::to_string(stop);
        tree.source_recipe_id.reset();
        if (!validate(tree).ok()) continue;

        auto [f_src, f_tgt] = attribution_fractions(tree, src, tgt, script, applied);
        if (f_src < constraints.min_fraction_per_source ||
            f_tgt < constraints.min_fraction_per_source)
            continue;
        if (constraints.require_essential_from_both &&
            (!contains_any_label(tree, essential_src) || !contains_any_label(tree, essential_tgt)))
            continue;

        BlendCandidate cand;
        cand.id = tree.title;
        cand.tree = std::move(tree);
        cand.source_pair = {src_id, tgt_id};
        cand.applied_ops = stop;
        cand.fraction_from_source = f_src;
        cand.fraction_from_target = f_tgt;
        out.push_back(std::move(cand));
    }
}

}  // namespace

std::vector<BlendCandidate> intermediates(const RecipeTree& a, const RecipeTree& b,
                                          const BlendConstraints& constraints,
                                          const CostScheme& costs, std::uint64_t rng_seed,
                                          const EssentialIngredientIndex* essentials,
                                          const std::string& dish_a, const std::string& dish_b) {
    static const std::set<std::string> kNone;
    const auto& ess_a = essentials ? essentials->essential_for(dish_a) : kNone;
    const auto& ess_b = essentials ? essentials->essential_for(dish_b) : kNone;

    std::vector<BlendCandidate> out;
    if (constraints.direction != BlendDirection::b_to_a)
        blend_one_direction(a, b, constraints, costs, rng_seed, ess_a, ess_b, out);
    if (constraints.direction != BlendDirection::a_to_b)
        blend_one_direction(b, a, constraints, costs, rng_seed, ess_b, ess_a, out);
    return out;
}

}  // namespace treeblend
