#include "treeblend/edit_apply.hpp"

#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace treeblend {

namespace {

struct ScriptView {
    std::map<std::string, std::string> src_to_tgt;
    std::map<std::string, std::string> tgt_to_src;
    std::map<std::string, std::size_t> update_of_source;  // source id -> op index
    std::map<std::string, std::size_t> insert_of_target;  // target id -> op index
    std::set<std::string> deleted_sources;                // only applied ones

    ScriptView(const EditScript& script, const std::vector<bool>& applied) {
        if (applied.size() != script.ops.size())
            throw std::invalid_argument("applied mask size does not match op count");
        for (const auto& [s, t] : script.mapping) {
            src_to_tgt[s] = t;
            tgt_to_src[t] = s;
        }
        for (std::size_t i = 0; i < script.ops.size(); ++i) {
            const EditOp& op = script.ops[i];
            switch (op.kind) {
                case EditOpKind::update_op: update_of_source[*op.source_id] = i; break;
                case EditOpKind::insert_op: insert_of_target[*op.target_id] = i; break;
                case EditOpKind::delete_op:
                    if (applied[i]) deleted_sources.insert(*op.source_id);
                    break;
            }
        }
    }
};

}  // namespace

RecipeTree materialize(const RecipeTree& source, const RecipeTree& target,
                       const EditScript& script, const std::vector<bool>& applied) {
    ScriptView view(script, applied);
    auto is_applied = [&](std::size_t op_index) { return applied[op_index]; };
    auto insert_applied = [&](const std::string& target_id) {
        auto it = view.insert_of_target.find(target_id);
        return it != view.insert_of_target.end() && is_applied(it->second);
    };

    RecipeTree out;
    out.title = source.title;

    // Surviving source nodes, relabeled where an applied update says so.
    for (const auto& [sid, snode] : source.nodes) {
        if (view.deleted_sources.count(sid)) continue;
        RecipeNode node = snode;
        node.id = "s_" + sid;
        auto up = view.update_of_source.find(sid);
        if (up != view.update_of_source.end() && is_applied(up->second)) {
            const RecipeNode& tnode = target.node(*script.ops[up->second].target_id);
            node.label = tnode.label;
            node.abstraction = tnode.abstraction;
            node.ref_type = tnode.ref_type;
            node.core = tnode.core;
            node.extra = tnode.extra;
        }
        out.nodes[node.id] = node;
    }
    // Applied inserts carry the target node wholesale.
    for (const auto& [tid, op_index] : view.insert_of_target) {
        if (!is_applied(op_index)) continue;
        RecipeNode node = target.node(tid);
        node.id = "t_" + tid;
        out.nodes[node.id] = node;
    }

    auto nearest_surviving_source_ancestor =
        [&](const std::string& sid) -> std::optional<std::string> {
        auto it = source.parent.find(sid);
        while (it != source.parent.end()) {
            if (!view.deleted_sources.count(it->second)) return it->second;
            it = source.parent.find(it->second);
        }
        return std::nullopt;
    };

    // Parent of a surviving source node.
    for (const auto& [sid, snode] : source.nodes) {
        if (view.deleted_sources.count(sid)) continue;
        auto m = nearest_surviving_source_ancestor(sid);
        std::optional<std::string> parent_out;
        if (m) parent_out = "s_" + *m;

        auto mapped = view.src_to_tgt.find(sid);
        if (mapped != view.src_to_tgt.end()) {
            // An applied insert between the node's target image and the
            // nearest mapped target ancestor adopts the node.
            auto it = target.parent.find(mapped->second);
            while (it != target.parent.end()) {
                const std::string& anc = it->second;
                if (view.tgt_to_src.count(anc)) break;
                if (insert_applied(anc)) {
                    parent_out = "t_" + anc;
                    break;
                }
                it = target.parent.find(anc);
            }
        }
        if (parent_out) out.parent["s_" + sid] = *parent_out;
    }

    // Parent of an applied insert.
    for (const auto& [tid, op_index] : view.insert_of_target) {
        if (!is_applied(op_index)) continue;
        auto it = target.parent.find(tid);
        while (it != target.parent.end()) {
            const std::string& anc = it->second;
            auto back = view.tgt_to_src.find(anc);
            if (back != view.tgt_to_src.end()) {
                out.parent["t_" + tid] = "s_" + back->second;
                break;
            }
            if (insert_applied(anc)) {
                out.parent["t_" + tid] = "t_" + anc;
                break;
            }
            it = target.parent.find(anc);
        }
    }
    return out;
}

RecipeTree apply_full(const RecipeTree& source, const RecipeTree& target, const EditScript& script) {
    return materialize(source, target, script, std::vector<bool>(script.ops.size(), true));
}

std::vector<int> repair_order(const std::vector<int>& order, const RecipeTree& target,
                              const EditScript& script) {
    std::set<std::string> mapped_targets;
    for (const auto& [s, t] : script.mapping) mapped_targets.insert(t);
    std::set<std::string> applied_inserts;

    auto ready = [&](int op_index) {
        const EditOp& op = script.ops[op_index];
        if (op.kind != EditOpKind::insert_op) return true;
        auto it = target.parent.find(*op.target_id);
        if (it == target.parent.end()) return true;
        return mapped_targets.count(it->second) != 0 || applied_inserts.count(it->second) != 0;
    };
    auto note_applied = [&](int op_index) {
        const EditOp& op = script.ops[op_index];
        if (op.kind == EditOpKind::insert_op) applied_inserts.insert(*op.target_id);
    };

    std::vector<int> out;
    out.reserve(order.size());
    std::deque<int> deferred;
    for (int op_index : order) {
        if (!ready(op_index)) {
            deferred.push_back(op_index);
            continue;
        }
        out.push_back(op_index);
        note_applied(op_index);
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (auto it = deferred.begin(); it != deferred.end(); ++it) {
                if (ready(*it)) {
                    out.push_back(*it);
                    note_applied(*it);
                    deferred.erase(it);
                    progressed = true;
                    break;
                }
            }
        }
    }
    if (!deferred.empty())
        throw std::logic_error("repair_order: ops left waiting on parents that never arrive");
    return out;
}

}  // namespace treeblend
