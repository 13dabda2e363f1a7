#include "treeblend/edit_distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

std::optional<double> CostScheme::update_cost(const RecipeNode& from, const RecipeNode& to) const {
    if (from.kind != to.kind) return std::nullopt;
    if (from.label == to.label) return same_label_cost;
    if (from.abstraction == to.abstraction) return same_abstraction_cost;
    return std::nullopt;
}

CostScheme CostScheme::from_json_file(const std::string& path) {
    auto j = nlohmann::json::parse(read_file(path));
    CostScheme costs;
    costs.insert_cost = j.value("insert_cost", costs.insert_cost);
    costs.delete_cost = j.value("delete_cost", costs.delete_cost);
    costs.same_label_cost = j.value("same_label_cost", costs.same_label_cost);
    costs.same_abstraction_cost = j.value("same_abstraction_cost", costs.same_abstraction_cost);
    for (double c : {costs.insert_cost, costs.delete_cost, costs.same_label_cost,
                     costs.same_abstraction_cost}) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument(path + ": costs must be finite and nonnegative");
    }
    return costs;
}

std::string to_string(EditOpKind kind) {
    switch (kind) {
        case EditOpKind::insert_op: return "insert";
        case EditOpKind::delete_op: return "delete";
        case EditOpKind::update_op: return "update";
    }
    return "?";
}

OrderedTree order_siblings(const RecipeTree& tree) {
    OrderedTree out;
    out.tree = &tree;
    const int n = static_cast<int>(tree.size());
    out.ids.reserve(n);
    out.parent.reserve(n);
    out.lld.reserve(n);

    // Iterative postorder; children visited in (label, id) order. A work item
    // carries the parent's postorder slot, unknown until the parent is
    // emitted, so parents are patched afterwards via a second pass.
    struct Frame {
        std::string id;
        std::size_t next_child = 0;
        std::vector<std::string> kids;
        int first_leaf = -1;
    };
    std::vector<Frame> stack;
    std::map<std::string, int> index_of;
    stack.push_back({tree.root_id(), 0, tree.children(tree.root_id()), -1});
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next_child < top.kids.size()) {
            const std::string kid = top.kids[top.next_child++];
            stack.push_back({kid, 0, tree.children(kid), -1});
            continue;
        }
        const int index = static_cast<int>(out.ids.size());
        out.ids.push_back(top.id);
        index_of[top.id] = index;
        out.lld.push_back(top.first_leaf == -1 ? index : top.first_leaf);
        out.parent.push_back(-1);
        const int subtree_lld = out.lld.back();
        stack.pop_back();
        if (!stack.empty() && stack.back().first_leaf == -1) stack.back().first_leaf = subtree_lld;
    }
    for (int i = 0; i < n; ++i) {
        auto it = tree.parent.find(out.ids[i]);
        if (it != tree.parent.end()) out.parent[i] = index_of.at(it->second);
    }
    // Keyroots: nodes with a left sibling, plus the root; equivalently the
    // highest node of each distinct leftmost-leaf chain.
    std::map<int, int> highest_for_lld;
    for (int i = 0; i < n; ++i) highest_for_lld[out.lld[i]] = i;
    for (const auto& [lld, node] : highest_for_lld) out.keyroots.push_back(node);
    std::sort(out.keyroots.begin(), out.keyroots.end());
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

bool close(double x, double y) { return std::isfinite(y) && std::fabs(x - y) <= kEps; }

// Forest-distance table for the subtree pair rooted at (r1, r2), relative to
// their leftmost leaves. fd[di][dj] is the distance between the first di
// postorder nodes of subtree r1 and the first dj of subtree r2. Cells where
// both prefixes are complete subtrees feed (and later reuse) td.
struct ForestDP {
    int l1, l2, n1, n2;
    std::vector<std::vector<double>> fd;

    ForestDP(const OrderedTree& a, const OrderedTree& b, const CostScheme& costs,
             std::vector<std::vector<double>>& td, int r1, int r2, bool record_td) {
        l1 = a.lld[r1];
        l2 = b.lld[r2];
        n1 = r1 - l1 + 1;
        n2 = r2 - l2 + 1;
        fd.assign(n1 + 1, std::vector<double>(n2 + 1, 0.0));
        for (int di = 1; di <= n1; ++di) fd[di][0] = fd[di - 1][0] + costs.delete_cost;
        for (int dj = 1; dj <= n2; ++dj) fd[0][dj] = fd[0][dj - 1] + costs.insert_cost;
        for (int di = 1; di <= n1; ++di) {
            const int i = l1 + di - 1;
            for (int dj = 1; dj <= n2; ++dj) {
                const int j = l2 + dj - 1;
                const double del = fd[di - 1][dj] + costs.delete_cost;
                const double ins = fd[di][dj - 1] + costs.insert_cost;
                if (a.lld[i] == l1 && b.lld[j] == l2) {
                    auto u = costs.update_cost(a.node(i), b.node(j));
                    const double upd = fd[di - 1][dj - 1] + (u ? *u : kInf);
                    fd[di][dj] = std::min({del, ins, upd});
                    if (record_td) td[i][j] = fd[di][dj];
                } else {
                    const double jump = fd[a.lld[i] - l1][b.lld[j] - l2] + td[i][j];
                    fd[di][dj] = std::min({del, ins, jump});
                }
            }
        }
    }
};

}  // namespace

std::pair<double, EditScript> distance(const OrderedTree& a, const OrderedTree& b,
                                       const CostScheme& costs) {
    const int n = a.size();
    const int m = b.size();
    EditScript script;
    if (n == 0 || m == 0) {
        for (int i = 0; i < n; ++i)
            script.ops.push_back({EditOpKind::delete_op, a.ids[i], std::nullopt, costs.delete_cost});
        for (int j = m - 1; j >= 0; --j)
            script.ops.push_back({EditOpKind::insert_op, std::nullopt, b.ids[j], costs.insert_cost});
        for (const auto& op : script.ops) script.total_cost += op.cost;
        return {script.total_cost, script};
    }

    std::vector<std::vector<double>> td(n, std::vector<double>(m, 0.0));
    for (int k1 : a.keyroots) {
        for (int k2 : b.keyroots) ForestDP(a, b, costs, td, k1, k2, true);
    }

    // Script recovery retraces forest tables per subtree pair, worklist
    // instead of recursion so deep chains cannot exhaust the stack.
    std::vector<std::pair<int, int>> mapped;  // (source, target) postorder pairs
    std::vector<int> deleted;
    std::vector<int> inserted;
    std::vector<std::pair<int, int>> work{{n - 1, m - 1}};
    while (!work.empty()) {
        const auto [r1, r2] = work.back();
        work.pop_back();
        ForestDP dp(a, b, costs, td, r1, r2, false);
        int di = dp.n1;
        int dj = dp.n2;
        while (di > 0 || dj > 0) {
            const double here = dp.fd[di][dj];
            if (di > 0 && dj > 0) {
                const int i = dp.l1 + di - 1;
                const int j = dp.l2 + dj - 1;
                if (a.lld[i] == dp.l1 && b.lld[j] == dp.l2) {
                    auto u = costs.update_cost(a.node(i), b.node(j));
                    if (u && close(here, dp.fd[di - 1][dj - 1] + *u)) {
                        mapped.emplace_back(i, j);
                        --di;
                        --dj;
                        continue;
                    }
                } else if (close(here,
                                 dp.fd[a.lld[i] - dp.l1][b.lld[j] - dp.l2] + td[i][j])) {
                    work.emplace_back(i, j);
                    di = a.lld[i] - dp.l1;
                    dj = b.lld[j] - dp.l2;
                    continue;
                }
            }
            if (di > 0 && close(here, dp.fd[di - 1][dj] + costs.delete_cost)) {
                deleted.push_back(dp.l1 + di - 1);
                --di;
                continue;
            }
            if (dj > 0 && close(here, dp.fd[di][dj - 1] + costs.insert_cost)) {
                inserted.push_back(dp.l2 + dj - 1);
                --dj;
                continue;
            }
            throw std::logic_error("edit script trace lost the minimal path");
        }
    }

    std::sort(mapped.begin(), mapped.end());
    std::sort(deleted.begin(), deleted.end());
    std::sort(inserted.begin(), inserted.end(), std::greater<int>());

    for (const auto& [i, j] : mapped) {
        script.mapping.emplace_back(a.ids[i], b.ids[j]);
        const double u = *costs.update_cost(a.node(i), b.node(j));
        if (u > 0.0)
            script.ops.push_back({EditOpKind::update_op, a.ids[i], b.ids[j], u});
    }
    for (int i : deleted)
        script.ops.push_back({EditOpKind::delete_op, a.ids[i], std::nullopt, costs.delete_cost});
    for (int j : inserted)
        script.ops.push_back({EditOpKind::insert_op, std::nullopt, b.ids[j], costs.insert_cost});
    for (const auto& op : script.ops) script.total_cost += op.cost;
    return {td[n - 1][m - 1], script};
}

double normalized_distance(const OrderedTree& a, const OrderedTree& b, const CostScheme& costs) {
    const double denom = costs.delete_cost * a.size() + costs.insert_cost * b.size();
    if (denom == 0.0) return 0.0;
    return distance(a, b, costs).first / denom;
}

}  // namespace treeblend
