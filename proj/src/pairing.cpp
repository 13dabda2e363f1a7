#include "treeblend/pairing.hpp"

#include <algorithm>
#include <fstream>

#include "treeblend/util.hpp"

namespace treeblend {

namespace {

// Two-field CSV line; the first comma outside quotes splits. Quoted fields
// may contain commas and doubled quotes.
std::pair<std::string, std::string> split_csv_pair(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    if (fields.size() != 2)
        throw std::runtime_error(where + ": expected two fields, got " +
                                 std::to_string(fields.size()) + " in \"" + line + "\"");
    return {trim(fields[0]), trim(fields[1])};
}

template <typename Fn>
void for_each_csv_row(const std::string& path, const std::string& header_first_field, Fn fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto [first, second] = split_csv_pair(t, path + ":" + std::to_string(lineno));
        if (lineno == 1 && first == header_first_field) continue;
        if (first.empty() || second.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty field");
        fn(first, second);
    }
}

}  // namespace

PairingTable PairingTable::from_csv_files(const std::string& molecules_path,
                                          const std::string& composites_path) {
    PairingTable table;
    for_each_csv_row(molecules_path, "ingredient", [&](const std::string& ing, const std::string& mol) {
        table.raw_molecules[ing].insert(mol);
    });
    for_each_csv_row(composites_path, "ingredient",
                     [&](const std::string& ing, const std::string& part) {
                         table.composites[ing].insert(part);
                     });
    table.validate();
    return table;
}

void PairingTable::validate() const {
    for (const auto& [label, molecules] : raw_molecules) {
        if (molecules.empty())
            throw std::runtime_error("raw ingredient \"" + label + "\" has no molecules");
        if (composites.count(label))
            throw std::runtime_error("\"" + label + "\" is listed both raw and composite");
    }
    for (const auto& [label, parts] : composites) {
        // walk the decomposition; revisiting a composite already on the path
        // is a cycle
        std::set<std::string> on_path;
        auto walk = [&](auto&& self, const std::string& cur) -> void {
            if (raw_molecules.count(cur)) return;
            auto it = composites.find(cur);
            if (it == composites.end())
                throw std::runtime_error("composite \"" + label + "\" needs \"" + cur +
                                         "\", which is neither raw nor composite");
            if (!on_path.insert(cur).second)
                throw std::runtime_error("composite cycle through \"" + cur + "\"");
            for (const auto& part : it->second) self(self, part);
            on_path.erase(cur);
        };
        walk(walk, label);
    }
}

bool PairingTable::known(const std::string& label) const {
    try {
        resolve_raw(label);
        return true;
    } catch (const UnknownIngredient&) {
        return false;
    }
}

std::set<std::string> PairingTable::resolve_raw(const std::string& label) const {
    if (raw_molecules.count(label)) return {label};
    auto it = composites.find(label);
    if (it == composites.end()) throw UnknownIngredient(label);
    std::set<std::string> out;
    std::set<std::string> on_path{label};
    std::vector<std::string> stack(it->second.begin(), it->second.end());
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (raw_molecules.count(cur)) {
            out.insert(cur);
            continue;
        }
        auto sub = composites.find(cur);
        if (sub == composites.end()) throw UnknownIngredient(label);
        if (!on_path.insert(cur).second) continue;  // cycle; validate() rejects these earlier
        for (const auto& part : sub->second) stack.push_back(part);
    }
    return out;
}

double pairing_score(const std::string& a, const std::string& b, const PairingTable& table) {
    const std::set<std::string> raws_a = table.resolve_raw(a);
    const std::set<std::string> raws_b = table.resolve_raw(b);
    double score = 1.0;
    for (const auto& ra : raws_a) {
        const auto& ma = table.raw_molecules.at(ra);
        for (const auto& rb : raws_b) {
            const auto& mb = table.raw_molecules.at(rb);
            std::size_t inter = 0;
            for (const auto& m : ma) inter += mb.count(m);
            const std::size_t uni = ma.size() + mb.size() - inter;
            const double jaccard = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
            score = std::min(score, jaccard);
        }
    }
    return score;
}

namespace {

std::set<std::string> ingredient_labels(const RecipeTree& tree) {
    return element_set(tree).ingredients;
}

// Drops every leaf carrying `label`, then repeatedly removes actions left
// without children. Surviving children of a removed action would be
// reconnected to its parent, but an action is only removed once no children
// remain, so the reconnection set is always empty here.
void remove_ingredient(RecipeTree& tree, const std::string& label) {
    std::vector<std::string> doomed;
    for (const auto& [id, node] : tree.nodes) {
        if (node.kind == NodeKind::ingredient && node.label == label) doomed.push_back(id);
    }
    for (const auto& id : doomed) {
        tree.nodes.erase(id);
        tree.parent.erase(id);
    }
    bool pruned = true;
    while (pruned) {
        pruned = false;
        std::string childless;
        for (const auto& [id, node] : tree.nodes) {
            if (node.kind == NodeKind::action && tree.children(id).empty()) {
                childless = id;
                pruned = true;
                break;
            }
        }
        if (pruned) {
            tree.nodes.erase(childless);
            tree.parent.erase(childless);
        }
    }
}

}  // namespace

std::pair<RecipeTree, ValueVerdict> enforce_value(const RecipeTree& tree, const PairingTable& table,
                                                  double threshold, ValuePolicy policy,
                                                  const std::map<std::string, int>* corpus_frequency) {
    ValueVerdict verdict;
    for (const auto& label : ingredient_labels(tree)) {
        if (!table.known(label)) verdict.unknown.insert(label);
    }

    RecipeTree work = tree;
    while (true) {
        std::vector<std::string> labels;
        for (const auto& label : ingredient_labels(work)) labels.push_back(label);

        std::map<std::string, int> low_counts;
        int low_pairs = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            for (std::size_t j = i + 1; j < labels.size(); ++j) {
                if (verdict.unknown.count(labels[i]) || verdict.unknown.count(labels[j])) continue;
                if (pairing_score(labels[i], labels[j], table) < threshold) {
                    ++low_pairs;
                    ++low_counts[labels[i]];
                    ++low_counts[labels[j]];
                }
            }
        }
        if (low_pairs == 0) break;

        if (policy == ValuePolicy::reject) {
            verdict.rejected = true;
            return {tree, verdict};
        }
        if (labels.size() <= 2) {
            // removal would leave a single ingredient; not a recipe any more
            verdict.rejected = true;
            return {tree, verdict};
        }

        std::string victim;
        int victim_count = -1;
        auto freq_of = [&](const std::string& label) {
            if (!corpus_frequency) return 0;
            auto it = corpus_frequency->find(label);
            return it == corpus_frequency->end() ? 0 : it->second;
        };
        for (const auto& [label, count] : low_counts) {
            if (count > victim_count ||
                (count == victim_count && freq_of(label) < freq_of(victim)) ||
                (count == victim_count && freq_of(label) == freq_of(victim) && label < victim)) {
                victim = label;
                victim_count = count;
            }
        }
        remove_ingredient(work, victim);
        verdict.removed.emplace_back(victim, victim_count);
    }

    verdict.kept = ingredient_labels(work);
    verdict.min_pair_score_after = 1.0;
    std::vector<std::string> kept(verdict.kept.begin(), verdict.kept.end());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t j = i + 1; j < kept.size(); ++j) {
            if (verdict.unknown.count(kept[i]) || verdict.unknown.count(kept[j])) continue;
            verdict.min_pair_score_after =
                std::min(verdict.min_pair_score_after, pairing_score(kept[i], kept[j], table));
        }
    }
    return {work, verdict};
}

}  // namespace treeblend
