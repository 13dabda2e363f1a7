// Python bindings for the blending engine. Trees cross the boundary as an
// opaque Tree holder; everything bulky (corpora, indexes, tables) stays in
// C++ and is addressed by path or handle.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treeblend/corpus.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/edit_distance.hpp"
#include "treeblend/metrics.hpp"
#include "treeblend/novelty.hpp"
#include "treeblend/pairing.hpp"
#include "treeblend/pipeline.hpp"
#include "treeblend/recombine.hpp"
#include "treeblend/tree.hpp"

namespace py = pybind11;
using namespace treeblend;

namespace {

RecipeTree tree_from_dot(const std::string& text) {
    auto result = parse_dot(text, ActionHierarchy::builtin());
    if (!result.ok()) throw std::invalid_argument(result.report.summary());
    return std::move(*result.tree);
}

ValuePolicy policy_from(const std::string& name) {
    if (name == "repair") return ValuePolicy::repair;
    if (name == "reject") return ValuePolicy::reject;
    throw std::invalid_argument("policy must be repair or reject, got \"" + name + "\"");
}

BlendDirection direction_from(const std::string& name) {
    if (name == "a_to_b") return BlendDirection::a_to_b;
    if (name == "b_to_a") return BlendDirection::b_to_a;
    if (name == "both") return BlendDirection::both;
    throw std::invalid_argument("direction must be a_to_b, b_to_a, or both");
}

py::dict verdict_to_dict(const ValueVerdict& verdict) {
    py::dict out;
    out["kept"] = std::vector<std::string>(verdict.kept.begin(), verdict.kept.end());
    py::list removed;
    for (const auto& [label, clashes] : verdict.removed)
        removed.append(py::make_tuple(label, clashes));
    out["removed"] = removed;
    out["min_pair_score_after"] = verdict.min_pair_score_after;
    out["rejected"] = verdict.rejected;
    out["unknown"] =
        std::vector<std::string>(verdict.unknown.begin(), verdict.unknown.end());
    return out;
}

}  // namespace

PYBIND11_MODULE(_treeblend, m) {
    m.doc() = "recipe idea blending engine";

    py::class_<RecipeTree>(m, "Tree")
        .def_static("from_dot", &tree_from_dot, py::arg("text"))
        .def_static(
            "from_json",
            [](const std::string& text) { return tree_from_json(text); },
            py::arg("text"))
        .def("to_dot", [](const RecipeTree& t) { return serialize_dot(t); })
        .def("to_json", [](const RecipeTree& t) { return tree_to_json(t); })
        .def_property_readonly("title", [](const RecipeTree& t) { return t.title; })
        .def_property_readonly("size", [](const RecipeTree& t) { return t.size(); })
        .def_property_readonly("root",
                               [](const RecipeTree& t) { return t.root_id(); })
        .def("ingredients",
             [](const RecipeTree& t) {
                 const auto elements = element_set(t);
                 return std::vector<std::string>(elements.ingredients.begin(),
                                                 elements.ingredients.end());
             })
        .def("actions",
             [](const RecipeTree& t) {
                 const auto elements = element_set(t);
                 return std::vector<std::string>(elements.actions.begin(),
                                                 elements.actions.end());
             })
        .def("__repr__", [](const RecipeTree& t) {
            return "<Tree \"" + t.title + "\", " + std::to_string(t.size()) + " nodes>";
        });

    m.def(
        "tree_distance",
        [](const RecipeTree& a, const RecipeTree& b, bool normalized) {
            const OrderedTree oa = order_siblings(a);
            const OrderedTree ob = order_siblings(b);
            const CostScheme costs;
            return normalized ? normalized_distance(oa, ob, costs)
                              : distance(oa, ob, costs).first;
        },
        py::arg("a"), py::arg("b"), py::arg("normalized") = false,
        "Minimal typed edit distance between two trees under default costs.");

    m.def(
        "edit_script",
        [](const RecipeTree& a, const RecipeTree& b) {
            const auto [dist, script] =
                distance(order_siblings(a), order_siblings(b), CostScheme{});
            py::list ops;
            for (const auto& op : script.ops) {
                py::dict row;
                row["kind"] = to_string(op.kind);
                row["source_id"] = op.source_id ? py::cast(*op.source_id) : py::none();
                row["target_id"] = op.target_id ? py::cast(*op.target_id) : py::none();
                row["cost"] = op.cost;
                ops.append(row);
            }
            py::dict out;
            out["total_cost"] = script.total_cost;
            out["ops"] = ops;
            out["mapping"] = script.mapping;
            return out;
        },
        py::arg("a"), py::arg("b"),
        "One minimal edit script from a to b with its full node mapping.");

    m.def(
        "blend",
        [](const RecipeTree& a, const RecipeTree& b, std::uint64_t seed,
           double min_fraction, int intermediates_per_pair, const std::string& direction) {
            BlendConstraints constraints;
            constraints.min_fraction_per_source = min_fraction;
            constraints.intermediates_per_pair = intermediates_per_pair;
            constraints.direction = direction_from(direction);
            py::list out;
            for (auto& c : intermediates(a, b, constraints, CostScheme{}, seed)) {
                py::dict row;
                row["id"] = c.id;
                row["tree"] = py::cast(c.tree);
                row["applied_ops"] = c.applied_ops;
                row["fraction_from_source"] = c.fraction_from_source;
                row["fraction_from_target"] = c.fraction_from_target;
                out.append(row);
            }
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("seed"), py::arg("min_fraction") = 0.30,
        py::arg("intermediates_per_pair") = 6, py::arg("direction") = "a_to_b",
        "Blended intermediate trees along one shuffled edit script.");

    py::class_<PairingTable>(m, "PairingTable")
        .def_static("from_csv_files", &PairingTable::from_csv_files,
                    py::arg("molecules_path"), py::arg("composites_path"))
        .def("known", &PairingTable::known, py::arg("label"));

    m.def("pairing_score", &pairing_score, py::arg("a"), py::arg("b"), py::arg("table"),
          "Jaccard molecule overlap; composites score as their worst raw pair.");

    m.def(
        "enforce_value",
        [](const RecipeTree& tree, const PairingTable& table, double threshold,
           const std::string& policy) {
            auto [repaired, verdict] =
                enforce_value(tree, table, threshold, policy_from(policy));
            return py::make_tuple(py::cast(std::move(repaired)), verdict_to_dict(verdict));
        },
        py::arg("tree"), py::arg("table"), py::arg("threshold") = 0.3,
        py::arg("policy") = "repair",
        "Iteratively removes clashing ingredients; returns (repaired tree, verdict).");

    py::class_<NoveltyIndex>(m, "NoveltyIndex")
        .def_property_readonly("corpus_size",
                               [](const NoveltyIndex& i) { return i.corpus_size; })
        .def_property_readonly("min_support",
                               [](const NoveltyIndex& i) { return i.min_support; })
        .def_property_readonly("warnings",
                               [](const NoveltyIndex& i) { return i.warnings; })
        .def("element_df",
             [](const NoveltyIndex& index, const std::string& kind,
                const std::string& label) {
                 const Element e{kind == "action" ? NodeKind::action
                                                  : NodeKind::ingredient,
                                 label};
                 const auto it = index.element_df.find(e);
                 return it == index.element_df.end() ? 0 : it->second;
             },
             py::arg("kind"), py::arg("label"))
        .def("save", &save_index, py::arg("path"));

    m.def(
        "build_index",
        [](const std::string& corpus_path, int min_support) {
            return build_index(load_corpus(corpus_path), min_support);
        },
        py::arg("corpus_path"), py::arg("min_support") = 5,
        "Element and pair document frequencies over a corpus file.");
    m.def("load_index", &load_index, py::arg("path"));
    m.def("tree_novelty", &tree_novelty, py::arg("tree"), py::arg("index"),
          "Sum of the ten largest element novelties of the tree.");

    m.def("tokenize", &tokenize, py::arg("text"));
    m.def("bleu_score", &bleu_score, py::arg("candidate"), py::arg("references"),
          py::arg("max_n") = 4,
          "Pinned BLEU of a token list against reference token lists.");
    m.def("self_bleu", &self_bleu, py::arg("texts"), py::arg("max_n") = 4,
          "Mean BLEU of each text against all the others.");

    m.def(
        "run_pipeline",
        [](const std::string& config_path) {
            const PipelineSummary summary = run_pipeline_file(config_path);
            py::dict out;
            out["out_dir"] = summary.out_dir.string();
            out["stages_run"] = summary.stages_run;
            out["stages_skipped"] = summary.stages_skipped;
            out["trees"] = summary.tree_count;
            out["candidates"] = summary.candidate_count;
            out["ranked"] = summary.ranked_count;
            out["selected"] = summary.selected_count;
            out["recipes"] = summary.recipe_count;
            out["warnings"] = summary.warnings;
            return out;
        },
        py::arg("config_path"),
        "Executes the staged pipeline from a config file; returns the summary.");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);
}
