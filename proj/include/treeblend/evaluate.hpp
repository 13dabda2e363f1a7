#pragma once

#include <vector>

#include "treeblend/novelty.hpp"
#include "treeblend/pairing.hpp"
#include "treeblend/recombine.hpp"

namespace treeblend {

struct EvaluatedCandidate {
    BlendCandidate candidate;  // tree replaced by its repaired form
    ValueVerdict verdict;
    double novelty = 0.0;
};

// Runs every candidate through the value filter, scores survivors with
// tree_novelty on the repaired tree, and sorts descending by novelty with
// ties broken by id. Rejected candidates are dropped. Candidates are scored
// concurrently; the result order never depends on scheduling.
std::vector<EvaluatedCandidate> evaluate(
    const std::vector<BlendCandidate>& candidates, const PairingTable& table,
    const NoveltyIndex& index, double threshold = 0.3,
    ValuePolicy policy = ValuePolicy::repair,
    const std::map<std::string, int>* corpus_frequency = nullptr);

}  // namespace treeblend
