#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace treeblend {

// The selector only needs scores and dish tags, not the trees themselves.
struct ScoredCandidate {
    std::string id;
    std::string dish_a;
    std::string dish_b;
    double novelty = 0.0;
    // parent-material fractions, kept for tie-breaking
    double source_fraction = 0.0;
    double target_fraction = 0.0;
};

using DishPair = std::pair<std::string, std::string>;

// The k highest-novelty candidates per dish pair. Ties prefer the candidate
// whose two fractions are closer to balanced, then the smaller id.
std::map<DishPair, std::vector<ScoredCandidate>> top_k_per_pair(
    const std::vector<ScoredCandidate>& candidates, std::size_t k = 5);

struct AnnealConfig {
    std::size_t target_size = 100;
    // Appearance cap per dish; a candidate charges both of its dishes. No
    // default: the cap is an experiment parameter the caller must choose.
    std::size_t max_per_dish = 0;
    double initial_temperature = 1.0;
    double cooling_rate = 0.995;
    std::size_t steps = 50000;
    std::uint64_t rng_seed = 0;
};

struct AnnealResult {
    std::vector<std::string> selected_ids;  // sorted
    double objective = 0.0;
    double greedy_objective = 0.0;
};

// Maximizes total novelty of a target_size subset under the per-dish caps.
// Start = greedy by novelty skipping cap violations; moves = single
// feasibility-preserving swaps accepted by the Metropolis rule under geometric
// cooling; the best feasible selection ever seen is returned, so the result
// never scores below the greedy start. Throws std::invalid_argument on bad
// config and std::runtime_error when no feasible selection of target_size can
// be constructed.
AnnealResult anneal_select(const std::vector<ScoredCandidate>& pool, const AnnealConfig& cfg);

}  // namespace treeblend
