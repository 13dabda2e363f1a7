#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeblend/corpus.hpp"

namespace treeblend {

enum class DistanceMetric { euclidean, cosine };

// Cosine distance is 1 - similarity; a zero-norm vector has similarity 0 with
// everything, hence distance 1.
double embedding_distance(const std::vector<double>& a, const std::vector<double>& b,
                          DistanceMetric metric);

// Seed selection for one dish: n_random ids drawn uniformly without
// replacement, then n_diverse ids chosen greedily, each maximizing its minimum
// distance to the set {embedding centroid} ∪ {everything selected so far}.
// The centroid averages every record, selected or not. When the pool is
// smaller than the request, all ids come back. Ties inside the greedy phase
// resolve to the earliest record in input order. Throws when a record lacks an
// embedding or lengths disagree.
std::vector<std::string> sample_seeds(const std::vector<const RecipeRecord*>& records,
                                      std::size_t n_random = 15, std::size_t n_diverse = 15,
                                      std::uint64_t rng_seed = 0,
                                      DistanceMetric metric = DistanceMetric::euclidean);

}  // namespace treeblend
