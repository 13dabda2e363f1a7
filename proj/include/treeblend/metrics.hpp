#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "treeblend/corpus.hpp"
#include "treeblend/edit_distance.hpp"
#include "treeblend/tree.hpp"

namespace treeblend {

// Lowercases, then splits on whitespace and punctuation; punctuation is
// dropped, so "Mix, then BAKE!" becomes {mix, then, bake}.
std::vector<std::string> tokenize(const std::string& text);

// BLEU of one candidate against a reference set, pinned so reported numbers
// are reproducible: uniform 1/max_n weights; clipped modified precision;
// add-one smoothing only on n-gram levels with zero matches (p = (m+1)/(t+1));
// a level with no candidate n-grams scores 1; brevity penalty against the
// closest reference length, ties to the shorter.
double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references, int max_n);

// Mean over texts of each text's BLEU against all the others. Throws on fewer
// than two texts or max_n outside {2, 3, 4}.
double self_bleu(const std::vector<std::string>& texts, int max_n = 4);

struct TreeDiversity {
    double mean = 0.0;
    std::vector<std::vector<double>> matrix;  // symmetric, zero diagonal
};

// Normalized edit distance over all unordered pairs; the mean excludes the
// diagonal. Throws on fewer than two trees.
TreeDiversity pairwise_tree_diversity(const std::vector<RecipeTree>& trees,
                                      const CostScheme& costs = {});

struct SimilarityStats {
    double mean = 0.0;
    double stddev = 0.0;  // population form over unordered pairs
    std::vector<std::vector<double>> matrix;  // symmetric, unit diagonal
};

// Cosine similarity over all unordered pairs, diagonal excluded from the
// moments. Throws on fewer than two vectors, length mismatch, or a zero
// vector (named by index).
SimilarityStats embedding_similarity_stats(const std::vector<std::vector<double>>& vectors);

// Best cosine match in the corpus per query, by linear scan: (corpus index,
// similarity). A zero-norm side scores 0 rather than erroring. Throws when
// the corpus is empty.
std::vector<std::pair<std::size_t, double>> nearest_corpus_similarity(
    const std::vector<std::vector<double>>& vectors,
    const std::vector<std::vector<double>>& corpus_vectors);

// Fraction of recipes containing each ingredient label, one count per recipe.
// A record with a tree contributes the tree's ingredient labels; a treeless
// one falls back to its ingredient list.
std::map<std::string, double> ingredient_histogram(const std::vector<RecipeRecord>& recipes);

// CSV renderers for the matrix-valued metrics; row/column order follows input
// order and the header row carries indices.
std::string matrix_to_csv(const std::vector<std::vector<double>>& matrix);

}  // namespace treeblend
