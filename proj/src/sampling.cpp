#include "treeblend/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "treeblend/util.hpp"

namespace treeblend {

double embedding_distance(const std::vector<double>& a, const std::vector<double>& b,
                          DistanceMetric metric) {
    if (a.size() != b.size())
        throw std::invalid_argument("embedding lengths disagree: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    if (metric == DistanceMetric::euclidean) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(sum);
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> sample_seeds(const std::vector<const RecipeRecord*>& records,
                                      std::size_t n_random, std::size_t n_diverse,
                                      std::uint64_t rng_seed, DistanceMetric metric) {
    if (records.empty()) return {};
    std::size_t dim = 0;
    for (const auto* r : records) {
        if (!r->embedding)
            throw std::runtime_error("recipe \"" + r->recipe_id + "\" has no embedding");
        if (dim == 0) dim = r->embedding->size();
        if (r->embedding->size() != dim)
            throw std::runtime_error("recipe \"" + r->recipe_id + "\" embedding length " +
                                     std::to_string(r->embedding->size()) +
                                     " disagrees with the pool's " + std::to_string(dim));
    }

    std::vector<std::string> out;
    if (records.size() < n_random + n_diverse) {
        for (const auto* r : records) out.push_back(r->recipe_id);
        return out;
    }

    Rng rng(rng_seed);
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    fisher_yates_shuffle(order, rng);

    std::vector<bool> selected(records.size(), false);
    for (std::size_t i = 0; i < n_random; ++i) {
        selected[order[i]] = true;
        out.push_back(records[order[i]]->recipe_id);
    }

    std::vector<double> centroid(dim, 0.0);
    for (const auto* r : records)
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += (*r->embedding)[d];
    for (double& c : centroid) c /= static_cast<double>(records.size());

    // min distance of each unselected point to {centroid} ∪ selected, updated
    // incrementally as picks accumulate
    std::vector<double> min_dist(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        min_dist[i] = embedding_distance(*records[i]->embedding, centroid, metric);
        for (std::size_t j = 0; j < records.size(); ++j)
            if (selected[j])
                min_dist[i] = std::min(
                    min_dist[i],
                    embedding_distance(*records[i]->embedding, *records[j]->embedding, metric));
    }

    for (std::size_t pick = 0; pick < n_diverse; ++pick) {
        std::size_t best = records.size();
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (selected[i]) continue;
            if (best == records.size() || min_dist[i] > min_dist[best]) best = i;
        }
        selected[best] = true;
        out.push_back(records[best]->recipe_id);
        for (std::size_t i = 0; i < records.size(); ++i)
            if (!selected[i])
                min_dist[i] = std::min(
                    min_dist[i],
                    embedding_distance(*records[i]->embedding, *records[best]->embedding, metric));
    }
    return out;
}

}  // namespace treeblend
