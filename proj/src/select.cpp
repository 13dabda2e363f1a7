#include "treeblend/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "treeblend/util.hpp"

namespace treeblend {

namespace {

// novelty desc, then fraction balance, then id
bool ranked_before(const ScoredCandidate& x, const ScoredCandidate& y) {
    if (x.novelty != y.novelty) return x.novelty > y.novelty;
    const double bx = std::abs(x.source_fraction - x.target_fraction);
    const double by = std::abs(y.source_fraction - y.target_fraction);
    if (bx != by) return bx < by;
    return x.id < y.id;
}

}  // namespace

std::map<DishPair, std::vector<ScoredCandidate>> top_k_per_pair(
    const std::vector<ScoredCandidate>& candidates, std::size_t k) {
    std::map<DishPair, std::vector<ScoredCandidate>> groups;
    for (const auto& c : candidates) {
        DishPair key = c.dish_a <= c.dish_b ? DishPair{c.dish_a, c.dish_b}
                                            : DishPair{c.dish_b, c.dish_a};
        groups[key].push_back(c);
    }
    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(), ranked_before);
        if (group.size() > k) group.resize(k);
    }
    return groups;
}

AnnealResult anneal_select(const std::vector<ScoredCandidate>& pool, const AnnealConfig& cfg) {
    if (cfg.max_per_dish == 0) throw std::invalid_argument("max_per_dish must be positive");
    if (cfg.steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (cfg.initial_temperature <= 0.0)
        throw std::invalid_argument("initial_temperature must be positive");
    if (cfg.cooling_rate <= 0.0 || cfg.cooling_rate >= 1.0)
        throw std::invalid_argument("cooling_rate must lie in (0, 1)");
    if (pool.size() < cfg.target_size)
        throw std::runtime_error("pool holds " + std::to_string(pool.size()) +
                                 " candidates; cannot select " + std::to_string(cfg.target_size));

    std::map<std::string, std::size_t> usage;
    auto fits = [&](const ScoredCandidate& c) {
        if (usage[c.dish_a] + 1 > cfg.max_per_dish) return false;
        if (c.dish_b != c.dish_a && usage[c.dish_b] + 1 > cfg.max_per_dish) return false;
        return true;
    };
    auto charge = [&](const ScoredCandidate& c, int sign) {
        usage[c.dish_a] += static_cast<std::size_t>(sign);
        if (c.dish_b != c.dish_a) usage[c.dish_b] += static_cast<std::size_t>(sign);
    };

    // greedy start: walk the ranked pool, taking whatever the caps allow
    std::vector<std::size_t> ranked(pool.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    std::sort(ranked.begin(), ranked.end(),
              [&](std::size_t a, std::size_t b) { return ranked_before(pool[a], pool[b]); });
    std::vector<std::size_t> sel, unsel;
    for (std::size_t idx : ranked) {
        if (sel.size() < cfg.target_size && fits(pool[idx])) {
            charge(pool[idx], +1);
            sel.push_back(idx);
        } else {
            unsel.push_back(idx);
        }
    }
    if (sel.size() < cfg.target_size)
        throw std::runtime_error("caps admit no selection of size " +
                                 std::to_string(cfg.target_size) + "; greedy reached " +
                                 std::to_string(sel.size()));

    auto exact_objective = [&](const std::vector<std::size_t>& ids) {
        double sum = 0.0;
        for (std::size_t i : ids) sum += pool[i].novelty;
        return sum;
    };
    const double greedy_objective = exact_objective(sel);

    Rng rng(cfg.rng_seed);
    double temperature = cfg.initial_temperature;
    double objective = greedy_objective;
    std::vector<std::size_t> best = sel;
    double best_objective = objective;

    // size_t usage arithmetic never underflows here: uncharge always follows a
    // matching charge
    auto swap_fits = [&](std::size_t out_idx, std::size_t in_idx) {
        charge(pool[out_idx], -1);
        const bool ok = fits(pool[in_idx]);
        charge(pool[out_idx], +1);
        return ok;
    };

    for (std::size_t step = 0; step < cfg.steps && !sel.empty() && !unsel.empty(); ++step) {
        const std::size_t si = bounded_uint(rng, sel.size());
        const std::size_t ui = bounded_uint(rng, unsel.size());
        if (swap_fits(sel[si], unsel[ui])) {
            const double delta = pool[unsel[ui]].novelty - pool[sel[si]].novelty;
            if (delta >= 0.0 || unit_real(rng) < std::exp(delta / temperature)) {
                charge(pool[sel[si]], -1);
                charge(pool[unsel[ui]], +1);
                std::swap(sel[si], unsel[ui]);
                objective += delta;
                if (objective > best_objective) {
                    best = sel;
                    best_objective = objective;
                }
            }
        }
        temperature *= cfg.cooling_rate;
    }

    AnnealResult result;
    for (std::size_t i : best) result.selected_ids.push_back(pool[i].id);
    std::sort(result.selected_ids.begin(), result.selected_ids.end());
    result.objective = exact_objective(best);
    result.greedy_objective = greedy_objective;
    return result;
}

}  // namespace treeblend
