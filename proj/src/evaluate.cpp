#include "treeblend/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

namespace treeblend {

std::vector<EvaluatedCandidate> evaluate(const std::vector<BlendCandidate>& candidates,
                                         const PairingTable& table, const NoveltyIndex& index,
                                         double threshold, ValuePolicy policy,
                                         const std::map<std::string, int>* corpus_frequency) {
    std::vector<std::optional<EvaluatedCandidate>> slots(candidates.size());
    auto score_one = [&](std::size_t i) {
        auto [repaired, verdict] =
            enforce_value(candidates[i].tree, table, threshold, policy, corpus_frequency);
        if (verdict.rejected) return;
        EvaluatedCandidate out;
        out.candidate = candidates[i];
        out.candidate.tree = std::move(repaired);
        out.verdict = std::move(verdict);
        out.novelty = tree_novelty(out.candidate.tree, index);
        slots[i] = std::move(out);
    };

    const std::size_t workers =
        std::min<std::size_t>({candidates.size(),
                               std::max(1u, std::thread::hardware_concurrency()), 8});
    if (workers <= 1) {
        for (std::size_t i = 0; i < candidates.size(); ++i) score_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < candidates.size(); i = next++) {
                    try {
                        score_one(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<EvaluatedCandidate> ranked;
    for (auto& slot : slots)
        if (slot) ranked.push_back(std::move(*slot));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.novelty != b.novelty) return a.novelty > b.novelty;
        return a.candidate.id < b.candidate.id;
    });
    return ranked;
}

}  // namespace treeblend
