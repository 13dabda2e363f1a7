#include "treeblend/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace treeblend {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char raw : text) {
        const auto ch = static_cast<unsigned char>(raw);
        if (std::isspace(ch) || std::ispunct(ch)) {
            if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     int n) {
    std::map<std::vector<std::string>, int> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i) + n)];
    return counts;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references, int max_n) {
    if (references.empty()) throw std::invalid_argument("BLEU needs at least one reference");
    const std::size_t c = candidate.size();
    std::size_t r = references.front().size();
    for (const auto& ref : references) {
        const auto gap = [&](std::size_t len) { return len > c ? len - c : c - len; };
        if (gap(ref.size()) < gap(r) || (gap(ref.size()) == gap(r) && ref.size() < r))
            r = ref.size();
    }

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        const auto cand = ngram_counts(candidate, n);
        std::map<std::vector<std::string>, int> clip;
        for (const auto& ref : references)
            for (const auto& [gram, count] : ngram_counts(ref, n))
                clip[gram] = std::max(clip[gram], count);
        long long total = 0, matched = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            auto it = clip.find(gram);
            if (it != clip.end()) matched += std::min(count, it->second);
        }
        double p;
        if (total == 0)
            p = 1.0;
        else if (matched == 0)
            p = 1.0 / (static_cast<double>(total) + 1.0);
        else
            p = static_cast<double>(matched) / static_cast<double>(total);
        log_sum += std::log(p) / max_n;
    }

    double brevity;
    if (c == 0)
        brevity = r == 0 ? 1.0 : 0.0;
    else if (c > r)
        brevity = 1.0;
    else
        brevity = std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
    return brevity * std::exp(log_sum);
}

double self_bleu(const std::vector<std::string>& texts, int max_n) {
    if (texts.size() < 2) throw std::invalid_argument("self-BLEU needs at least two texts");
    if (max_n < 2 || max_n > 4) throw std::invalid_argument("max_n must be 2, 3, or 4");
    std::vector<std::vector<std::string>> tokenized;
    tokenized.reserve(texts.size());
    for (const auto& t : texts) tokenized.push_back(tokenize(t));

    double sum = 0.0;
    for (std::size_t i = 0; i < tokenized.size(); ++i) {
        std::vector<std::vector<std::string>> references;
        for (std::size_t j = 0; j < tokenized.size(); ++j)
            if (j != i) references.push_back(tokenized[j]);
        sum += bleu_score(tokenized[i], references, max_n);
    }
    return sum / static_cast<double>(texts.size());
}

TreeDiversity pairwise_tree_diversity(const std::vector<RecipeTree>& trees,
                                      const CostScheme& costs) {
    if (trees.size() < 2)
        throw std::invalid_argument("tree diversity needs at least two trees");
    TreeDiversity out;
    const std::size_t n = trees.size();
    out.matrix.assign(n, std::vector<double>(n, 0.0));
    std::vector<OrderedTree> ordered;
    ordered.reserve(n);
    for (const auto& t : trees) ordered.push_back(order_siblings(t));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = normalized_distance(ordered[i], ordered[j], costs);
            out.matrix[i][j] = out.matrix[j][i] = d;
            sum += d;
        }
    }
    out.mean = sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
    return out;
}

SimilarityStats embedding_similarity_stats(const std::vector<std::vector<double>>& vectors) {
    if (vectors.size() < 2)
        throw std::invalid_argument("similarity stats need at least two vectors");
    const std::size_t n = vectors.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors[i].size() != vectors[0].size())
            throw std::invalid_argument("vector " + std::to_string(i) + " has length " +
                                        std::to_string(vectors[i].size()) + "; expected " +
                                        std::to_string(vectors[0].size()));
        double norm = 0.0;
        for (double v : vectors[i]) norm += v * v;
        if (norm == 0.0)
            throw std::invalid_argument("vector " + std::to_string(i) + " has zero norm");
    }

    SimilarityStats out;
    out.matrix.assign(n, std::vector<double>(n, 1.0));
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = cosine(vectors[i], vectors[j]);
            out.matrix[i][j] = out.matrix[j][i] = s;
            values.push_back(s);
        }
    }
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

std::vector<std::pair<std::size_t, double>> nearest_corpus_similarity(
    const std::vector<std::vector<double>>& vectors,
    const std::vector<std::vector<double>>& corpus_vectors) {
    if (corpus_vectors.empty())
        throw std::invalid_argument("nearest-neighbor scan needs a nonempty corpus");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(vectors.size());
    for (const auto& q : vectors) {
        std::size_t best = 0;
        double best_sim = cosine(q, corpus_vectors[0]);
        for (std::size_t i = 1; i < corpus_vectors.size(); ++i) {
            const double s = cosine(q, corpus_vectors[i]);
            if (s > best_sim) {
                best = i;
                best_sim = s;
            }
        }
        out.emplace_back(best, best_sim);
    }
    return out;
}

std::map<std::string, double> ingredient_histogram(const std::vector<RecipeRecord>& recipes) {
    std::map<std::string, double> out;
    if (recipes.empty()) return out;
    for (const auto& r : recipes) {
        std::set<std::string> labels;
        if (r.tree) {
            for (const auto& [id, node] : r.tree->nodes)
                if (node.kind == NodeKind::ingredient) labels.insert(node.label);
        } else {
            labels.insert(r.ingredients.begin(), r.ingredients.end());
        }
        for (const auto& label : labels) out[label] += 1.0;
    }
    for (auto& [label, count] : out) count /= static_cast<double>(recipes.size());
    return out;
}

std::string matrix_to_csv(const std::vector<std::vector<double>>& matrix) {
    std::string out;
    for (std::size_t j = 0; j < (matrix.empty() ? 0 : matrix[0].size()); ++j)
        out += "," + std::to_string(j);
    out += "\n";
    char cell[64];
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out += std::to_string(i);
        for (const double v : matrix[i]) {
            std::snprintf(cell, sizeof(cell), ",%.17g", v);
            out += cell;
        }
        out += "\n";
    }
    return out;
}

}  // namespace treeblend
