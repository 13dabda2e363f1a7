#include "treeblend/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

namespace treeblend {

namespace {

std::string element_name(const Element& e) {
    return (e.first == NodeKind::ingredient ? "ingredient \"" : "action \"") + e.second + "\"";
}

double top_ten_sum(std::vector<double>& values) {
    std::sort(values.begin(), values.end(), std::greater<>());
    if (values.size() > 10) values.resize(10);
    return std::accumulate(values.begin(), values.end(), 0.0);
}

}  // namespace

std::set<Element> tree_elements(const RecipeTree& tree) {
    std::set<Element> out;
    for (const auto& [id, node] : tree.nodes) out.insert({node.kind, node.label});
    return out;
}

UnknownElement::UnknownElement(Element e)
    : std::runtime_error(element_name(e) + " is not in the novelty index"), element(std::move(e)) {}

bool NoveltyIndex::scorable(const Element& e) const {
    auto it = element_df.find(e);
    return it != element_df.end() && it->second >= min_support;
}

int NoveltyIndex::pair_count(const Element& a, const Element& b) const {
    auto it = pair_df.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    return it == pair_df.end() ? 0 : it->second;
}

NoveltyIndex build_index(const RecipeCorpus& corpus, int min_support) {
    if (min_support < 1) throw std::invalid_argument("min_support must be at least 1");
    NoveltyIndex index;
    index.min_support = min_support;
    for (const auto& [id, record] : corpus.records()) {
        if (!record.tree) {
            index.warnings.push_back("recipe \"" + id + "\" has no tree; skipped");
            continue;
        }
        ++index.corpus_size;
        const auto elems = tree_elements(*record.tree);
        for (const auto& e : elems) ++index.element_df[e];
        for (auto i = elems.begin(); i != elems.end(); ++i)
            for (auto j = std::next(i); j != elems.end(); ++j) ++index.pair_df[{*i, *j}];
    }
    return index;
}

double idf(const Element& e, const Element& e_prime, const NoveltyIndex& index) {
    for (const Element* side : {&e, &e_prime}) {
        if (!index.indexed(*side)) throw UnknownElement(*side);
        if (!index.scorable(*side))
            throw std::domain_error(element_name(*side) + " sits below the support floor");
    }
    const double n = index.element_df.at(e);
    double df = index.pair_count(e, e_prime);
    if (df == 0.0) df = 1.0;
    return std::max(0.0, std::log(n / df));
}

double element_novelty(const Element& e, const RecipeTree& tree, const NoveltyIndex& index) {
    if (!index.scorable(e)) return 0.0;
    std::vector<double> values;
    for (const auto& other : tree_elements(tree)) {
        if (other == e || !index.scorable(other)) continue;
        values.push_back(idf(e, other, index));
    }
    return top_ten_sum(values);
}

double tree_novelty(const RecipeTree& tree, const NoveltyIndex& index) {
    std::vector<double> values;
    for (const auto& e : tree_elements(tree)) values.push_back(element_novelty(e, tree, index));
    return top_ten_sum(values);
}

// On-disk layout, all integers little-endian:
//   magic "TBNI", u32 version, u64 corpus_size, u64 min_support,
//   u64 element count, then per element: u8 kind, u32 label length, label
//   bytes, u64 df; u64 pair count, then per pair: u64 index of each side in
//   the element table (table order), u64 df.
namespace {

constexpr char kMagic[4] = {'T', 'B', 'N', 'I'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_index(const NoveltyIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write novelty index to " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, static_cast<std::uint64_t>(index.corpus_size));
    put_u64(out, static_cast<std::uint64_t>(index.min_support));

    std::map<Element, std::uint64_t> position;
    put_u64(out, index.element_df.size());
    for (const auto& [e, df] : index.element_df) {
        position[e] = position.size();
        out.put(e.first == NodeKind::ingredient ? '\x00' : '\x01');
        put_u32(out, static_cast<std::uint32_t>(e.second.size()));
        out.write(e.second.data(), static_cast<std::streamsize>(e.second.size()));
        put_u64(out, static_cast<std::uint64_t>(df));
    }
    put_u64(out, index.pair_df.size());
    for (const auto& [pair, df] : index.pair_df) {
        put_u64(out, position.at(pair.first));
        put_u64(out, position.at(pair.second));
        put_u64(out, static_cast<std::uint64_t>(df));
    }
    if (!out) throw std::runtime_error("short write while saving novelty index to " + path);
}

NoveltyIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open novelty index " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || !std::equal(magic, magic + 4, kMagic))
        throw std::runtime_error(path + " is not a novelty index file");
    const auto version = get_u32(in);
    if (version != kVersion)
        throw std::runtime_error(path + " has novelty index version " + std::to_string(version) +
                                 "; this build reads version " + std::to_string(kVersion));

    NoveltyIndex index;
    index.corpus_size = static_cast<int>(get_u64(in));
    index.min_support = static_cast<int>(get_u64(in));

    const auto n_elements = get_u64(in);
    std::vector<Element> table;
    table.reserve(n_elements);
    for (std::uint64_t i = 0; i < n_elements; ++i) {
        const int kind_byte = in.get();
        const auto len = get_u32(in);
        std::string label(len, '\0');
        in.read(label.data(), static_cast<std::streamsize>(len));
        const auto df = get_u64(in);
        if (!in || (kind_byte != 0 && kind_byte != 1))
            throw std::runtime_error(path + ": truncated or corrupt element table");
        Element e{kind_byte == 0 ? NodeKind::ingredient : NodeKind::action, std::move(label)};
        index.element_df[e] = static_cast<int>(df);
        table.push_back(std::move(e));
    }
    const auto n_pairs = get_u64(in);
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
        const auto a = get_u64(in);
        const auto b = get_u64(in);
        const auto df = get_u64(in);
        if (!in || a >= table.size() || b >= table.size())
            throw std::runtime_error(path + ": truncated or corrupt pair table");
        index.pair_df[{table[a], table[b]}] = static_cast<int>(df);
    }
    return index;
}

}  // namespace treeblend
