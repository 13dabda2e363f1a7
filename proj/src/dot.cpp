#include "treeblend/dot.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

namespace {

enum class TokKind { identifier, string, symbol, arrow, end };

struct Token {
    TokKind kind;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space_and_comments();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) {
            tok.kind = TokKind::end;
            return tok;
        }
        char c = text_[pos_];
        if (c == '"') {
            tok.kind = TokKind::string;
            advance();
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    advance();
                    char esc = text_[pos_];
                    if (esc == 'n') {
                        out.push_back('\n');
                    } else {
                        out.push_back(esc);
                    }
                } else {
                    out.push_back(text_[pos_]);
                }
                advance();
            }
            if (pos_ >= text_.size()) throw DotSyntaxError("unterminated string", tok.line, tok.column);
            advance();  // closing quote
            tok.text = out;
            return tok;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            tok.kind = TokKind::arrow;
            tok.text = "->";
            advance();
            advance();
            return tok;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
            tok.kind = TokKind::identifier;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' || d == '-') {
                    if (d == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') break;
                    tok.text.push_back(d);
                    advance();
                } else {
                    break;
                }
            }
            return tok;
        }
        if (std::string("{}[];,=").find(c) != std::string::npos) {
            tok.kind = TokKind::symbol;
            tok.text = std::string(1, c);
            advance();
            return tok;
        }
        throw DotSyntaxError(std::string("unexpected character '") + c + "'", line_, column_);
    }

private:
    void advance() {
        if (pos_ < text_.size()) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                advance();
                advance();
                while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) advance();
                if (pos_ + 1 >= text_.size()) throw DotSyntaxError("unterminated comment", line_, column_);
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
public:
    Parser(const std::string& text, const ActionHierarchy& hierarchy)
        : lexer_(text), hierarchy_(hierarchy) {
        cur_ = lexer_.next();
    }

    DotGraph parse() {
        expect_keyword("digraph");
        if (cur_.kind == TokKind::identifier || cur_.kind == TokKind::string) {
            graph_.title = cur_.text;
            consume();
        }
        expect_symbol("{");
        while (!(cur_.kind == TokKind::symbol && cur_.text == "}")) {
            if (cur_.kind == TokKind::end)
                throw DotSyntaxError("unexpected end of input, missing '}'", cur_.line, cur_.column);
            statement();
        }
        consume();  // '}'
        return std::move(graph_);
    }

private:
    void consume() { cur_ = lexer_.next(); }

    bool at_symbol(const std::string& s) const {
        return cur_.kind == TokKind::symbol && cur_.text == s;
    }

    void expect_symbol(const std::string& s) {
        if (!at_symbol(s))
            throw DotSyntaxError("expected '" + s + "', got '" + cur_.text + "'", cur_.line, cur_.column);
        consume();
    }

    void expect_keyword(const std::string& kw) {
        if (cur_.kind != TokKind::identifier || to_lower(cur_.text) != kw)
            throw DotSyntaxError("expected '" + kw + "'", cur_.line, cur_.column);
        consume();
    }

    std::string expect_name() {
        if (cur_.kind != TokKind::identifier && cur_.kind != TokKind::string)
            throw DotSyntaxError("expected identifier or string, got '" + cur_.text + "'", cur_.line,
                                 cur_.column);
        std::string name = cur_.text;
        consume();
        return name;
    }

    std::map<std::string, std::string> attr_list() {
        std::map<std::string, std::string> attrs;
        expect_symbol("[");
        while (!at_symbol("]")) {
            std::string key = expect_name();
            expect_symbol("=");
            std::string value = expect_name();
            attrs[key] = value;
            if (at_symbol(",") || at_symbol(";")) consume();
        }
        consume();  // ']'
        return attrs;
    }

    void statement() {
        int line = cur_.line, column = cur_.column;
        std::string name = expect_name();

        if (at_symbol("=")) {
            // Graph-level attribute. `label` doubles as a title when the
            // digraph itself is unnamed.
            consume();
            std::string value = expect_name();
            if (graph_.title.empty() && to_lower(name) == "label") graph_.title = value;
            if (at_symbol(";")) consume();
            return;
        }

        if (cur_.kind == TokKind::arrow) {
            std::vector<std::string> chain{name};
            while (cur_.kind == TokKind::arrow) {
                consume();
                chain.push_back(expect_name());
            }
            if (at_symbol("[")) attr_list();  // edge attributes are ignored
            if (at_symbol(";")) consume();
            for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
                std::pair<std::string, std::string> e{chain[i], chain[i + 1]};
                if (std::find(graph_.edges.begin(), graph_.edges.end(), e) == graph_.edges.end())
                    graph_.edges.push_back(std::move(e));
            }
            return;
        }

        // Node statement. Repeated statements for the same id merge attributes.
        std::map<std::string, std::string> attrs;
        if (at_symbol("[")) attrs = attr_list();
        if (at_symbol(";")) consume();
        node_statement(name, attrs, line, column);
    }

    void node_statement(const std::string& id, const std::map<std::string, std::string>& attrs,
                        int line, int column) {
        auto it = graph_.nodes.find(id);
        const bool fresh = it == graph_.nodes.end();
        RecipeNode node = fresh ? RecipeNode{} : it->second;
        node.id = id;
        if (fresh) node.label = id;

        for (const auto& [key, value] : attrs) {
            if (key == "label") {
                node.label = value;
            } else if (key == "kind") {
                if (value == "ingredient") {
                    node.kind = NodeKind::ingredient;
                } else if (value == "action") {
                    node.kind = NodeKind::action;
                } else {
                    throw DotSyntaxError("kind must be \"ingredient\" or \"action\", got \"" + value + "\"",
                                         line, column);
                }
                seen_kind_.insert(id);
            } else if (key == "ref") {
                if (value == "structure") {
                    node.ref_type = RefType::structure;
                } else if (value == "taste") {
                    node.ref_type = RefType::taste;
                } else {
                    throw DotSyntaxError("ref must be \"structure\" or \"taste\", got \"" + value + "\"",
                                         line, column);
                }
            } else if (key == "core") {
                if (value == "true") {
                    node.core = true;
                } else if (value == "false") {
                    node.core = false;
                } else {
                    throw DotSyntaxError("core must be \"true\" or \"false\", got \"" + value + "\"", line,
                                         column);
                }
            } else if (key == "abstraction") {
                node.abstraction = value;
            } else {
                node.extra[key] = value;
            }
        }
        if (!seen_kind_.count(id))
            throw DotSyntaxError("node \"" + id + "\" is missing the kind attribute", line, column);
        if (node.abstraction.empty()) {
            node.abstraction =
                node.kind == NodeKind::action ? hierarchy_.category_of(node.label) : node.label;
        }
        graph_.nodes[id] = std::move(node);
    }

    Lexer lexer_;
    Token cur_;
    const ActionHierarchy& hierarchy_;
    DotGraph graph_;
    std::set<std::string> seen_kind_;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

DotGraph parse_dot_graph(const std::string& text, const ActionHierarchy& hierarchy) {
    return Parser(text, hierarchy).parse();
}

TreeParseResult build_tree(const DotGraph& graph) {
    TreeParseResult result;
    result.report = validate_graph(graph.nodes, graph.edges);
    if (!result.report.ok()) return result;

    RecipeTree tree;
    tree.title = graph.title;
    tree.nodes = graph.nodes;
    for (const auto& [child, par] : graph.edges) tree.parent[child] = par;
    result.tree = std::move(tree);
    return result;
}

TreeParseResult parse_dot(const std::string& text, const ActionHierarchy& hierarchy) {
    return build_tree(parse_dot_graph(text, hierarchy));
}

std::string serialize_dot(const RecipeTree& tree) {
    if (tree.title.empty()) throw std::invalid_argument("serialize_dot: tree title must be nonempty");
    std::ostringstream out;
    out << "digraph " << quote(tree.title) << " {\n";
    for (const auto& [id, n] : tree.nodes) {
        out << "  " << quote(id) << " [label=" << quote(n.label) << ", kind=" << quote(to_string(n.kind));
        if (n.kind == NodeKind::ingredient) {
            out << ", ref=" << quote(to_string(n.ref_type)) << ", core=" << (n.core ? "\"true\"" : "\"false\"");
        }
        out << ", abstraction=" << quote(n.abstraction);
        for (const auto& [k, v] : n.extra) out << ", " << k << "=" << quote(v);
        out << "];\n";
    }
    for (const auto& [child, par] : tree.parent) {
        out << "  " << quote(child) << " -> " << quote(par) << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string tree_to_json(const RecipeTree& tree) {
    using json = nlohmann::ordered_json;
    json j;
    j["title"] = tree.title;
    if (tree.source_recipe_id) {
        j["source_recipe_id"] = *tree.source_recipe_id;
    } else {
        j["source_recipe_id"] = nullptr;
    }

    auto canonical_order = [&tree](const std::string& a, const std::string& b) {
        const auto& na = tree.nodes.at(a);
        const auto& nb = tree.nodes.at(b);
        if (na.label != nb.label) return na.label < nb.label;
        return a < b;
    };

    std::vector<std::string> ids;
    ids.reserve(tree.nodes.size());
    for (const auto& [id, n] : tree.nodes) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), canonical_order);

    j["nodes"] = json::array();
    for (const auto& id : ids) {
        const RecipeNode& n = tree.nodes.at(id);
        json jn;
        jn["id"] = n.id;
        jn["kind"] = to_string(n.kind);
        jn["label"] = n.label;
        jn["abstraction"] = n.abstraction;
        if (n.kind == NodeKind::ingredient) {
            jn["ref"] = to_string(n.ref_type);
            jn["core"] = n.core;
        }
        if (!n.extra.empty()) jn["extra"] = n.extra;
        j["nodes"].push_back(std::move(jn));
    }

    std::vector<std::string> edge_children;
    for (const auto& [child, par] : tree.parent) edge_children.push_back(child);
    std::sort(edge_children.begin(), edge_children.end(), canonical_order);

    j["edges"] = json::array();
    for (const auto& child : edge_children) {
        json je;
        je["child"] = child;
        je["parent"] = tree.parent.at(child);
        j["edges"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

RecipeTree tree_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    RecipeTree tree;
    tree.title = j.at("title").get<std::string>();
    if (j.contains("source_recipe_id") && !j["source_recipe_id"].is_null())
        tree.source_recipe_id = j["source_recipe_id"].get<std::string>();
    for (const auto& jn : j.at("nodes")) {
        RecipeNode n;
        n.id = jn.at("id").get<std::string>();
        const std::string kind = jn.at("kind").get<std::string>();
        if (kind != "ingredient" && kind != "action")
            throw std::runtime_error("tree_from_json: bad kind \"" + kind + "\"");
        n.kind = kind == "ingredient" ? NodeKind::ingredient : NodeKind::action;
        n.label = jn.at("label").get<std::string>();
        n.abstraction = jn.at("abstraction").get<std::string>();
        if (jn.contains("ref")) {
            const std::string ref = jn["ref"].get<std::string>();
            if (ref != "structure" && ref != "taste")
                throw std::runtime_error("tree_from_json: bad ref \"" + ref + "\"");
            n.ref_type = ref == "structure" ? RefType::structure : RefType::taste;
        }
        if (jn.contains("core")) n.core = jn["core"].get<bool>();
        if (jn.contains("extra"))
            n.extra = jn["extra"].get<std::map<std::string, std::string>>();
        tree.nodes[n.id] = std::move(n);
    }
    for (const auto& je : j.at("edges")) {
        tree.parent[je.at("child").get<std::string>()] = je.at("parent").get<std::string>();
    }
    return tree;
}

}  // namespace treeblend
