#include "treeblend/bridge.hpp"

#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>

#include "json.hpp"
#include "treeblend/util.hpp"

namespace treeblend {

namespace {

PromptTemplate make_template(TemplateName name, std::string system_message, std::string body,
                             std::vector<std::string> parameters) {
    PromptTemplate t;
    t.name = name;
    t.system_message = std::move(system_message);
    t.body = std::move(body);
    t.parameters = std::move(parameters);
    return t;
}

const char* kParserSystem = "You are a cooking recipe parser";
const char* kExpertSystem = "You are a cooking expert";

// One-shot worked example embedded in the tree_dot prompt; plain pasta keeps
// it short while showing every node attribute and the edge direction.
const char* kTreeDotExample = R"(Title: tomato pasta Ingredients: pasta, tomato, garlic, oil, salt Directions: [i1] Boil pasta. [i2] Chop garlic. [i3] Fry garlic in oil. [i4] Add tomato, salt. [i5] Mix pasta, sauce. Code:
digraph "tomato pasta" {
  // ingredient nodes, one per parsed ingredient
  "pasta" [label="pasta", kind="ingredient", ref="structure", core="true", abstraction="pasta"];
  "tomato" [label="tomato", kind="ingredient", ref="taste", core="true", abstraction="vegetable"];
  "garlic" [label="garlic", kind="ingredient", ref="taste", core="false", abstraction="vegetable"];
  "oil" [label="oil", kind="ingredient", ref="structure", core="false", abstraction="oil"];
  "salt" [label="salt", kind="ingredient", ref="taste", core="false", abstraction="mineral"];
  // action nodes, one per direction verb
  "boil" [label="boil", kind="action", abstraction="heat application"];
  "chop" [label="chop", kind="action", abstraction="preparation"];
  "fry" [label="fry", kind="action", abstraction="heat application"];
  "add" [label="add", kind="action", abstraction="combination"];
  "mix" [label="mix", kind="action", abstraction="combination"];
  // every edge runs from an input to the action that consumes it
  "pasta" -> "boil";
  "garlic" -> "chop";
  "chop" -> "fry";
  "oil" -> "fry";
  "fry" -> "add";
  "tomato" -> "add";
  "salt" -> "add";
  "boil" -> "mix";
  "add" -> "mix";
}
# end of code
)";

const std::vector<PromptTemplate>& all_templates() {
    static const std::vector<PromptTemplate> templates = [] {
        std::vector<PromptTemplate> out;
        out.push_back(make_template(
            TemplateName::parse_ingredients, kParserSystem,
            "Given a recipe title, id, and ingredients, for each ingredient, determine: "
            "(1) Abbreviation: The shortest clear description. "
            "(2) Reference Type: Identify if the ingredient is for structure ('structure') or "
            "taste ('taste') of the dish. Ingredients impacting both are labeled as 'taste'. "
            "(3) Core Ingredient: Boolean indicating if the ingredient is essential to the "
            "identity of the dish (e.g., True for chocolate in chocolate cake). "
            "(4) Abstraction: Simplify the ingredient to its base form (e.g., 'basil' to 'herb', "
            "'walnuts' to 'nut', 'eggs' to 'egg'). "
            "Please return the results in the following JSON format only: "
            "{\"recipe_id\": [(abbreviation, ref, core, abstraction), ...], ...}. "
            "INPUT: <input>\nOUTPUT:",
            {"input"}));
        out.push_back(make_template(
            TemplateName::simplify_instructions, kParserSystem,
            "Given the following cooking instructions, please simplify and shorten them as much "
            "as possible. Remove quantities, sizes, and descriptions. Ensure each verb initiates "
            "a new sentence, and that a sentence does not contain two verbs. Convert permissive "
            "or ambiguous instructions into active forms (e.g., \"let cool\" -> \"cool\", "
            "\"alternate layers\" -> \"layer\"). Return output in JSON format with the key as "
            "'recipe_id' and the value as the full simplified text. "
            "INPUT: <input> OUTPUT:",
            {"input"}));
        out.push_back(make_template(
            TemplateName::tree_dot, kParserSystem,
            std::string(kTreeDotExample) +
                "Title: <dish_name> Ingredients: <ingredient_abbreviation_list> "
                "Directions: <directions> Code:",
            {"dish_name", "ingredient_abbreviation_list", "directions"}));
        out.push_back(make_template(
            TemplateName::tree_correction, kParserSystem,
            "You are provided with the title, ingredients, and directions of a recipe, along "
            "with a partial Dot code that represents the recipe's tree structure. The Dot code "
            "is missing some edges. Additionally, you will receive names of nodes for which "
            "these connections are missing. For each provided node name, add exactly one edge "
            "from this node to the action node that uses it (if it is an ingredient) or "
            "processes its outcome (if it is an action). Please return only the Dot code for "
            "these specific edges, including necessary comments, and exclude any additional "
            "text.\nTitle: <dish_name>\nIngredients: <ingredient_abbreviation_list>\n"
            "Directions:\n<directions>\nPartial Dot code:\n<dot_code>\n"
            "Name of nodes with missing edges:\n<node_names>\nOUTPUT:",
            {"dish_name", "ingredient_abbreviation_list", "directions", "dot_code",
             "node_names"}));
        out.push_back(make_template(
            TemplateName::tree_to_recipe, kExpertSystem,
            "Given the following DOT code, which represents a recipe graphically by defining "
            "ingredient nodes, action nodes, and their interconnections, translate the "
            "structure into a natural language recipe. The DOT code maps each ingredient to "
            "specific actions, and it outlines the order of these actions to demonstrate the "
            "cooking process.\nDOT CODE:\n```<recipe_idea_dot_code>'''\n"
            "Convert this structured representation into a detailed cooking recipe in natural "
            "language. Requirements: (1) Output should only include the title, ingredients "
            "with quantities, and sequential instructions. (2) Avoid any explanatory comments "
            "or embellishments.\nOUTPUT:",
            {"recipe_idea_dot_code"}));
        out.push_back(make_template(
            TemplateName::find_issues, kExpertSystem,
            "Review the recipe provided below, which is written in natural language. Identify "
            "and list any potential issues with it, excluding any concerns related to "
            "unconventional ingredient combinations. Please provide only a list of potential "
            "issues without revising the recipe.\nRECIPE:\n```<generated_recipe>'''",
            {"generated_recipe"}));
        out.push_back(make_template(
            TemplateName::correct_recipe, kExpertSystem,
            "Please edit the recipe to address the identified issues. Ensure the recipe "
            "remains as a single, unified component. Output only the corrected version of the "
            "recipe.\nOUTPUT:",
            {}));
        out.push_back(make_template(
            TemplateName::summarize, kExpertSystem,
            "Please summarize the following recipe in a few sentences: (1) Start with a super "
            "concise description of the dish, focusing *only* on its final result. (2) Then, "
            "provide a summary of the recipe, including its main components, actions, and all "
            "the ingredients used. Use a descriptive tone for this part, avoiding imperative "
            "sentences.\nRECIPE:\n```<full_recipe>'''",
            {"full_recipe"}));
        out.push_back(make_template(
            TemplateName::review_ingredients, kExpertSystem,
            "You are given a description of a creative recipe.\n"
            "CREATIVE RECIPE DESCRIPTION:\n```<creative_recipe_description>'''\n"
            "Your task is to preserve the creative ingredients in the recipe while suggesting "
            "the removal or substitution of ingredients that might negatively impact the "
            "dish's flavor. You should: (1) Recognize the unique and unusual ingredients that "
            "contribute to the creativity of the dish. (2) Systematically compare all pairs of "
            "ingredients in the dish and identify ingredients that have a clear, strong clash "
            "with each other due to conflicting flavors. Be thorough and ensure that you "
            "include all possible pairs of ingredients that have a strong clash. (3) Based on "
            "the identified strong clashes, suggest removals and substitutions of ingredients "
            "to avoid clashes, while preserving the creative aspects of the dish.\n"
            "Return only the following JSON output format:\n"
            "{\"dish_ingredients\": <list of strings: the full list of ingredients in the "
            "dish>, \"creative_ingrs\": <list of strings: the list of ingredients that "
            "contribute creatively to the dish>, \"flavor_clashes\": <list of string pairs: "
            "the clashing ingredients>, \"removals\": <list of strings: the list of "
            "ingredients to remove>, \"substitutions\": <list of string pairs: ingredients to "
            "substitute - (ingr1, ingr2) means 'replace ingr1 in ingr2'>}",
            {"creative_recipe_description"}));
        out.push_back(make_template(
            TemplateName::readability, kExpertSystem,
            "Given the following recipe: (1) Remove the following ingredients: "
            "<bad_ingredients>. (2) Make the following ingredient substitutions: "
            "<required_substitutions>. (3) Split its ingredients and instructions into "
            "distinct sections to improve readability (e.g., \"mix dry ingredients\", "
            "\"assemble\", etc.). You can change the order of lines but keep the content "
            "unchanged.\n```<full_recipe>'''",
            {"bad_ingredients", "required_substitutions", "full_recipe"}));
        return out;
    }();
    return templates;
}

// Placeholder tokens are <lowercase_identifier>; bracketed prose with spaces
// stays literal.
std::vector<std::string> body_placeholders(const std::string& body) {
    std::vector<std::string> found;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '<') continue;
        std::size_t j = i + 1;
        while (j < body.size() && (std::islower(static_cast<unsigned char>(body[j])) ||
                                   std::isdigit(static_cast<unsigned char>(body[j])) ||
                                   body[j] == '_'))
            ++j;
        if (j > i + 1 && j < body.size() && body[j] == '>') {
            found.push_back(body.substr(i + 1, j - i - 1));
            i = j;
        }
    }
    return found;
}

}  // namespace

std::string to_string(TemplateName name) {
    switch (name) {
        case TemplateName::parse_ingredients: return "parse_ingredients";
        case TemplateName::simplify_instructions: return "simplify_instructions";
        case TemplateName::tree_dot: return "tree_dot";
        case TemplateName::tree_correction: return "tree_correction";
        case TemplateName::tree_to_recipe: return "tree_to_recipe";
        case TemplateName::find_issues: return "find_issues";
        case TemplateName::correct_recipe: return "correct_recipe";
        case TemplateName::summarize: return "summarize";
        case TemplateName::review_ingredients: return "review_ingredients";
        case TemplateName::readability: return "readability";
    }
    throw std::logic_error("unreachable template name");
}

TemplateName template_from_string(const std::string& name) {
    for (const auto& t : all_templates())
        if (to_string(t.name) == name) return t.name;
    throw std::invalid_argument("unknown prompt template \"" + name + "\"");
}

const PromptTemplate& prompt_template(TemplateName name) {
    for (const auto& t : all_templates())
        if (t.name == name) return t;
    throw std::logic_error("unregistered template");
}

std::string render_template(const PromptTemplate& tmpl,
                            const std::map<std::string, std::string>& params) {
    const std::set<std::string> declared(tmpl.parameters.begin(), tmpl.parameters.end());
    for (const auto& p : body_placeholders(tmpl.body))
        if (!declared.count(p))
            throw std::logic_error("template " + to_string(tmpl.name) +
                                   " uses undeclared placeholder <" + p + ">");
    std::set<std::string> given;
    for (const auto& [k, v] : params) given.insert(k);
    if (given != declared) {
        std::string message = "template " + to_string(tmpl.name) + " takes parameters {";
        for (const auto& d : declared) message += d + " ";
        message += "}";
        throw std::invalid_argument(message);
    }
    std::string out = tmpl.body;
    for (const auto& [key, value] : params) {
        const std::string token = "<" + key + ">";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

TreeParseFailed::TreeParseFailed(const std::string& message, ValidationReport report,
                                 std::vector<ChatMessage> transcript)
    : std::runtime_error(message),
      last_report(std::move(report)),
      transcript(std::move(transcript)) {}

std::string LlmBridge::fixture_name(TemplateName name, const std::vector<ChatMessage>& messages) {
    std::string blob = to_string(name);
    for (const auto& m : messages) blob += "\x1e" + m.role + "\x1f" + m.content;
    const std::uint64_t hash = fnv1a64(blob);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return to_string(name) + "_" + std::string(hex, 12) + ".json";
}

LlmBridge::LlmBridge(BridgeConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (!transport_ && cfg_.mode != BridgeMode::replay) transport_ = http_transport();
    if (cfg_.mode != BridgeMode::live && cfg_.fixture_dir.empty())
        throw std::invalid_argument("record and replay modes need a fixture_dir");
}

namespace {

// Bounds concurrent transport calls; replay never acquires it.
class FlightLimiter {
public:
    explicit FlightLimiter(int limit) : slots_(limit < 1 ? 1 : limit) {}
    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return slots_ > 0; });
        --slots_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++slots_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int slots_;
};

std::string guarded_complete(Transport& transport, const BridgeConfig& cfg,
                             const std::vector<ChatMessage>& messages) {
    static std::mutex limiter_mutex;
    static std::map<int, std::shared_ptr<FlightLimiter>> limiters;
    std::shared_ptr<FlightLimiter> limiter;
    {
        std::lock_guard lock(limiter_mutex);
        auto& slot = limiters[cfg.max_in_flight];
        if (!slot) slot = std::make_shared<FlightLimiter>(cfg.max_in_flight);
        limiter = slot;
    }
    limiter->acquire();
    try {
        auto out = transport.complete(cfg, messages);
        limiter->release();
        return out;
    } catch (...) {
        limiter->release();
        throw;
    }
}

}  // namespace

std::string LlmBridge::complete(TemplateName name,
                                const std::map<std::string, std::string>& params,
                                const std::vector<ChatMessage>& history) {
    const auto& tmpl = prompt_template(name);
    std::vector<ChatMessage> messages;
    messages.push_back({"system", tmpl.system_message});
    messages.insert(messages.end(), history.begin(), history.end());
    messages.push_back({"user", render_template(tmpl, params)});

    namespace fs = std::filesystem;
    if (cfg_.mode == BridgeMode::replay) {
        const fs::path path = fs::path(cfg_.fixture_dir) / fixture_name(name, messages);
        if (!fs::exists(path))
            throw std::runtime_error("replay fixture " + path.string() +
                                     " not found; record it first or check for prompt drift");
        const auto fixture = nlohmann::json::parse(read_file(path.string()));
        if (fixture.value("template", "") != to_string(name))
            throw std::runtime_error("fixture " + path.string() + " belongs to template " +
                                     fixture.value("template", "?"));
        return fixture.at("response").get<std::string>();
    }

    const std::string response = guarded_complete(*transport_, cfg_, messages);
    if (cfg_.mode == BridgeMode::record) {
        fs::create_directories(cfg_.fixture_dir);
        nlohmann::ordered_json fixture;
        fixture["template"] = to_string(name);
        fixture["messages"] = nlohmann::ordered_json::array();
        for (const auto& m : messages)
            fixture["messages"].push_back({{"role", m.role}, {"content", m.content}});
        fixture["response"] = response;
        const fs::path path = fs::path(cfg_.fixture_dir) / fixture_name(name, messages);
        write_file(path.string(), fixture.dump(2) + "\n");
    }
    return response;
}

namespace {

class HttpTransport : public Transport {
public:
    std::string complete(const BridgeConfig& cfg,
                         const std::vector<ChatMessage>& messages) override;
};

}  // namespace

std::shared_ptr<Transport> http_transport() { return std::make_shared<HttpTransport>(); }

}  // namespace treeblend

#define CPPHTTPLIB_NO_EXCEPTIONS_SUPPRESSION
#include "httplib.h"

namespace treeblend {

std::string HttpTransport::complete(const BridgeConfig& cfg,
                                    const std::vector<ChatMessage>& messages) {
    std::string endpoint = cfg.endpoint;
    if (endpoint.empty()) {
        const char* env = std::getenv("TREEBLEND_LLM_URL");
        if (!env || !*env)
            throw std::runtime_error(
                "no endpoint configured; set TREEBLEND_LLM_URL or BridgeConfig.endpoint");
        endpoint = env;
    }
    // split scheme://authority from the request path
    std::string base = endpoint, path = "/v1/chat/completions";
    const auto scheme_end = endpoint.find("://");
    if (scheme_end != std::string::npos) {
        const auto path_start = endpoint.find('/', scheme_end + 3);
        if (path_start != std::string::npos) {
            base = endpoint.substr(0, path_start);
            path = endpoint.substr(path_start);
        }
    }

    nlohmann::ordered_json body;
    body["model"] = cfg.model;
    body["temperature"] = cfg.temperature;
    body["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(base);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("TREEBLEND_LLM_KEY"); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    const auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result)
        throw std::runtime_error("transport error calling " + endpoint + ": " +
                                 httplib::to_string(result.error()));
    if (result->status != 200)
        throw std::runtime_error("endpoint " + endpoint + " answered HTTP " +
                                 std::to_string(result->status) + ": " + result->body);
    const auto parsed = nlohmann::json::parse(result->body);
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

// Serializes a possibly-invalid working graph for the correction prompt.
std::string graph_to_dot(const DotGraph& graph) {
    std::string out = "digraph " + dot_quote(graph.title.empty() ? "recipe" : graph.title) + " {\n";
    for (const auto& [id, node] : graph.nodes) {
        out += "  " + dot_quote(id) + " [label=" + dot_quote(node.label) + ", kind=\"" +
               (node.kind == NodeKind::ingredient ? "ingredient" : "action") + "\"";
        if (node.kind == NodeKind::ingredient) {
            out += ", ref=\"";
            out += node.ref_type == RefType::structure ? "structure" : "taste";
            out += "\", core=\"";
            out += node.core ? "true" : "false";
            out += "\"";
        }
        out += ", abstraction=" + dot_quote(node.abstraction) + "];\n";
    }
    for (const auto& [child, parent] : graph.edges)
        out += "  " + dot_quote(child) + " -> " + dot_quote(parent) + ";\n";
    return out + "}\n";
}

std::string strip_code_fences(const std::string& text) {
    std::string body = trim(text);
    if (body.rfind("```", 0) != 0) return body;
    const auto first_newline = body.find('\n');
    if (first_newline == std::string::npos) return body;
    body = body.substr(first_newline + 1);
    const auto closing = body.rfind("```");
    if (closing != std::string::npos) body = body.substr(0, closing);
    return trim(body);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

struct ParsedIngredient {
    std::string abbreviation;
    RefType ref = RefType::taste;
    bool core = false;
    std::string abstraction;
};

std::vector<ParsedIngredient> parse_ingredient_reply(const std::string& response,
                                                     const std::string& recipe_id) {
    const auto parsed = nlohmann::json::parse(strip_code_fences(response));
    if (!parsed.contains(recipe_id))
        throw std::runtime_error("ingredient parse reply lacks recipe id \"" + recipe_id + "\"");
    std::vector<ParsedIngredient> out;
    for (const auto& row : parsed.at(recipe_id)) {
        if (!row.is_array() || row.size() != 4)
            throw std::runtime_error("ingredient parse reply row is not a 4-tuple");
        ParsedIngredient info;
        info.abbreviation = row.at(0).get<std::string>();
        info.ref = row.at(1).get<std::string>() == "structure" ? RefType::structure
                                                               : RefType::taste;
        if (row.at(2).is_boolean())
            info.core = row.at(2).get<bool>();
        else
            info.core = to_lower(row.at(2).get<std::string>()) == "true";
        info.abstraction = row.at(3).get<std::string>();
        out.push_back(std::move(info));
    }
    return out;
}

// Directions arrive as one simplified text; each sentence becomes [iN] ...
std::string format_directions(const std::string& simplified) {
    std::vector<std::string> sentences;
    std::string current;
    for (char c : simplified) {
        current += c;
        if (c == '.') {
            const std::string t = trim(current);
            if (t != ".") sentences.push_back(t);
            current.clear();
        }
    }
    if (!trim(current).empty()) sentences.push_back(trim(current) + ".");
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i) out += " ";
        out += "[i" + std::to_string(i + 1) + "] " + sentences[i];
    }
    return out;
}

}  // namespace

RecipeTree text_to_tree(const RecipeRecord& recipe, LlmBridge& bridge,
                        const ActionHierarchy& hierarchy) {
    if (recipe.title.empty() || recipe.ingredients.empty() || recipe.instructions.empty())
        throw std::invalid_argument("recipe \"" + recipe.recipe_id +
                                    "\" needs a title, ingredients, and instructions to parse");
    std::vector<ChatMessage> transcript;
    auto exchange = [&](TemplateName name, const std::map<std::string, std::string>& params) {
        const std::string rendered = render_template(prompt_template(name), params);
        const std::string response = bridge.complete(name, params);
        transcript.push_back({"user", rendered});
        transcript.push_back({"assistant", response});
        return response;
    };

    const std::string ingredient_input = recipe.title + ", " + recipe.recipe_id + ", [" +
                                         join(recipe.ingredients, ", ") + "]";
    const auto parsed_ingredients = parse_ingredient_reply(
        exchange(TemplateName::parse_ingredients, {{"input", ingredient_input}}),
        recipe.recipe_id);

    nlohmann::ordered_json simplify_input;
    simplify_input[recipe.recipe_id] = join(recipe.instructions, " ");
    const auto simplify_reply = nlohmann::json::parse(strip_code_fences(
        exchange(TemplateName::simplify_instructions, {{"input", simplify_input.dump()}})));
    if (!simplify_reply.contains(recipe.recipe_id))
        throw std::runtime_error("simplify reply lacks recipe id \"" + recipe.recipe_id + "\"");
    const std::string simplified = simplify_reply.at(recipe.recipe_id).get<std::string>();

    std::vector<std::string> abbreviations;
    for (const auto& info : parsed_ingredients) abbreviations.push_back(info.abbreviation);
    const std::string directions = format_directions(simplified);
    const std::map<std::string, std::string> shared_params{
        {"dish_name", recipe.title},
        {"ingredient_abbreviation_list", join(abbreviations, ", ")},
        {"directions", directions},
    };

    const std::string dot_reply =
        strip_code_fences(exchange(TemplateName::tree_dot, shared_params));
    DotGraph graph = parse_dot_graph(dot_reply, hierarchy);
    if (graph.title.empty()) graph.title = recipe.title;

    // parsed ingredient facts override whatever the DOT carried
    for (auto& [id, node] : graph.nodes) {
        if (node.kind != NodeKind::ingredient) continue;
        for (const auto& info : parsed_ingredients) {
            if (to_lower(info.abbreviation) != to_lower(node.label)) continue;
            node.ref_type = info.ref;
            node.core = info.core;
            if (!info.abstraction.empty()) node.abstraction = info.abstraction;
            break;
        }
    }

    for (int round = 0;; ++round) {
        auto report = validate_graph(graph.nodes, graph.edges);
        if (report.ok()) break;
        for (const auto& v : report.violations) {
            // a missing edge cannot repair these
            if (v.kind == ViolationKind::empty_tree || v.kind == ViolationKind::no_root ||
                v.kind == ViolationKind::empty_label ||
                v.kind == ViolationKind::empty_abstraction)
                throw TreeParseFailed("tree for \"" + recipe.recipe_id +
                                          "\" is beyond edge repair: " + report.summary(),
                                      report, transcript);
        }
        if (round >= bridge.config().max_correction_rounds)
            throw TreeParseFailed("tree for \"" + recipe.recipe_id + "\" still invalid after " +
                                      std::to_string(round) + " correction rounds: " +
                                      report.summary(),
                                  report, transcript);

        // strip every edge implicated by the report
        std::set<std::string> cut_out_edges_of;  // drop these nodes' outgoing edges
        std::set<std::string> unknown_ids;
        for (const auto& v : report.violations) {
            switch (v.kind) {
                case ViolationKind::multiple_out_edges:
                case ViolationKind::cycle:
                case ViolationKind::wrong_edge_direction:
                    cut_out_edges_of.insert(v.node_id);
                    break;
                case ViolationKind::unknown_node:
                    unknown_ids.insert(v.node_id);
                    break;
                default:
                    break;
            }
        }
        std::vector<std::pair<std::string, std::string>> kept;
        for (const auto& edge : graph.edges) {
            if (cut_out_edges_of.count(edge.first)) continue;
            if (unknown_ids.count(edge.first) || unknown_ids.count(edge.second)) continue;
            kept.push_back(edge);
        }
        graph.edges = std::move(kept);

        // all roots but the best-supported one need a fresh outgoing edge
        std::map<std::string, std::string> parent_of;
        for (const auto& [child, parent] : graph.edges) parent_of[child] = parent;
        std::map<std::string, int> support;
        for (const auto& [id, node] : graph.nodes) {
            std::string cursor = id;
            std::set<std::string> seen;
            while (parent_of.count(cursor) && seen.insert(cursor).second)
                cursor = parent_of.at(cursor);
            ++support[cursor];
        }
        std::string kept_root;
        for (const auto& [id, node] : graph.nodes) {
            if (parent_of.count(id)) continue;
            if (kept_root.empty() || support[id] > support[kept_root]) kept_root = id;
        }
        std::set<std::string> problems;
        for (const auto& [id, node] : graph.nodes)
            if (!parent_of.count(id) && id != kept_root) problems.insert(id);
        if (problems.empty())
            throw TreeParseFailed("tree for \"" + recipe.recipe_id +
                                      "\" has no edge-repairable nodes left: " + report.summary(),
                                  report, transcript);

        auto params = shared_params;
        params["dot_code"] = graph_to_dot(graph);
        params["node_names"] = join({problems.begin(), problems.end()}, ", ");
        const std::string correction =
            strip_code_fences(exchange(TemplateName::tree_correction, params));
        DotGraph patch = parse_dot_graph("digraph patch {\n" + correction + "\n}\n", hierarchy);
        std::set<std::pair<std::string, std::string>> existing(graph.edges.begin(),
                                                               graph.edges.end());
        for (const auto& edge : patch.edges)
            if (existing.insert(edge).second) graph.edges.push_back(edge);
    }

    auto built = build_tree(graph);
    if (!built.ok())
        throw TreeParseFailed("tree for \"" + recipe.recipe_id + "\" failed final validation",
                              built.report, transcript);
    built.tree->source_recipe_id = recipe.recipe_id;
    return *built.tree;
}

RenderedRecipe tree_to_text(const RecipeTree& tree, LlmBridge& bridge) {
    const auto report = validate(tree);
    if (!report.ok())
        throw std::invalid_argument("refusing to narrate an invalid tree: " + report.summary());

    const std::string dot_code = serialize_dot(tree);
    const std::string raw_recipe =
        bridge.complete(TemplateName::tree_to_recipe, {{"recipe_idea_dot_code", dot_code}});

    const std::map<std::string, std::string> issue_params{{"generated_recipe", raw_recipe}};
    const std::string issues = bridge.complete(TemplateName::find_issues, issue_params);
    const std::vector<ChatMessage> conversation{
        {"user", render_template(prompt_template(TemplateName::find_issues), issue_params)},
        {"assistant", issues},
    };
    const std::string corrected =
        bridge.complete(TemplateName::correct_recipe, {}, conversation);

    RenderedRecipe out;
    out.summary = bridge.complete(TemplateName::summarize, {{"full_recipe", corrected}});
    out.review = bridge.complete(TemplateName::review_ingredients,
                                 {{"creative_recipe_description", out.summary}});

    std::string bad = "none", substitutions = "none";
    try {
        const auto verdict = nlohmann::json::parse(strip_code_fences(out.review));
        std::vector<std::string> removals;
        for (const auto& r : verdict.value("removals", nlohmann::json::array()))
            removals.push_back(r.get<std::string>());
        if (!removals.empty()) bad = join(removals, ", ");
        std::vector<std::string> subs;
        for (const auto& s : verdict.value("substitutions", nlohmann::json::array()))
            if (s.is_array() && s.size() == 2)
                subs.push_back("(" + s.at(0).get<std::string>() + ", " +
                               s.at(1).get<std::string>() + ")");
        if (!subs.empty()) substitutions = join(subs, "; ");
    } catch (const nlohmann::json::exception&) {
        // a malformed verdict downgrades the final pass to formatting only
    }
    out.final_text = bridge.complete(TemplateName::readability,
                                     {{"bad_ingredients", bad},
                                      {"required_substitutions", substitutions},
                                      {"full_recipe", corrected}});
    return out;
}

}  // namespace treeblend
