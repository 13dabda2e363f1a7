#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeblend/corpus.hpp"
#include "treeblend/dot.hpp"
#include "treeblend/tree.hpp"

namespace treeblend {

// One template per remote-model exchange. Placeholders are written <name>
// inside the body; angle-bracket text containing spaces is literal.
enum class TemplateName {
    parse_ingredients,
    simplify_instructions,
    tree_dot,
    tree_correction,
    tree_to_recipe,
    find_issues,
    correct_recipe,
    summarize,
    review_ingredients,
    readability,
};

std::string to_string(TemplateName name);
TemplateName template_from_string(const std::string& name);

struct PromptTemplate {
    TemplateName name;
    std::string system_message;
    std::string body;
    std::vector<std::string> parameters;  // every placeholder, all required
};

const PromptTemplate& prompt_template(TemplateName name);

// Substitutes every declared placeholder; a missing or surplus parameter
// throws std::invalid_argument.
std::string render_template(const PromptTemplate& tmpl,
                            const std::map<std::string, std::string>& params);

enum class BridgeMode { live, record, replay };

struct BridgeConfig {
    // Empty endpoint falls back to the TREEBLEND_LLM_URL environment variable;
    // the credential rides in TREEBLEND_LLM_KEY.
    std::string endpoint;
    std::string model = "gpt-4o";
    double temperature = 0.7;
    BridgeMode mode = BridgeMode::replay;
    std::string fixture_dir;
    int max_correction_rounds = 2;
    int max_in_flight = 4;
};

struct ChatMessage {
    std::string role;  // "system", "user", "assistant"
    std::string content;
};

// Transport seam: live HTTP in production, stubs in tests. Replay mode never
// touches it.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string complete(const BridgeConfig& cfg,
                                 const std::vector<ChatMessage>& messages) = 0;
};

std::shared_ptr<Transport> http_transport();

class TreeParseFailed : public std::runtime_error {
public:
    TreeParseFailed(const std::string& message, ValidationReport report,
                    std::vector<ChatMessage> transcript);
    const ValidationReport last_report;
    const std::vector<ChatMessage> transcript;
};

// Every exchange goes through one fixture-aware chokepoint. Fixture files are
// named <template>_<hash12>.json where the hash covers the template name and
// the full message list, so edited prompts fail loudly instead of replaying
// stale answers.
class LlmBridge {
public:
    explicit LlmBridge(BridgeConfig cfg, std::shared_ptr<Transport> transport = nullptr);

    // history carries earlier turns of the same conversation, rendered prompt
    // last. Returns the assistant text.
    std::string complete(TemplateName name, const std::map<std::string, std::string>& params,
                         const std::vector<ChatMessage>& history = {});

    const BridgeConfig& config() const { return cfg_; }

    static std::string fixture_name(TemplateName name, const std::vector<ChatMessage>& messages);

private:
    BridgeConfig cfg_;
    std::shared_ptr<Transport> transport_;
};

// parse_ingredients → simplify_instructions → tree_dot, then correction
// rounds that re-ask only for each problem node's single outgoing edge.
// Throws TreeParseFailed when the cap runs out.
RecipeTree text_to_tree(const RecipeRecord& recipe, LlmBridge& bridge,
                        const ActionHierarchy& hierarchy);

struct RenderedRecipe {
    std::string final_text;
    std::string summary;
    std::string review;  // raw JSON verdict from the ingredient review
};

// tree_to_recipe → find_issues → correct_recipe (same conversation) →
// summarize → review_ingredients → readability.
RenderedRecipe tree_to_text(const RecipeTree& tree, LlmBridge& bridge);

}  // namespace treeblend
