#include "treeblend/config.hpp"

#include <cctype>
#include <filesystem>

#include "treeblend/util.hpp"

namespace treeblend {

namespace {

const char* kind_name(ConfigValue::Kind kind) {
    switch (kind) {
        case ConfigValue::Kind::string: return "string";
        case ConfigValue::Kind::integer: return "integer";
        case ConfigValue::Kind::real: return "real";
        case ConfigValue::Kind::boolean: return "boolean";
        case ConfigValue::Kind::array: return "array";
    }
    return "?";
}

[[noreturn]] void wrong_kind(const ConfigValue& value, ConfigValue::Kind wanted) {
    throw ConfigError(std::string("expected a ") + kind_name(wanted) + " but found a " +
                      kind_name(value.kind));
}

}  // namespace

const std::string& ConfigValue::as_string() const {
    if (kind != Kind::string) wrong_kind(*this, Kind::string);
    return str;
}

long long ConfigValue::as_integer() const {
    if (kind != Kind::integer) wrong_kind(*this, Kind::integer);
    return integer;
}

double ConfigValue::as_real() const {
    if (kind == Kind::integer) return static_cast<double>(integer);
    if (kind != Kind::real) wrong_kind(*this, Kind::real);
    return real;
}

bool ConfigValue::as_bool() const {
    if (kind != Kind::boolean) wrong_kind(*this, Kind::boolean);
    return boolean;
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
    if (kind != Kind::array) wrong_kind(*this, Kind::array);
    return items;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) != 0;
}

const ConfigValue& Config::at(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("missing setting [" + section + "] " + key);
    return s->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    try {
        return at(section, key).as_string();
    } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    try {
        return at(section, key).as_integer();
    } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
}

long long Config::get_int_or(const std::string& section, const std::string& key,
                             long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

double Config::get_real_or(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    try {
        return at(section, key).as_real();
    } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
    if (!has(section, key)) return fallback;
    try {
        return at(section, key).as_bool();
    } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
}

std::vector<std::string> Config::get_string_array(const std::string& section,
                                                  const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& item : at(section, key).as_array()) out.push_back(item.as_string());
    return out;
}

std::vector<std::pair<std::string, std::string>> Config::get_pair_array(
    const std::string& section, const std::string& key) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : at(section, key).as_array()) {
        const auto& pair = item.as_array();
        if (pair.size() != 2)
            throw ConfigError("[" + section + "] " + key +
                              ": each entry must hold exactly two strings");
        out.emplace_back(pair[0].as_string(), pair[1].as_string());
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key, ConfigValue value) {
    sections_[section][key] = std::move(value);
}

std::string Config::resolve_path(const std::string& path) const {
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty() || base_dir == ".") return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void skip_space() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError("config line " + std::to_string(line) + ": " + message);
    }
};

std::string parse_quoted(Cursor& c) {
    ++c.pos;  // opening quote
    std::string out;
    while (!c.done() && c.peek() != '"') {
        char ch = c.peek();
        if (ch == '\n') c.fail("unterminated string");
        if (ch == '\\') {
            ++c.pos;
            if (c.done()) c.fail("dangling escape");
            switch (c.peek()) {
                case 'n': ch = '\n'; break;
                case 't': ch = '\t'; break;
                case '"': ch = '"'; break;
                case '\\': ch = '\\'; break;
                default: c.fail("unknown escape sequence");
            }
        }
        out += ch;
        ++c.pos;
    }
    if (c.done()) c.fail("unterminated string");
    ++c.pos;  // closing quote
    return out;
}

ConfigValue parse_value(Cursor& c);

ConfigValue parse_array(Cursor& c) {
    ConfigValue value;
    value.kind = ConfigValue::Kind::array;
    ++c.pos;  // '['
    c.skip_space();
    if (!c.done() && c.peek() == ']') {
        ++c.pos;
        return value;
    }
    while (true) {
        value.items.push_back(parse_value(c));
        c.skip_space();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ',') {
            ++c.pos;
            c.skip_space();
            continue;
        }
        if (c.peek() == ']') {
            ++c.pos;
            return value;
        }
        c.fail("expected ',' or ']' in array");
    }
}

ConfigValue parse_value(Cursor& c) {
    c.skip_space();
    if (c.done()) c.fail("missing value");
    const char head = c.peek();
    if (head == '"') {
        ConfigValue v;
        v.kind = ConfigValue::Kind::string;
        v.str = parse_quoted(c);
        return v;
    }
    if (head == '[') return parse_array(c);

    std::string word;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != '\n' && c.peek() != ' ' && c.peek() != '\t')
        word += c.text[c.pos++];
    if (word == "true" || word == "false") {
        ConfigValue v;
        v.kind = ConfigValue::Kind::boolean;
        v.boolean = word == "true";
        return v;
    }
    if (word.empty()) c.fail("missing value");
    const bool real = word.find('.') != std::string::npos ||
                      word.find('e') != std::string::npos ||
                      word.find('E') != std::string::npos;
    try {
        std::size_t used = 0;
        ConfigValue v;
        if (real) {
            v.kind = ConfigValue::Kind::real;
            v.real = std::stod(word, &used);
        } else {
            v.kind = ConfigValue::Kind::integer;
            v.integer = std::stoll(word, &used);
        }
        if (used != word.size()) c.fail("malformed number \"" + word + "\"");
        return v;
    } catch (const std::logic_error&) {
        c.fail("unquoted value \"" + word + "\" is not a number or boolean");
    }
}

}  // namespace

Config parse_config(const std::string& text) {
    Config config;
    std::string section;
    int line_no = 0;
    for (const auto& raw_line : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            const auto close = line.find(']');
            if (close == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(line.substr(1, close - 1));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty section name");
            continue;
        }
        Cursor c{line, 0, line_no};
        std::string key;
        if (c.peek() == '"') {
            key = parse_quoted(c);
        } else {
            while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                                 c.peek() == '_' || c.peek() == '-'))
                key += c.text[c.pos++];
        }
        if (key.empty()) c.fail("expected a key");
        c.skip_space();
        if (c.done() || c.peek() != '=') c.fail("expected '=' after key \"" + key + "\"");
        ++c.pos;
        ConfigValue value = parse_value(c);
        c.skip_space();
        if (!c.done() && c.peek() != '#')
            c.fail("trailing characters after value for \"" + key + "\"");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key \"" + key + "\" appears before any [section]");
        if (config.has(section, key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key [" +
                              section + "] " + key);
        config.set(section, key, std::move(value));
    }
    return config;
}

Config load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    Config config = parse_config(text);
    config.base_dir = std::filesystem::path(path).parent_path().string();
    if (config.base_dir.empty()) config.base_dir = ".";
    return config;
}

}  // namespace treeblend
