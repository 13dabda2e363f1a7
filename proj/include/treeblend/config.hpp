#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace treeblend {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One parsed right-hand side. Arrays may nest one level (arrays of arrays of
// scalars), which is as deep as any setting here goes.
struct ConfigValue {
    enum class Kind { string, integer, real, boolean, array };
    Kind kind = Kind::string;
    std::string str;
    long long integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<ConfigValue> items;

    const std::string& as_string() const;
    long long as_integer() const;
    double as_real() const;  // integers coerce
    bool as_bool() const;
    const std::vector<ConfigValue>& as_array() const;
};

// Declarative run settings: [section] headers over key = value lines, string
// values quoted, # comments, single-line arrays. Lookups that miss throw
// ConfigError naming section and key; the *_or forms return the fallback.
class Config {
public:
    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue& at(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;
    double get_real_or(const std::string& section, const std::string& key,
                       double fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& section,
                                              const std::string& key) const;
    // Array of two-string arrays, e.g. dishes = [["a", "b"], ["c", "d"]].
    std::vector<std::pair<std::string, std::string>> get_pair_array(
        const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const {
        return sections_;
    }

    void set(const std::string& section, const std::string& key, ConfigValue value);

    // Directory config-relative paths resolve against; load_config fills it.
    std::string base_dir = ".";
    std::string resolve_path(const std::string& path) const;

private:
    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace treeblend
