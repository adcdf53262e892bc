#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tdscha {

// Dotted key = value text, one assignment per line, '#' comments.  Values are
// parsed as JSON scalars or arrays when possible and fall back to bare
// strings, so `pulse.amplitude = 2000` and `model.file = surface.pes` both
// work.  The result is the same nested tree a JSON config file produces.
nlohmann::json parse_config_text(const std::string& text);

// Sniffs the first meaningful character: '{' means JSON, anything else the
// dotted text grammar.
nlohmann::json load_config(const std::string& path);

// Typed access with dotted paths and config-error diagnostics naming the key.
class ConfigView {
public:
    explicit ConfigView(const nlohmann::json& root) : root_(&root) {}

    bool has(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    double req_num(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    std::string req_str(const std::string& key) const;
    std::vector<double> num_list(const std::string& key) const; // empty if absent

    // every leaf key in the tree must be listed; unknown keys are reported
    void check_known(const std::vector<std::string>& allowed) const;

    const nlohmann::json& root() const { return *root_; }

private:
    const nlohmann::json* find(const std::string& key) const;
    const nlohmann::json* root_;
};

// FNV-1a over the canonical dump; stable across runs and platforms.
std::uint64_t config_hash(const nlohmann::json& config);

} // namespace tdscha
