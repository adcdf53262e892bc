#include "tdscha/config.hpp"

#include "tdscha/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tdscha {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.')
        return false;
    char prev = '.';
    for (char c : key) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
        if (!ok || (c == '.' && prev == '.'))
            return false;
        prev = c;
    }
    return true;
}

json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (!v.is_discarded())
        return v;
    // bare string, optionally quoted
    std::string s = text;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        s = s.substr(1, s.size() - 2);
    return json(s);
}

void flatten(const json& node, const std::string& prefix,
             std::vector<std::string>& keys) {
    if (!node.is_object()) {
        keys.push_back(prefix);
        return;
    }
    for (const auto& [k, v] : node.items())
        flatten(v, prefix.empty() ? k : prefix + "." + k, keys);
}

} // namespace

json parse_config_text(const std::string& text) {
    json root = json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) +
                             ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw InputError("config line " + std::to_string(lineno) +
                             ": bad key '" + key + "'");
        if (value.empty())
            throw InputError("config line " + std::to_string(lineno) +
                             ": missing value for '" + key + "'");
        json* node = &root;
        std::istringstream parts(key);
        std::string part;
        std::vector<std::string> segs;
        while (std::getline(parts, part, '.'))
            segs.push_back(part);
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
            json& child = (*node)[segs[i]];
            if (!child.is_object() && !child.is_null())
                throw InputError("config line " + std::to_string(lineno) + ": '" +
                                 key + "' conflicts with an earlier scalar");
            if (child.is_null())
                child = json::object();
            node = &child;
        }
        if (node->contains(segs.back()))
            throw InputError("config line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'");
        (*node)[segs.back()] = parse_value(value);
    }
    return root;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded())
            throw InputError(path + ": malformed JSON config");
        if (!j.is_object())
            throw InputError(path + ": config root must be an object");
        return j;
    }
    try {
        return parse_config_text(text);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

const json* ConfigView::find(const std::string& key) const {
    const json* node = root_;
    std::istringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) {
        if (!node->is_object() || !node->contains(part))
            return nullptr;
        node = &(*node)[part];
    }
    return node;
}

bool ConfigView::has(const std::string& key) const { return find(key) != nullptr; }

double ConfigView::num(const std::string& key, double fallback) const {
    const json* v = find(key);
    if (!v)
        return fallback;
    if (!v->is_number())
        throw InputError("config key '" + key + "' must be a number");
    return v->get<double>();
}

double ConfigView::req_num(const std::string& key) const {
    if (!has(key))
        throw InputError("config key '" + key + "' is required");
    return num(key, 0.0);
}

int ConfigView::integer(const std::string& key, int fallback) const {
    const json* v = find(key);
    if (!v)
        return fallback;
    if (!v->is_number_integer())
        throw InputError("config key '" + key + "' must be an integer");
    return v->get<int>();
}

bool ConfigView::flag(const std::string& key, bool fallback) const {
    const json* v = find(key);
    if (!v)
        return fallback;
    if (!v->is_boolean())
        throw InputError("config key '" + key + "' must be true or false");
    return v->get<bool>();
}

std::string ConfigView::str(const std::string& key, const std::string& fallback) const {
    const json* v = find(key);
    if (!v)
        return fallback;
    if (!v->is_string())
        throw InputError("config key '" + key + "' must be a string");
    return v->get<std::string>();
}

std::string ConfigView::req_str(const std::string& key) const {
    if (!has(key))
        throw InputError("config key '" + key + "' is required");
    return str(key, "");
}

std::vector<double> ConfigView::num_list(const std::string& key) const {
    const json* v = find(key);
    if (!v)
        return {};
    if (v->is_number())
        return {v->get<double>()};
    if (!v->is_array())
        throw InputError("config key '" + key + "' must be a number list");
    std::vector<double> out;
    for (const auto& item : *v) {
        if (!item.is_number())
            throw InputError("config key '" + key + "' must contain only numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

void ConfigView::check_known(const std::vector<std::string>& allowed) const {
    std::vector<std::string> keys;
    flatten(*root_, "", keys);
    for (const std::string& k : keys)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw InputError("unknown config key '" + k + "'");
}

std::uint64_t config_hash(const json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace tdscha
