#include "anchor/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace anchor {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokenize(const std::string& value) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(value);
    while (ss >> token) {
        while (!token.empty() && token.back() == ',') token.pop_back();
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& name) {
    KeyValueConfig cfg;
    cfg.name_ = name;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(name + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + raw + "'");
            section = strip(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(line_no) + ": empty section name");
            cfg.sections_[section];
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + raw + "'");
        if (section.empty())
            throw ConfigError(name + ":" + std::to_string(line_no) +
                              ": key outside of any [section]");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
        auto [it, inserted] = cfg.sections_[section].emplace(key, Entry{value, line_no, false});
        if (!inserted)
            throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "' in [" + section + "] (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return cfg;
}

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& section,
                                                  const std::string& key) const {
    auto sec = sections_.find(section);
    if (sec == sections_.end()) return nullptr;
    auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
}

void KeyValueConfig::missing(const std::string& section, const std::string& key) const {
    throw ConfigError(name_ + ": missing required key '" + key + "' in [" + section + "]");
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string KeyValueConfig::get_string(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    return e->value;
}

std::string KeyValueConfig::get_string_or(const std::string& section, const std::string& key,
                                          const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), value);
    if (ec != std::errc() || ptr != e->value.data() + e->value.size())
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' expects a real number, got '" + e->value + "'");
    return value;
}

std::optional<double> KeyValueConfig::get_double_opt(const std::string& section,
                                                     const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    return get_double(section, key);
}

std::int64_t KeyValueConfig::get_int(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), value);
    if (ec != std::errc() || ptr != e->value.data() + e->value.size())
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                          "' expects an integer, got '" + e->value + "'");
    return value;
}

std::optional<std::int64_t> KeyValueConfig::get_int_opt(const std::string& section,
                                                        const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    return get_int(section, key);
}

bool KeyValueConfig::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                      "' expects true/false, got '" + e->value + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& section,
                                                    const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    std::vector<double> out;
    for (const std::string& token : tokenize(e->value)) {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key +
                              "' has non-numeric element '" + token + "'");
        out.push_back(value);
    }
    if (out.empty())
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key + "' is empty");
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& section,
                                                         const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    std::vector<std::string> out = tokenize(e->value);
    if (out.empty())
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + key + "' is empty");
    return out;
}

void KeyValueConfig::reject_unknown(
    const std::map<std::string, std::vector<std::string>>& allowed) const {
    for (const auto& [section, entries] : sections_) {
        auto it = allowed.find(section);
        if (it == allowed.end())
            throw ConfigError(name_ + ": unknown section [" + section + "]");
        for (const auto& [key, entry] : entries) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError(name_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                                  key + "' in [" + section + "]");
        }
    }
}

int KeyValueConfig::line_of(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return e ? e->line : 0;
}

}  // namespace anchor
