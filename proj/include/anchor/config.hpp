#ifndef ANCHOR_CONFIG_HPP
#define ANCHOR_CONFIG_HPP

#include "anchor/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anchor {

/// Raised on any config defect; message carries the offending line number.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Sectioned key = value text format:
///   [section]
///   key = value   # comment
/// Keys are unique per section; unknown sections/keys are rejected by the
/// schema check in ExperimentConfig.
class KeyValueConfig {
  public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& name = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::optional<double> get_double_opt(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::optional<std::int64_t> get_int_opt(const std::string& section,
                                            const std::string& key) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const;

    /// Throws unless every present (section, key) pair was consumed by a
    /// getter or appears in the allowed table. Strictness over silence.
    void reject_unknown(
        const std::map<std::string, std::vector<std::string>>& allowed) const;

    int line_of(const std::string& section, const std::string& key) const;

  private:
    const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] void missing(const std::string& section, const std::string& key) const;

    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace anchor

#endif
