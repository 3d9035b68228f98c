#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace clockwatch {

// Plain-text configuration: `[section]` headers, `key = value` pairs, `#`
// comments, UTF-8. Keys are addressed as "section.key". Environment
// variables override file values: section.key maps to
// CLOCKWATCH_<SECTION>_<KEY> (uppercased, '.' and '-' become '_').
class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    // Apply CLOCKWATCH_* environment overrides for every known key.
    void apply_env_overrides();

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return kv_; }

    // Canonical text form (sorted keys, one section per block); used for the
    // config echo in scenario results.
    std::string serialize() const;

    static std::string env_var_for(const std::string& key);

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace clockwatch
