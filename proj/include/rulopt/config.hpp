#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rulopt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat `key = value` configuration file. UTF-8, `#` starts a comment,
// duplicate keys are rejected. Readers mark keys as consumed so that
// reject_unknown() can flag typos.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string origin = "<string>");
    static KeyValueConfig load(const std::filesystem::path& file);

    bool has(std::string_view key) const;

    std::optional<std::string> get(std::string_view key) const;
    std::string get_string(std::string_view key, std::string_view fallback) const;
    std::string require_string(std::string_view key) const;

    double get_double(std::string_view key, double fallback) const;
    double require_double(std::string_view key) const;
    int get_int(std::string_view key, int fallback) const;
    std::uint64_t get_uint64(std::string_view key, std::uint64_t fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;

    // Comma-separated list of unsigned integers.
    std::vector<std::uint64_t> get_uint64_list(std::string_view key) const;

    // All keys in file order.
    std::vector<std::string> keys() const;

    // Throws ConfigError naming every key that was never consumed.
    void reject_unknown() const;

    const std::string& origin() const { return origin_; }

    // Directory of the file this config was loaded from; empty for strings.
    std::filesystem::path base_dir() const { return base_dir_; }

    // Resolves a path value relative to the config file location.
    std::filesystem::path resolve_path(std::string_view value) const;

private:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    const Entry* find(std::string_view key) const;

    std::vector<Entry> entries_;
    std::string origin_;
    std::filesystem::path base_dir_;
    mutable std::set<std::string, std::less<>> consumed_;
};

} // namespace rulopt
