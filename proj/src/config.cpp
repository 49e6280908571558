#include "rulopt/config.hpp"

#include "rulopt/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rulopt {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string origin) {
    KeyValueConfig cfg;
    cfg.origin_ = std::move(origin);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(cfg.origin_, line_no, "expected `key = value`, got \"" + std::string(line) + "\"");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            fail(cfg.origin_, line_no, "empty key");
        if (cfg.find(key) != nullptr)
            fail(cfg.origin_, line_no, "duplicate key \"" + key + "\"");
        cfg.entries_.push_back(Entry{std::move(key), std::move(value), line_no});
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    KeyValueConfig cfg = parse(buf.str(), file.string());
    cfg.base_dir_ = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
    return cfg;
}

const KeyValueConfig::Entry* KeyValueConfig::find(std::string_view key) const {
    for (const auto& e : entries_)
        if (e.key == key)
            return &e;
    return nullptr;
}

bool KeyValueConfig::has(std::string_view key) const {
    return find(key) != nullptr;
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
    const Entry* e = find(key);
    if (e == nullptr)
        return std::nullopt;
    consumed_.insert(std::string(key));
    return e->value;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string_view fallback) const {
    auto v = get(key);
    return v ? *v : std::string(fallback);
}

std::string KeyValueConfig::require_string(std::string_view key) const {
    auto v = get(key);
    if (!v)
        throw ConfigError(origin_ + ": missing required key \"" + std::string(key) + "\"");
    return *v;
}

namespace {

double to_double(const std::string& origin, std::string_view key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError(origin + ": key \"" + std::string(key) + "\" is not a number: \"" + value + "\"");
    return out;
}

} // namespace

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    return v ? to_double(origin_, key, *v) : fallback;
}

double KeyValueConfig::require_double(std::string_view key) const {
    return to_double(origin_, key, require_string(key));
}

int KeyValueConfig::get_int(std::string_view key, int fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    int out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError(origin_ + ": key \"" + std::string(key) + "\" is not an integer: \"" + *v + "\"");
    return out;
}

std::uint64_t KeyValueConfig::get_uint64(std::string_view key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError(origin_ + ": key \"" + std::string(key) + "\" is not an unsigned integer: \"" + *v + "\"");
    return out;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on")
        return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off")
        return false;
    throw ConfigError(origin_ + ": key \"" + std::string(key) + "\" is not a boolean: \"" + *v + "\"");
}

std::vector<std::uint64_t> KeyValueConfig::get_uint64_list(std::string_view key) const {
    std::vector<std::uint64_t> out;
    auto v = get(key);
    if (!v)
        return out;
    std::string_view rest = *v;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string_view item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty())
            continue;
        std::uint64_t n = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
        if (ec != std::errc{} || ptr != item.data() + item.size())
            throw ConfigError(origin_ + ": key \"" + std::string(key) + "\" has a bad list entry: \"" +
                              std::string(item) + "\"");
        out.push_back(n);
    }
    return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_)
        out.push_back(e.key);
    return out;
}

void KeyValueConfig::reject_unknown() const {
    std::string unknown;
    for (const auto& e : entries_) {
        if (consumed_.count(e.key) == 0) {
            if (!unknown.empty())
                unknown += ", ";
            unknown += "\"" + e.key + "\" (line " + std::to_string(e.line) + ")";
        }
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown keys: " + unknown);
}

std::filesystem::path KeyValueConfig::resolve_path(std::string_view value) const {
    std::filesystem::path p{std::string(value)};
    if (p.is_absolute() || base_dir_.empty())
        return p;
    return base_dir_ / p;
}

} // namespace rulopt
