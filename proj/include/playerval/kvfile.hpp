#pragma once

#include "playerval/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace playerval::kv {

// Flat TOML-style `key = value` file: '#' comments, optional quotes around
// values, blank lines ignored. All commands read the same format.
struct KeyValues {
    std::map<std::string, std::string> values;
    std::string origin;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end())
            raise("MissingConfigKey", origin + ": required key '" + key + "' is missing");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long long integer_or(const std::string& key, long long fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;

    // Canonical serialized form (sorted keys); hashed into output headers.
    std::string canonical() const;
};

KeyValues parse_kv(const std::string& text, const std::string& origin);
KeyValues read_kv_file(const std::string& path);

std::vector<std::string> split_list(const std::string& value, char sep = ',');

std::uint64_t fnv1a(const std::string& text);

} // namespace playerval::kv
