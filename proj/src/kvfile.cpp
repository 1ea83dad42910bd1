#include "playerval/kvfile.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace playerval::kv {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

} // namespace

KeyValues parse_kv(const std::string& text, const std::string& origin) {
    KeyValues out;
    out.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise("MalformedRow", origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty())
            raise("MalformedRow", origin + ":" + std::to_string(line_no) + ": empty key");
        out.values[key] = value;
    }
    return out;
}

KeyValues read_kv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kv(buf.str(), path);
}

double KeyValues::number(const std::string& key) const {
    const auto text = get(key);
    double v = 0.0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        raise("MalformedRow", origin + ": key '" + key + "' is not a number: '" + text + "'");
    return v;
}

double KeyValues::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long long KeyValues::integer_or(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const auto text = get(key);
    long long v = 0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        raise("MalformedRow", origin + ": key '" + key + "' is not an integer: '" + text + "'");
    return v;
}

bool KeyValues::flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto text = get(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    raise("MalformedRow", origin + ": key '" + key + "' is not a boolean: '" + text + "'");
}

std::string KeyValues::canonical() const {
    std::string out;
    for (const auto& [k, v] : values) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : value) {
        if (c == sep) {
            if (const auto t = trim(cur); !t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (const auto t = trim(cur); !t.empty()) out.push_back(t);
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace playerval::kv
