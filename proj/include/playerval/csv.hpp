#pragma once

#include "playerval/error.hpp"

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace playerval::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each data row in the source file, for diagnostics.
    std::vector<std::size_t> line_numbers;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

// Reads a comma-separated file with a header row. Handles quoted fields with
// "" escapes and CRLF endings; lines starting with '#' are comments (our own
// exports carry a provenance comment on line one).
Table read_file(const std::string& path);
Table parse(const std::string& text, const std::string& origin);

std::string escape_field(const std::string& field);

// Shortest round-trip formatting for doubles; every file we emit goes through
// this so that reruns are byte-identical.
std::string format_double(double v);

class Writer {
public:
    explicit Writer(const std::string& path);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void comment(const std::string& text);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::FILE* file_ = nullptr;
    std::string path_;
};

double parse_number(const std::string& cell, std::size_t line, const std::string& column);
long long parse_integer(const std::string& cell, std::size_t line, const std::string& column);

} // namespace playerval::csv
