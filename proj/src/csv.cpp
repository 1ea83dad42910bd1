#include "playerval/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace playerval::csv {

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no, const std::string& origin) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        raise("MalformedRow", origin + ":" + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

Table parse(const std::string& text, const std::string& origin) {
    Table table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_line(line, line_no, origin);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
            table.line_numbers.push_back(line_no);
        }
    }
    if (!have_header)
        raise("MalformedRow", origin + ": empty file, no header row");
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

std::string escape_field(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    char buf[40];
    // %.17g round-trips every double; trim the cases where fewer digits do.
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

Writer::Writer(const std::string& path) : path_(path) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_)
        raise("FileNotFound", "cannot open '" + path + "' for writing: " + std::strerror(errno));
}

Writer::~Writer() { close(); }

void Writer::close() {
    if (file_) {
        std::fclose(file_);
        file_ = nullptr;
    }
}

void Writer::comment(const std::string& text) {
    std::fprintf(file_, "# %s\n", text.c_str());
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto escaped = escape_field(fields[i]);
        std::fwrite(escaped.data(), 1, escaped.size(), file_);
        if (i + 1 < fields.size()) std::fputc(',', file_);
    }
    std::fputc('\n', file_);
}

double parse_number(const std::string& cell, std::size_t line, const std::string& column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        raise("MalformedRow", "line " + std::to_string(line) + ": non-numeric value '" + cell +
                                  "' in column '" + column + "'");
    return value;
}

long long parse_integer(const std::string& cell, std::size_t line, const std::string& column) {
    long long value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        raise("MalformedRow", "line " + std::to_string(line) + ": non-integer value '" + cell +
                                  "' in column '" + column + "'");
    return value;
}

} // namespace playerval::csv
