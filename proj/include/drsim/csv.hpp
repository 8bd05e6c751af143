#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsim::csv {

// Shortest representation that still round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
        row_.reserve(256);
    }

    Writer& field(const std::string& s) {
        if (!row_.empty()) row_ += ',';
        row_ += s;
        return *this;
    }
    Writer& field(const char* s) { return field(std::string(s)); }
    Writer& field(double v) { return field(format_double(v)); }
    Writer& field(long v) { return field(std::to_string(v)); }
    Writer& field(int v) { return field(std::to_string(v)); }
    Writer& field(std::size_t v) { return field(std::to_string(v)); }

    void end_row() {
        out_ << row_ << '\n';
        row_.clear();
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::string row_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<int>(j);
        return -1;
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Strict reader: header row required, every data row must have the same
// number of fields as the header.
inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    t.header = split_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

inline double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
    if (ec != std::errc() || ptr != last)
        throw std::runtime_error("not a number at " + context + ": '" + s + "'");
    return v;
}

} // namespace drsim::csv
