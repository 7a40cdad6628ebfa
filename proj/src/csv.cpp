#include "qkd/csv.hpp"

#include <cstdio>

#include "qkd/errors.hpp"

namespace qkd {

namespace {

std::string schema_line(const std::string& schema, int version) {
    return "# schema: " + schema + " v" + std::to_string(version);
}

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += csv_escape(cells[i]);
    }
    return line;
}

}  // namespace

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     int version, const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    out_ << schema_line(schema, version) << '\n' << join(columns) << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_)
        throw ConfigError("csv row has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(ncols_));
    out_ << join(cells) << '\n';
}

CsvReader::CsvReader(const std::string& path, const std::string& schema,
                     int version, const std::vector<std::string>& columns)
    : in_(path), path_(path) {
    if (!in_) throw ConfigError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in_, line)) throw ConfigError(path + ": empty file");
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != schema_line(schema, version))
        throw ConfigError(path + ": schema mismatch, got '" + line +
                          "', want '" + schema_line(schema, version) + "'");
    if (!std::getline(in_, line)) throw ConfigError(path + ": missing header");
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    columns_ = csv_split(line);
    if (columns_ != columns)
        throw ConfigError(path + ": column mismatch in header '" + line + "'");
}

bool CsvReader::next(std::vector<std::string>& cells) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    cells = csv_split(line);
    if (cells.size() != columns_.size())
        throw ConfigError(path_ + ":" + std::to_string(lineno_) +
                          ": row has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(columns_.size()));
    return true;
}

}  // namespace qkd
