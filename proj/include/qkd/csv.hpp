#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace qkd {

// CSV files carry a schema comment ahead of the header row:
//   # schema: <name> v<version>
//   col1,col2,...
// Readers refuse files whose schema name/version or columns differ.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& schema,
              int version, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    void flush() { out_.flush(); }

  private:
    std::ofstream out_;
    size_t ncols_;
};

class CsvReader {
  public:
    CsvReader(const std::string& path, const std::string& schema,
              int version, const std::vector<std::string>& columns);

    // Returns false at end of file.
    bool next(std::vector<std::string>& cells);
    const std::vector<std::string>& columns() const { return columns_; }

  private:
    std::ifstream in_;
    std::vector<std::string> columns_;
    std::string path_;
    int lineno_ = 0;
};

std::string csv_escape(const std::string& cell);
std::vector<std::string> csv_split(const std::string& line);
std::string csv_num(double v);

}  // namespace qkd
