#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace poexp::cli {

/// Fixed `%.12e` rendering; non-finite values print as inf, -inf, nan.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

/// CSV file with a fixed header; every row must have one cell per column.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, std::vector<std::string> header) : columns_(header.size()) {
    out_.open(file, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    row(header);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(double v) { return add(format_number(v)); }
    Row& operator<<(const std::string& s) { return add(s); }
    Row& operator<<(const char* s) { return add(s); }
    Row& operator<<(std::size_t v) { return add(std::to_string(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    ~Row() { w_.row(cells_); }

   private:
    Row& add(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    CsvWriter& w_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }

 private:
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace poexp::cli
