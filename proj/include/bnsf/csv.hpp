#ifndef BNSF_CSV_HPP
#define BNSF_CSV_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bnsf {

/// Comma-separated writer. Floats are written with 17 significant digits so a
/// re-read recovers the exact binary value.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;

  CsvWriter(const std::string& path, std::initializer_list<std::string> header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    bool first = true;
    for (const auto& h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_) throw std::invalid_argument("csv: row width does not match the header");
    bool first = true;
    for (const auto& c : cells) {
      out_ << (first ? "" : ",") << format(c);
      first = false;
    }
    out_ << '\n';
  }

  static std::string format(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", *d);
      return buf;
    }
    if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
    return std::get<std::string>(c);
  }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace bnsf

#endif
