#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace dwgeom {

/// Formats a double with 17 significant digits ("." decimal separator),
/// enough for lossless round-tripping.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) os_ << ',';
      first = false;
      os_ << c;
    }
    os_ << '\n';
  }

  void row(std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      if (!first) os_ << ',';
      first = false;
      os_ << csv_number(v);
    }
    os_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& cells) {
    bool first = true;
    for (const std::string& c : cells) {
      if (!first) os_ << ',';
      first = false;
      os_ << c;
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

}  // namespace dwgeom
