#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace armrl::csv {

// Shortest representation that round-trips a double; "nan" for NaN. Output is
// locale-independent so CSVs are byte-stable.
inline std::string format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace armrl::csv
