#pragma once

#include <cstdio>
#include <initializer_list>
#include <span>
#include <string>

namespace tlsphonon::csv {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += number(values[i]);
  }
  return out;
}

inline std::string join(std::initializer_list<double> values) {
  return join(std::span<const double>(values.begin(), values.size()));
}

/// Quotes a field when it contains a separator, quote or newline.
inline std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace tlsphonon::csv
