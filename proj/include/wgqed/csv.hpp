#ifndef WGQED_CSV_HPP
#define WGQED_CSV_HPP

// Sweep output: an ordered metadata echo, a header row, and numeric
// rows at full double precision (%.15g, at least 12 significant
// digits).  Failed points carry nan cells; JSON renders them as null.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace wgqed {

struct sweep_table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const sweep_table& tab) {
  for (const auto& [k, v] : tab.meta) os << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < tab.columns.size(); ++c)
    os << tab.columns[c] << (c + 1 < tab.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : tab.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << detail::format_value(row[c]) << (c + 1 < row.size() ? "," : "");
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const sweep_table& tab) {
  os << "{\n  \"meta\": {";
  for (std::size_t i = 0; i < tab.meta.size(); ++i)
    os << (i ? ",\n           " : "\n           ") << "\"" << detail::json_escape(tab.meta[i].first)
       << "\": \"" << detail::json_escape(tab.meta[i].second) << "\"";
  os << "\n  },\n  \"rows\": [";
  for (std::size_t r = 0; r < tab.rows.size(); ++r) {
    os << (r ? ",\n    " : "\n    ") << "{";
    for (std::size_t c = 0; c < tab.rows[r].size(); ++c) {
      double x = tab.rows[r][c];
      os << (c ? ", " : "") << "\"" << detail::json_escape(tab.columns[c]) << "\": ";
      if (std::isfinite(x))
        os << detail::format_value(x);
      else
        os << "null";
    }
    os << "}";
  }
  os << "\n  ]\n}\n";
}

}  // namespace wgqed

#endif
