#pragma once

#include <json.hpp>
#include <ostream>
#include <sstream>
#include <string>

#include "treespace/format.hpp"

namespace treespace {

// Pretty JSON with every floating-point number at 17 significant digits.
// Non-finite numbers become null.
inline void write_json(std::ostream& out, const nlohmann::json& j, int indent = 2, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << nlohmann::json(it.key()).dump() << ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      out << '\n' << close << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << (flat ? ", " : ",");
        if (!flat) out << '\n' << pad;
        write_json(out, j[i], indent, depth + 1);
      }
      if (!flat) out << '\n' << close;
      out << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

inline std::string json_text(const nlohmann::json& j) {
  std::ostringstream s;
  write_json(s, j);
  s << '\n';
  return s.str();
}

}  // namespace treespace
