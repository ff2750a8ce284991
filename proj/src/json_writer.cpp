#include "trisolve/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace trisolve {

Json json_number(double v) {
  if (std::isnan(v))
    return nullptr;
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

void write(const Json& v, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
  case Json::value_t::object: {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first)
        out += ",\n";
      first = false;
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      write(it.value(), out, depth + 1);
    }
    out += "\n" + close_pad + "}";
    return;
  }
  case Json::value_t::array: {
    if (v.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& item : v) {
      if (!first)
        out += ",\n";
      first = false;
      out += pad;
      write(item, out, depth + 1);
    }
    out += "\n" + close_pad + "]";
    return;
  }
  case Json::value_t::number_float: {
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out += buf;
    return;
  }
  default:
    out += v.dump();
  }
}

} // namespace

std::string dump_json(const Json& value) {
  std::string out;
  write(value, out, 0);
  out += "\n";
  return out;
}

} // namespace trisolve
