#pragma once

#include <json.hpp>

#include <string>

namespace trisolve {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers; +-infinity as the strings "inf" / "-inf", NaN as null.
Json json_number(double v);

/// Pretty-printed JSON with every floating-point value written at 17
/// significant digits, so identical inputs give byte-identical output.
std::string dump_json(const Json& value);

} // namespace trisolve
