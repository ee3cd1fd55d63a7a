#pragma once

#include <iosfwd>

#include "json.hpp"

namespace rephase::cli {

using Json = nlohmann::ordered_json;

/// Pretty printer that writes every floating-point value with 17 significant
/// digits and non-finite values as null.
void write_json(std::ostream& os, const Json& j, int indent = 2);

}  // namespace rephase::cli
