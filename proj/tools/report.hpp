#pragma once

// Deterministic serialization: every double is printed with 17 significant
// digits, object keys keep insertion order.

#include "json.hpp"

#include <string>

namespace logsp::cli {

using Json = nlohmann::ordered_json;

std::string format_double(double v);

/// Pretty JSON with two-space indent. Non-finite numbers become null.
std::string dump(const Json& j);

}  // namespace logsp::cli
