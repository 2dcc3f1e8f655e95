#pragma once

// Internal helpers shared by the serialization-facing translation units.
// Not installed; public headers stay free of the JSON dependency.

#include "json.hpp"
#include "xprov/scalar.hpp"

namespace xprov {

nlohmann::ordered_json scalar_to_json(const Scalar& s);

// ParseError when the value is not a scalar (objects, arrays).
Scalar scalar_from_json(const nlohmann::ordered_json& j);

}  // namespace xprov
