#pragma once

#include <string>

#include "xprov/container.hpp"

namespace xprov {

// Canonical text form: a JSON document with fields in the fixed order
// {id, dims, values}; dims in declaration order, each {name, indices};
// values as a row-major flat list (null / integer / float / string / bool).
// Serialization is byte-deterministic, so equal containers serialize to
// identical bytes.
std::string serialize_container(const Container& c);

// Inverse of serialize_container; also accepts any JSON with the same shape.
// Malformed documents raise ParseError; label/count violations surface the
// container constructor's errors.
Container parse_container(const std::string& text);

Container load_container_file(const std::string& path);
void save_container_file(const Container& c, const std::string& path);

}  // namespace xprov
