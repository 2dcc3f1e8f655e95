#include "xprov/container_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"
#include "xprov/error.hpp"

namespace xprov {

using ordered_json = nlohmann::ordered_json;

ordered_json scalar_to_json(const Scalar& s) {
  switch (s.kind()) {
    case Scalar::Kind::Null:
      return nullptr;
    case Scalar::Kind::Int:
      return s.as_int();
    case Scalar::Kind::Float:
      return s.as_float();
    case Scalar::Kind::Str:
      return s.as_str();
    case Scalar::Kind::Bool:
      return s.as_bool();
  }
  return nullptr;
}

Scalar scalar_from_json(const ordered_json& j) {
  if (j.is_null()) return Scalar::null();
  if (j.is_boolean()) return Scalar::of(j.get<bool>());
  if (j.is_number_integer()) return Scalar::of(j.get<std::int64_t>());
  if (j.is_number_float()) return Scalar::of(j.get<double>());
  if (j.is_string()) return Scalar::of(j.get<std::string>());
  fail(ErrorCode::ParseError, "cell values must be scalars, got " +
                                  std::string(j.type_name()));
}

std::string serialize_container(const Container& c) {
  ordered_json doc;
  doc["id"] = c.id();
  ordered_json dims = ordered_json::array();
  for (const auto& d : c.dims()) {
    ordered_json dim;
    dim["name"] = d.name;
    dim["indices"] = d.labels;
    dims.push_back(std::move(dim));
  }
  doc["dims"] = std::move(dims);
  ordered_json values = ordered_json::array();
  for (const auto& cell : c.cells()) {
    values.push_back(scalar_to_json(cell));
  }
  doc["values"] = std::move(values);
  return doc.dump(2) + "\n";
}

Container parse_container(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("container document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("dims") ||
      !doc.contains("values")) {
    fail(ErrorCode::ParseError, "container document needs id, dims, values");
  }
  if (!doc["id"].is_string() || !doc["dims"].is_array() ||
      !doc["values"].is_array()) {
    fail(ErrorCode::ParseError, "container document field types are wrong");
  }
  std::vector<Dimension> dims;
  for (const auto& dj : doc["dims"]) {
    if (!dj.is_object() || !dj.contains("name") || !dj.contains("indices") ||
        !dj["name"].is_string() || !dj["indices"].is_array()) {
      fail(ErrorCode::ParseError, "each dim needs a name and an indices list");
    }
    Dimension d;
    d.name = dj["name"].get<std::string>();
    for (const auto& label : dj["indices"]) {
      if (!label.is_string()) {
        fail(ErrorCode::ParseError, "dimension labels must be strings");
      }
      d.labels.push_back(label.get<std::string>());
    }
    dims.push_back(std::move(d));
  }
  std::vector<Scalar> values;
  for (const auto& vj : doc["values"]) {
    values.push_back(scalar_from_json(vj));
  }
  return Container::create(doc["id"].get<std::string>(), std::move(dims),
                           std::move(values));
}

Container load_container_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::InvalidPath, "cannot open container file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_container(buf.str());
}

void save_container_file(const Container& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::ExecutionFailure, "cannot write container file '" + path + "'");
  }
  out << serialize_container(c);
  if (!out.flush()) {
    fail(ErrorCode::ExecutionFailure, "short write to '" + path + "'");
  }
}

}  // namespace xprov
