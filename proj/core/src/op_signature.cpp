#include "xprov/op_signature.hpp"

#include <algorithm>
#include <cstdint>

#include "json.hpp"
#include "json_util.hpp"
#include "xprov/error.hpp"

namespace xprov {
namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '.' || c == '-')) {
      return false;
    }
  }
  return true;
}

}  // namespace

OperationSignature OperationSignature::make(
    std::string ns, std::string name,
    std::vector<std::pair<std::string, Scalar>> params) {
  if (!valid_name(ns)) fail(ErrorCode::Precondition, "invalid namespace: '" + ns + "'");
  if (!valid_name(name)) fail(ErrorCode::Precondition, "invalid op name: '" + name + "'");
  std::sort(params.begin(), params.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (params[i].first == params[i - 1].first) {
      fail(ErrorCode::Precondition, "duplicate param key: " + params[i].first);
    }
  }
  OperationSignature sig;
  sig.ns = std::move(ns);
  sig.name = std::move(name);
  sig.params = std::move(params);
  return sig;
}

std::string OperationSignature::canonical_key() const {
  std::string out = ns + "." + name + "(";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ",";
    first = false;
    out += k;
    out += "=";
    out += scalar_to_json(v).dump();
  }
  out += ")";
  return out;
}

std::vector<std::string> OperationSignature::split_list(
    const std::string& joined) {
  std::vector<std::string> out;
  if (joined.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = joined.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(joined.substr(start));
      return out;
    }
    out.push_back(joined.substr(start, comma - start));
    start = comma + 1;
  }
}

const Scalar* OperationSignature::find(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Scalar& OperationSignature::require(const std::string& key) const {
  const Scalar* v = find(key);
  if (!v) fail(ErrorCode::Precondition, name + ": missing param '" + key + "'");
  return *v;
}

std::string OperationSignature::require_str(const std::string& key) const {
  const Scalar& v = require(key);
  if (!v.is_str()) {
    fail(ErrorCode::Precondition, name + ": param '" + key + "' must be a string");
  }
  return v.as_str();
}

namespace {

void fnv1a(std::uint64_t& h, const std::string& bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
}

}  // namespace

std::string container_fingerprint(const Container& c) {
  nlohmann::ordered_json doc;
  doc["dims"] = nlohmann::ordered_json::array();
  for (const auto& d : c.schema().dims) {
    nlohmann::ordered_json jd;
    jd["name"] = d.name;
    jd["indices"] = d.labels;
    doc["dims"].push_back(std::move(jd));
  }
  doc["values"] = nlohmann::ordered_json::array();
  for (const auto& idx : c.all_indices()) {
    doc["values"].push_back(scalar_to_json(c.get(idx)));
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv1a(h, doc.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string node_signature_key(const OperationSignature& op,
                               const std::vector<Container>& inputs) {
  std::string key = op.canonical_key();
  for (const auto& in : inputs) {
    key += "#";
    key += container_fingerprint(in);
  }
  return key;
}

}  // namespace xprov
