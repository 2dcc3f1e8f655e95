#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/scalar.hpp"

namespace xprov {

// Identity of an operation: a namespace (the flavor of the hosting system,
// e.g. "pandas"), a bare operation name, and a flat parameter map. Parameters
// are kept sorted by key so that equal operations always render to the same
// canonical key.
struct OperationSignature {
  std::string ns;
  std::string name;
  std::vector<std::pair<std::string, Scalar>> params;

  // Validates names ([A-Za-z_][A-Za-z0-9_.-]*) and sorts/dedups params.
  static OperationSignature make(
      std::string ns, std::string name,
      std::vector<std::pair<std::string, Scalar>> params = {});

  // "ns.name(k1=v1,k2=v2)" with keys sorted and values rendered as JSON
  // literals, e.g. pandas.dropna() or duckdb.filter(cmp=">",column="Age",
  // value=30). Stable across runs; used as the knowledge-base key.
  std::string canonical_key() const;

  const Scalar* find(const std::string& key) const;

  // Multi-label parameters are carried as comma-joined strings; this splits
  // one back apart ("" splits to no parts).
  static std::vector<std::string> split_list(const std::string& joined);

  // Convenience accessors that fail with Precondition when absent or
  // of the wrong type.
  const Scalar& require(const std::string& key) const;
  std::string require_str(const std::string& key) const;

  bool operator==(const OperationSignature& other) const = default;
};

// Content fingerprint of a container: 64-bit FNV-1a over dims and values,
// ignoring the container id. Hex-encoded.
std::string container_fingerprint(const Container& c);

// Key identifying one concrete application of an operation: the op's
// canonical key plus fingerprints of every input container. Two nodes with
// the same key are guaranteed the same lineage.
std::string node_signature_key(const OperationSignature& op,
                               const std::vector<Container>& inputs);

}  // namespace xprov
