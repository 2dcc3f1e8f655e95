#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xprov/lineage.hpp"
#include "xprov/tags.hpp"

namespace xprov {

// Durable store of operation knowledge rooted at a directory:
//
//   <root>/index.jsonl   append-only rows {"kind","key","file","ts"}
//   <root>/entries/      one file per stored value
//   <root>/.lock         advisory lock
//
// Writers serialize to a temp file, rename it into entries/, then append
// the index row, all under an exclusive flock; readers take a shared lock
// and resolve keys newest-first, so the latest write wins. This keeps the
// store consistent across concurrent processes on one host.
class KnowledgeBase {
 public:
  // Opens the store, creating it if needed (KBWriteFailure when the
  // directory cannot be set up).
  explicit KnowledgeBase(std::string root);

  const std::string& root() const { return root_; }

  // Constraint tags known for an operation, with one origin per tag.
  struct TaggedOp {
    std::vector<ConstraintTag> tags;
    std::vector<Origin> origins;
  };

  // Keyed by the op's canonical key.
  void put_tags(const std::string& op_key, const TaggedOp& value);
  std::optional<TaggedOp> get_tags(const std::string& op_key) const;

  // Keyed by a node signature (op key plus input fingerprints); the table
  // is stored compressed.
  void put_lineage(const std::string& node_key, const LineageTable& table);
  std::optional<LineageTable> get_lineage(const std::string& node_key) const;

  struct IndexRow {
    std::string kind;  // "tags" or "lineage"
    std::string key;
    std::string file;  // relative to the root
    std::int64_t ts = 0;
  };

  // Every index row, oldest first (superseded rows included).
  std::vector<IndexRow> rows() const;

 private:
  std::string write_entry(const std::string& kind, const std::string& key,
                          const std::string& payload, const std::string& ext);
  std::optional<std::string> find_entry(const std::string& kind,
                                        const std::string& key) const;

  std::string root_;
};

}  // namespace xprov
