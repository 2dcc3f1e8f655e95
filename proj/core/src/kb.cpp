#include "xprov/kb.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xprov/error.hpp"
#include "xprov/lineage_io.hpp"

namespace xprov {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

class FileLock {
 public:
  FileLock(const std::string& path, bool exclusive) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) {
      fail(ErrorCode::KBWriteFailure,
           "cannot open lock file " + path + ": " + std::strerror(errno));
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      int err = errno;
      ::close(fd_);
      fail(ErrorCode::KBWriteFailure,
           std::string("flock: ") + std::strerror(err));
    }
  }

  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_file(const fs::path& p, ErrorCode missing_code) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    fail(missing_code, "cannot read " + p.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<KnowledgeBase::IndexRow> parse_index(const fs::path& index_path) {
  std::vector<KnowledgeBase::IndexRow> rows;
  std::ifstream in(index_path);
  if (!in) return rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("kind") ||
        !j.contains("key") || !j.contains("file") || !j["kind"].is_string() ||
        !j["key"].is_string() || !j["file"].is_string()) {
      fail(ErrorCode::CorruptStore,
           "bad index row at line " + std::to_string(lineno));
    }
    KnowledgeBase::IndexRow row;
    row.kind = j["kind"].get<std::string>();
    row.key = j["key"].get<std::string>();
    row.file = j["file"].get<std::string>();
    row.ts = j.value("ts", std::int64_t{0});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::string root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(fs::path(root_) / "entries", ec);
  if (ec) {
    fail(ErrorCode::KBWriteFailure,
         "cannot create store at " + root_ + ": " + ec.message());
  }
}

std::vector<KnowledgeBase::IndexRow> KnowledgeBase::rows() const {
  FileLock lock((fs::path(root_) / ".lock").string(), false);
  return parse_index(fs::path(root_) / "index.jsonl");
}

std::string KnowledgeBase::write_entry(const std::string& kind,
                                       const std::string& key,
                                       const std::string& payload,
                                       const std::string& ext) {
  FileLock lock((fs::path(root_) / ".lock").string(), true);
  std::size_t serial = parse_index(fs::path(root_) / "index.jsonl").size();

  std::string rel = "entries/e" + std::to_string(serial) + "-" + kind + ext;
  fs::path tmp = fs::path(root_) / ("tmp-" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << payload;
    if (!out) {
      fail(ErrorCode::KBWriteFailure, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, fs::path(root_) / rel, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::KBWriteFailure, "cannot move entry into place: " + rel);
  }

  ordered_json row;
  row["kind"] = kind;
  row["key"] = key;
  row["file"] = rel;
  row["ts"] = static_cast<std::int64_t>(std::time(nullptr));
  std::ofstream index(fs::path(root_) / "index.jsonl",
                      std::ios::app | std::ios::binary);
  index << row.dump() << "\n";
  index.flush();
  if (!index) {
    fail(ErrorCode::KBWriteFailure, "cannot append to index.jsonl");
  }
  return rel;
}

std::optional<std::string> KnowledgeBase::find_entry(
    const std::string& kind, const std::string& key) const {
  FileLock lock((fs::path(root_) / ".lock").string(), false);
  std::vector<IndexRow> all = parse_index(fs::path(root_) / "index.jsonl");
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    if (it->kind == kind && it->key == key) {
      return read_file(fs::path(root_) / it->file, ErrorCode::CorruptStore);
    }
  }
  return std::nullopt;
}

void KnowledgeBase::put_tags(const std::string& op_key, const TaggedOp& value) {
  if (value.tags.size() != value.origins.size()) {
    fail(ErrorCode::Precondition, "one origin per tag required");
  }
  ordered_json doc;
  doc["op"] = op_key;
  doc["tags"] = ordered_json::array();
  for (std::size_t i = 0; i < value.tags.size(); ++i) {
    ordered_json t;
    t["tag"] = value.tags[i].repr();
    ordered_json org;
    org["kind"] = origin_kind_name(value.origins[i].kind);
    org["n"] = value.origins[i].example_count;
    org["ts"] = value.origins[i].timestamp;
    t["origin"] = std::move(org);
    doc["tags"].push_back(std::move(t));
  }
  write_entry("tags", op_key, doc.dump(2) + "\n", ".json");
}

std::optional<KnowledgeBase::TaggedOp> KnowledgeBase::get_tags(
    const std::string& op_key) const {
  std::optional<std::string> payload = find_entry("tags", op_key);
  if (!payload) return std::nullopt;
  ordered_json doc = ordered_json::parse(*payload, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("tags") ||
      !doc["tags"].is_array()) {
    fail(ErrorCode::CorruptStore, "bad tags entry for " + op_key);
  }
  TaggedOp out;
  try {
    for (const auto& t : doc["tags"]) {
      out.tags.push_back(ConstraintTag::parse(t.at("tag").get<std::string>()));
      const auto& org = t.at("origin");
      Origin origin;
      origin.kind = origin_kind_from(org.at("kind").get<std::string>());
      origin.example_count = org.at("n").get<std::uint64_t>();
      origin.timestamp = org.at("ts").get<std::int64_t>();
      out.origins.push_back(origin);
    }
  } catch (const Error& e) {
    fail(ErrorCode::CorruptStore,
         "bad tags entry for " + op_key + ": " + e.what());
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::CorruptStore,
         "bad tags entry for " + op_key + ": " + e.what());
  }
  return out;
}

void KnowledgeBase::put_lineage(const std::string& node_key,
                                const LineageTable& table) {
  write_entry("lineage", node_key, compress_table(table), ".xplt");
}

std::optional<LineageTable> KnowledgeBase::get_lineage(
    const std::string& node_key) const {
  std::optional<std::string> payload = find_entry("lineage", node_key);
  if (!payload) return std::nullopt;
  try {
    return decompress_table(*payload);
  } catch (const Error& e) {
    fail(ErrorCode::CorruptStore,
         "bad lineage entry for " + node_key + ": " + e.what());
  }
}

}  // namespace xprov
