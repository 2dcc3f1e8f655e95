#pragma once

// Shared fixtures, generators, and process helpers for the test binaries.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/error.hpp"
#include "xprov/lineage.hpp"
#include "xprov/op_signature.hpp"

namespace support {

using namespace xprov;

inline Scalar I(std::int64_t v) { return Scalar::of(v); }
inline Scalar F(double v) { return Scalar::of(v); }
inline Scalar S(const char* v) { return Scalar::of(v); }
inline Scalar B(bool v) { return Scalar::of(v); }
inline Scalar N() { return Scalar::null(); }

// The worked 4x3 people table: two complete rows, one hole in Name, one in
// Children.
inline Container people4x3() {
  return Container::create(
      "D0",
      {{"row", {"0", "1", "2", "3"}},
       {"col", {"Name", "Age", "Children"}}},
      {S("alice"), I(35), I(1),
       S("bob"), I(32), I(2),
       N(), I(28), I(0),
       S("dana"), I(41), N()});
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "xprov-test-XXXXXX")
            .string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }

 private:
  std::string path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Uniform draw in [0, n).
inline std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline Scalar random_cell(std::mt19937_64& rng) {
  std::size_t roll = draw(rng, 100);
  if (roll < 40) return I(static_cast<std::int64_t>(draw(rng, 55)) - 5);
  if (roll < 60) return F((static_cast<double>(draw(rng, 110)) - 10) / 2.0);
  if (roll < 75) {
    const char* pool[] = {"a", "b", "c", "zed"};
    return S(pool[draw(rng, 4)]);
  }
  if (roll < 85) return B(draw(rng, 2) == 1);
  return N();
}

// Random 2-D container up to max_rows x max_cols with mixed cell types and
// occasional holes. Column labels come from a fixed pool so operation
// parameters can reference them.
inline Container random_container(std::mt19937_64& rng,
                                  std::size_t max_rows = 4,
                                  std::size_t max_cols = 4) {
  static const char* kCols[] = {"Name", "Age", "Children", "Score"};
  std::size_t rows = 1 + draw(rng, max_rows);
  std::size_t cols = 1 + draw(rng, max_cols);
  Dimension row_dim{"row", {}};
  for (std::size_t r = 0; r < rows; ++r) {
    row_dim.labels.push_back(std::to_string(r));
  }
  Dimension col_dim{"col", {}};
  for (std::size_t c = 0; c < cols; ++c) {
    col_dim.labels.push_back(kCols[c]);
  }
  std::vector<Scalar> cells;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    cells.push_back(random_cell(rng));
  }
  return Container::create("R", {row_dim, col_dim}, std::move(cells));
}

// A valid parameterization of one built-in against a concrete container.
inline OperationSignature random_op(const std::string& name,
                                    const Container& c,
                                    std::mt19937_64& rng) {
  const auto& cols = c.dim(1).labels;
  auto random_col = [&] { return cols[draw(rng, cols.size())]; };
  auto random_col_subset = [&] {
    std::vector<std::string> picked;
    for (const auto& col : cols) {
      if (draw(rng, 2) == 1) picked.push_back(col);
    }
    if (picked.empty()) picked.push_back(random_col());
    std::string joined;
    for (std::size_t i = 0; i < picked.size(); ++i) {
      if (i > 0) joined += ",";
      joined += picked[i];
    }
    return joined;
  };

  std::vector<std::pair<std::string, Scalar>> params;
  if (name == "filter") {
    const char* cmps[] = {"<", ">", "=", "!="};
    params = {{"column", S(random_col().c_str())},
              {"cmp", S(cmps[draw(rng, 4)])},
              {"value", I(static_cast<std::int64_t>(draw(rng, 50)) - 5)}};
  } else if (name == "minmax_scale" || name == "project") {
    params = {{"columns", S(random_col_subset().c_str())}};
  } else if (name == "map_add_constant") {
    params = {{"k", draw(rng, 2) == 1
                        ? I(static_cast<std::int64_t>(draw(rng, 9)) - 4)
                        : F(static_cast<double>(draw(rng, 9)) - 4.5)}};
  } else if (name == "sort") {
    params = {{"column", S(random_col().c_str())},
              {"asc", B(draw(rng, 2) == 1)}};
  }
  return OperationSignature::make("t", name, std::move(params));
}

// Random lineage table (sometimes multi-input) for storage round-trips.
inline LineageTable random_table(std::mt19937_64& rng) {
  auto random_schema = [&](const std::string& prefix) {
    ContainerSchema s;
    std::size_t rank = 1 + draw(rng, 2);
    for (std::size_t d = 0; d < rank; ++d) {
      Dimension dim{prefix + std::to_string(d), {}};
      std::size_t n = 2 + draw(rng, 3);
      for (std::size_t i = 0; i < n; ++i) {
        dim.labels.push_back(std::to_string(i));
      }
      s.dims.push_back(std::move(dim));
    }
    return s;
  };
  std::vector<ContainerSchema> ins;
  std::size_t slots = 1 + draw(rng, 2);
  for (std::size_t s = 0; s < slots; ++s) ins.push_back(random_schema("in"));
  ContainerSchema out = random_schema("out");

  auto tuples_of = [](const ContainerSchema& s) {
    std::vector<IndexTuple> all;
    std::vector<std::size_t> pos(s.rank(), 0);
    bool done = s.cell_count() == 0;
    while (!done) {
      IndexTuple idx;
      for (std::size_t d = 0; d < s.rank(); ++d) {
        idx.push_back(s.dims[d].labels[pos[d]]);
      }
      all.push_back(std::move(idx));
      done = true;
      for (std::size_t d = s.rank(); d-- > 0;) {
        if (++pos[d] < s.dims[d].labels.size()) {
          done = false;
          break;
        }
        pos[d] = 0;
      }
    }
    return all;
  };

  std::vector<LineageRecord> records;
  auto outs = tuples_of(out);
  for (std::uint32_t s = 0; s < slots; ++s) {
    for (const auto& o : outs) {
      for (const auto& i : tuples_of(ins[s])) {
        std::size_t roll = draw(rng, 100);
        if (roll < 25) {
          records.push_back({o, s, i, InfluenceKind::Indirect});
          if (roll < 12) {
            records.push_back({o, s, i, InfluenceKind::Direct});
          }
        }
      }
    }
  }
  Completeness comps[] = {Completeness::Exact, Completeness::OverApprox,
                          Completeness::Unknown};
  Origin origins[] = {Origin::declared(11), Origin::captured_exact(22),
                      Origin::oracle(33), Origin::learnt(24, 44)};
  return LineageTable::build(std::move(ins), std::move(out),
                             std::move(records), comps[draw(rng, 3)],
                             comps[draw(rng, 3)], origins[draw(rng, 4)]);
}

// Error code raised by a callable, if any.
template <typename Fn>
std::optional<ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

struct CommandResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs a program with stdout/stderr captured; extra environment variables
// apply to the child only.
inline CommandResult run_command(
    const std::vector<std::string>& argv,
    const std::vector<std::pair<std::string, std::string>>& env = {}) {
  TempDir scratch;
  std::string out_path = scratch.file("out");
  std::string err_path = scratch.file("err");

  // Forked children inherit buffered stdio and would replay it on exit.
  std::fflush(stdout);
  std::fflush(stderr);
  pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    if (::freopen(out_path.c_str(), "w", stdout) == nullptr ||
        ::freopen(err_path.c_str(), "w", stderr) == nullptr) {
      _exit(126);
    }
    for (const auto& [key, value] : env) {
      ::setenv(key.c_str(), value.c_str(), 1);
    }
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    _exit(127);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  CommandResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = read_file(out_path);
  res.err = read_file(err_path);
  return res;
}

}  // namespace support
