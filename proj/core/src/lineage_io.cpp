#include "xprov/lineage_io.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"
#include "xprov/error.hpp"

namespace xprov {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kMagic = "XPLT1";

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

ordered_json schema_to_json(const ContainerSchema& s) {
  ordered_json dims = ordered_json::array();
  for (const auto& d : s.dims) {
    ordered_json dim;
    dim["name"] = d.name;
    dim["indices"] = d.labels;
    dims.push_back(std::move(dim));
  }
  ordered_json out;
  out["dims"] = std::move(dims);
  return out;
}

ContainerSchema schema_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("dims") || !j["dims"].is_array()) {
    fail(ErrorCode::CorruptPayload, "schema block needs a dims list");
  }
  ContainerSchema s;
  for (const auto& dj : j["dims"]) {
    if (!dj.is_object() || !dj.contains("name") || !dj.contains("indices") ||
        !dj["name"].is_string() || !dj["indices"].is_array()) {
      fail(ErrorCode::CorruptPayload, "schema dim needs name and indices");
    }
    Dimension d;
    d.name = dj["name"].get<std::string>();
    for (const auto& label : dj["indices"]) {
      if (!label.is_string()) {
        fail(ErrorCode::CorruptPayload, "schema labels must be strings");
      }
      d.labels.push_back(label.get<std::string>());
    }
    s.dims.push_back(std::move(d));
  }
  return s;
}

// A box is one position interval [start, end] per axis; axes are the output
// dimensions followed by the input dimensions.
struct Box {
  std::vector<std::pair<std::size_t, std::size_t>> iv;

  bool operator<(const Box& other) const { return iv < other.iv; }
};

std::vector<Box> merge_axis(std::vector<Box> boxes, std::size_t axis) {
  std::sort(boxes.begin(), boxes.end(), [axis](const Box& a, const Box& b) {
    for (std::size_t i = 0; i < a.iv.size(); ++i) {
      if (i == axis) continue;
      if (a.iv[i] != b.iv[i]) return a.iv[i] < b.iv[i];
    }
    return a.iv[axis] < b.iv[axis];
  });
  std::vector<Box> out;
  for (auto& b : boxes) {
    if (!out.empty()) {
      Box& prev = out.back();
      bool same_others = true;
      for (std::size_t i = 0; i < b.iv.size(); ++i) {
        if (i != axis && prev.iv[i] != b.iv[i]) {
          same_others = false;
          break;
        }
      }
      if (same_others && prev.iv[axis].second + 1 == b.iv[axis].first) {
        prev.iv[axis].second = b.iv[axis].second;
        continue;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::string lineage_to_csv(const LineageTable& table) {
  const auto& out_dims = table.output_schema().dims;
  std::size_t in_rank =
      table.input_schemas().empty() ? 0 : table.input_schemas()[0].dims.size();
  for (const auto& s : table.input_schemas()) {
    if (s.dims.size() != in_rank) {
      fail(ErrorCode::SchemaMismatch,
           "csv form needs uniform input arity across slots");
    }
  }

  std::ostringstream out;
  bool first = true;
  for (const auto& d : out_dims) {
    if (!first) out << ",";
    out << csv_escape("out_" + d.name);
    first = false;
  }
  if (!first) out << ",";
  out << "in_slot";
  const auto& in_names = table.input_schemas().empty()
                             ? std::vector<Dimension>{}
                             : table.input_schemas()[0].dims;
  for (const auto& d : in_names) {
    out << "," << csv_escape("in_" + d.name);
  }
  out << ",kind\n";

  for (const auto& r : table.records()) {
    for (const auto& label : r.out_idx) out << csv_escape(label) << ",";
    out << r.in_slot;
    for (const auto& label : r.in_idx) out << "," << csv_escape(label);
    out << "," << influence_kind_name(r.kind) << "\n";
  }
  return out.str();
}

LineageTable lineage_from_csv(const std::string& text,
                              std::vector<ContainerSchema> input_schemas,
                              ContainerSchema output_schema,
                              Completeness direct_completeness,
                              Completeness indirect_completeness,
                              Origin origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::ParseError, "lineage csv is empty");
  }
  std::size_t out_rank = output_schema.dims.size();
  std::size_t in_rank = input_schemas.empty() ? 0 : input_schemas[0].dims.size();
  std::size_t expected_fields = out_rank + 1 + in_rank + 1;

  std::vector<LineageRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != expected_fields) {
      fail(ErrorCode::ParseError,
           "lineage csv row has " + std::to_string(fields.size()) +
               " fields, expected " + std::to_string(expected_fields));
    }
    LineageRecord r;
    r.out_idx.assign(fields.begin(), fields.begin() + out_rank);
    try {
      r.in_slot = static_cast<std::uint32_t>(std::stoul(fields[out_rank]));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad in_slot '" + fields[out_rank] + "'");
    }
    r.in_idx.assign(fields.begin() + out_rank + 1,
                    fields.begin() + out_rank + 1 + in_rank);
    r.kind = influence_kind_from(fields.back());
    records.push_back(std::move(r));
  }
  return LineageTable::build(std::move(input_schemas), std::move(output_schema),
                             std::move(records), direct_completeness,
                             indirect_completeness, origin);
}

std::string compress_table(const LineageTable& table) {
  // group records per (slot, kind), convert to position boxes, merge axes
  // from last to first
  std::map<std::pair<std::uint32_t, InfluenceKind>, std::vector<Box>> groups;

  auto positions_of = [](const ContainerSchema& s, const IndexTuple& idx) {
    std::vector<std::size_t> pos(idx.size());
    for (std::size_t d = 0; d < idx.size(); ++d) {
      const auto& labels = s.dims[d].labels;
      pos[d] = static_cast<std::size_t>(
          std::find(labels.begin(), labels.end(), idx[d]) - labels.begin());
    }
    return pos;
  };

  for (const auto& r : table.records()) {
    Box b;
    for (std::size_t p : positions_of(table.output_schema(), r.out_idx)) {
      b.iv.emplace_back(p, p);
    }
    for (std::size_t p :
         positions_of(table.input_schemas()[r.in_slot], r.in_idx)) {
      b.iv.emplace_back(p, p);
    }
    groups[{r.in_slot, r.kind}].push_back(std::move(b));
  }

  ordered_json runs = ordered_json::array();
  for (auto& [key, boxes] : groups) {
    std::size_t axes = boxes.empty() ? 0 : boxes[0].iv.size();
    for (std::size_t a = axes; a-- > 0;) {
      boxes = merge_axis(std::move(boxes), a);
    }
    std::sort(boxes.begin(), boxes.end());

    const auto& in_schema = table.input_schemas()[key.first];
    std::size_t out_rank = table.output_schema().dims.size();
    for (const auto& b : boxes) {
      ordered_json run;
      run["slot"] = key.first;
      run["kind"] = influence_kind_name(key.second);
      ordered_json out_iv = ordered_json::array();
      for (std::size_t d = 0; d < out_rank; ++d) {
        const auto& labels = table.output_schema().dims[d].labels;
        out_iv.push_back(ordered_json::array(
            {labels[b.iv[d].first], labels[b.iv[d].second]}));
      }
      ordered_json in_iv = ordered_json::array();
      for (std::size_t d = 0; d < in_schema.dims.size(); ++d) {
        const auto& labels = in_schema.dims[d].labels;
        in_iv.push_back(ordered_json::array({labels[b.iv[out_rank + d].first],
                                             labels[b.iv[out_rank + d].second]}));
      }
      run["out"] = std::move(out_iv);
      run["in"] = std::move(in_iv);
      runs.push_back(std::move(run));
    }
  }

  ordered_json body;
  ordered_json inputs = ordered_json::array();
  for (const auto& s : table.input_schemas()) {
    inputs.push_back(schema_to_json(s));
  }
  body["inputs"] = std::move(inputs);
  body["output"] = schema_to_json(table.output_schema());
  ordered_json comp;
  comp["direct"] = completeness_name(table.completeness(InfluenceKind::Direct));
  comp["indirect"] =
      completeness_name(table.completeness(InfluenceKind::Indirect));
  body["completeness"] = std::move(comp);
  ordered_json org;
  org["kind"] = origin_kind_name(table.origin().kind);
  org["n"] = table.origin().example_count;
  org["ts"] = table.origin().timestamp;
  body["origin"] = std::move(org);
  body["runs"] = std::move(runs);

  return std::string(kMagic) + "\n" + body.dump() + "\n";
}

LineageTable decompress_table(const std::string& payload) {
  std::istringstream in(payload);
  std::string magic;
  if (!std::getline(in, magic) || magic != kMagic) {
    fail(ErrorCode::CorruptPayload, "missing XPLT1 magic line");
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  ordered_json body;
  try {
    body = ordered_json::parse(rest.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CorruptPayload, std::string("payload body: ") + e.what());
  }
  if (!body.is_object() || !body.contains("inputs") ||
      !body.contains("output") || !body.contains("completeness") ||
      !body.contains("origin") || !body.contains("runs") ||
      !body["inputs"].is_array() || !body["runs"].is_array()) {
    fail(ErrorCode::CorruptPayload, "payload body shape is wrong");
  }

  std::vector<ContainerSchema> inputs;
  for (const auto& sj : body["inputs"]) inputs.push_back(schema_from_json(sj));
  ContainerSchema output = schema_from_json(body["output"]);

  const auto& cj = body["completeness"];
  const auto& oj = body["origin"];
  if (!cj.is_object() || !cj.contains("direct") || !cj.contains("indirect") ||
      !oj.is_object() || !oj.contains("kind") || !oj.contains("n") ||
      !oj.contains("ts")) {
    fail(ErrorCode::CorruptPayload, "payload metadata shape is wrong");
  }

  Completeness direct, indirect;
  Origin origin;
  try {
    direct = completeness_from(cj["direct"].get<std::string>());
    indirect = completeness_from(cj["indirect"].get<std::string>());
    std::string ok = oj["kind"].get<std::string>();
    if (ok == "declared") origin.kind = Origin::Kind::Declared;
    else if (ok == "captured_exact") origin.kind = Origin::Kind::CapturedExact;
    else if (ok == "oracle") origin.kind = Origin::Kind::Oracle;
    else if (ok == "learnt") origin.kind = Origin::Kind::Learnt;
    else fail(ErrorCode::CorruptPayload, "unknown origin kind '" + ok + "'");
    origin.example_count = oj["n"].get<std::uint64_t>();
    origin.timestamp = oj["ts"].get<std::int64_t>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::CorruptPayload, std::string("payload metadata: ") + e.what());
  }

  auto interval_positions = [](const std::vector<std::string>& labels,
                               const ordered_json& iv) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_string() ||
        !iv[1].is_string()) {
      fail(ErrorCode::CorruptPayload, "label interval must be a string pair");
    }
    auto lo = std::find(labels.begin(), labels.end(), iv[0].get<std::string>());
    auto hi = std::find(labels.begin(), labels.end(), iv[1].get<std::string>());
    if (lo == labels.end() || hi == labels.end() || hi < lo) {
      fail(ErrorCode::CorruptPayload,
           "label interval [" + iv[0].get<std::string>() + "," +
               iv[1].get<std::string>() + "] does not resolve");
    }
    return std::make_pair(
        static_cast<std::size_t>(lo - labels.begin()),
        static_cast<std::size_t>(hi - labels.begin()));
  };

  std::vector<LineageRecord> records;
  for (const auto& run : body["runs"]) {
    if (!run.is_object() || !run.contains("slot") || !run.contains("kind") ||
        !run.contains("out") || !run.contains("in") ||
        !run["out"].is_array() || !run["in"].is_array()) {
      fail(ErrorCode::CorruptPayload, "run block shape is wrong");
    }
    std::uint32_t slot;
    InfluenceKind kind;
    try {
      slot = run["slot"].get<std::uint32_t>();
      kind = influence_kind_from(run["kind"].get<std::string>());
    } catch (const Error&) {
      fail(ErrorCode::CorruptPayload, "run kind is not a known influence kind");
    } catch (const std::exception& e) {
      fail(ErrorCode::CorruptPayload, std::string("run header: ") + e.what());
    }
    if (slot >= inputs.size()) {
      fail(ErrorCode::CorruptPayload,
           "run slot " + std::to_string(slot) + " out of range");
    }
    const auto& in_schema = inputs[slot];
    if (run["out"].size() != output.dims.size() ||
        run["in"].size() != in_schema.dims.size()) {
      fail(ErrorCode::CorruptPayload, "run interval arity mismatch");
    }

    std::vector<std::pair<std::size_t, std::size_t>> iv;
    for (std::size_t d = 0; d < output.dims.size(); ++d) {
      iv.push_back(interval_positions(output.dims[d].labels, run["out"][d]));
    }
    for (std::size_t d = 0; d < in_schema.dims.size(); ++d) {
      iv.push_back(interval_positions(in_schema.dims[d].labels, run["in"][d]));
    }

    // expand the box
    std::vector<std::size_t> cursor;
    for (const auto& [lo, hi] : iv) cursor.push_back(lo);
    bool done = false;
    while (!done) {
      LineageRecord r;
      r.in_slot = slot;
      r.kind = kind;
      for (std::size_t d = 0; d < output.dims.size(); ++d) {
        r.out_idx.push_back(output.dims[d].labels[cursor[d]]);
      }
      for (std::size_t d = 0; d < in_schema.dims.size(); ++d) {
        r.in_idx.push_back(
            in_schema.dims[d].labels[cursor[output.dims.size() + d]]);
      }
      records.push_back(std::move(r));

      done = true;
      for (std::size_t d = cursor.size(); d-- > 0;) {
        if (cursor[d] < iv[d].second) {
          ++cursor[d];
          for (std::size_t k = d + 1; k < cursor.size(); ++k) {
            cursor[k] = iv[k].first;
          }
          done = false;
          break;
        }
      }
    }
  }

  return LineageTable::build(std::move(inputs), std::move(output),
                             std::move(records), direct, indirect, origin);
}

}  // namespace xprov
