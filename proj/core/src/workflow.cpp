#include "xprov/workflow.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"
#include "xprov/container_io.hpp"
#include "xprov/error.hpp"
#include "xprov/lineage_io.hpp"
#include "xprov/oracle.hpp"

namespace xprov {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

OperationSignature parse_op(const ordered_json& j) {
  if (!j.is_object() || !j.contains("namespace") || !j.contains("name") ||
      !j["namespace"].is_string() || !j["name"].is_string()) {
    fail(ErrorCode::ParseError, "node op needs a namespace and a name");
  }
  std::vector<std::pair<std::string, Scalar>> params;
  if (j.contains("params")) {
    if (!j["params"].is_object()) {
      fail(ErrorCode::ParseError, "op params must be an object");
    }
    for (const auto& [key, value] : j["params"].items()) {
      params.emplace_back(key, scalar_from_json(value));
    }
  }
  return OperationSignature::make(j["namespace"].get<std::string>(),
                                  j["name"].get<std::string>(),
                                  std::move(params));
}

ExecSpec parse_exec(const ordered_json& j) {
  ExecSpec spec;
  if (j.is_string()) {
    if (j.get<std::string>() != "builtin") {
      fail(ErrorCode::ParseError,
           "exec must be \"builtin\" or an external spec object");
    }
    return spec;
  }
  if (!j.is_object() || !j.contains("argv") || !j["argv"].is_array() ||
      j["argv"].empty()) {
    fail(ErrorCode::ParseError, "external exec needs a nonempty argv array");
  }
  spec.builtin = false;
  for (const auto& a : j["argv"]) {
    if (!a.is_string()) {
      fail(ErrorCode::ParseError, "exec argv entries must be strings");
    }
    spec.argv.push_back(a.get<std::string>());
  }
  if (j.contains("timeout_ms")) {
    if (!j["timeout_ms"].is_number_integer()) {
      fail(ErrorCode::ParseError, "timeout_ms must be an integer");
    }
    spec.timeout_ms = j["timeout_ms"].get<std::int64_t>();
  }
  return spec;
}

std::vector<WorkflowNode> topo_sort(std::vector<WorkflowNode> nodes,
                                    const std::set<std::string>& declared) {
  std::map<std::string, std::size_t> producer;  // container id -> node pos
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    producer[nodes[i].output] = i;
  }

  std::vector<std::size_t> pending_inputs(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> consumers(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& in : nodes[i].inputs) {
      if (declared.count(in)) continue;
      auto it = producer.find(in);
      if (it == producer.end()) {
        fail(ErrorCode::UnknownContainerRef,
             "node '" + nodes[i].id + "' reads undeclared container '" + in +
                 "'");
      }
      ++pending_inputs[i];
      consumers[it->second].push_back(i);
    }
  }

  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (pending_inputs[i] == 0) ready.push_back(i);
  }
  std::vector<WorkflowNode> sorted;
  std::size_t cursor = 0;
  while (cursor < ready.size()) {
    std::size_t i = ready[cursor++];
    sorted.push_back(nodes[i]);
    for (std::size_t c : consumers[i]) {
      if (--pending_inputs[c] == 0) ready.push_back(c);
    }
  }
  if (sorted.size() != nodes.size()) {
    fail(ErrorCode::CycleDetected, "workflow nodes form a cycle");
  }
  return sorted;
}

Origin declared_now() { return Origin::declared(std::time(nullptr)); }

}  // namespace

Workflow parse_workflow(const std::string& json_text) {
  ordered_json doc = ordered_json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    fail(ErrorCode::ParseError, "workflow is not a JSON object");
  }

  Workflow wf;
  std::set<std::string> container_ids;
  if (doc.contains("containers")) {
    if (!doc["containers"].is_array()) {
      fail(ErrorCode::ParseError, "containers must be an array");
    }
    for (const auto& c : doc["containers"]) {
      if (!c.is_object() || !c.contains("id") || !c.contains("path") ||
          !c["id"].is_string() || !c["path"].is_string()) {
        fail(ErrorCode::ParseError, "container declarations need id and path");
      }
      ContainerDecl decl{c["id"].get<std::string>(),
                         c["path"].get<std::string>()};
      if (!container_ids.insert(decl.id).second) {
        fail(ErrorCode::DuplicateId, "container '" + decl.id +
                                         "' declared twice");
      }
      wf.containers.push_back(std::move(decl));
    }
  }

  std::set<std::string> node_ids;
  std::set<std::string> produced = container_ids;
  if (doc.contains("nodes")) {
    if (!doc["nodes"].is_array()) {
      fail(ErrorCode::ParseError, "nodes must be an array");
    }
    for (const auto& n : doc["nodes"]) {
      if (!n.is_object() || !n.contains("id") || !n.contains("op") ||
          !n.contains("inputs") || !n.contains("output") ||
          !n["id"].is_string() || !n["inputs"].is_array() ||
          !n["output"].is_string()) {
        fail(ErrorCode::ParseError,
             "nodes need id, op, inputs, and output fields");
      }
      WorkflowNode node;
      node.id = n["id"].get<std::string>();
      if (!node_ids.insert(node.id).second) {
        fail(ErrorCode::DuplicateId, "node '" + node.id + "' declared twice");
      }
      node.op = parse_op(n["op"]);
      node.exec = n.contains("exec") ? parse_exec(n["exec"]) : ExecSpec{};
      for (const auto& in : n["inputs"]) {
        if (!in.is_string()) {
          fail(ErrorCode::ParseError, "node inputs must be container ids");
        }
        node.inputs.push_back(in.get<std::string>());
      }
      node.output = n["output"].get<std::string>();
      if (!produced.insert(node.output).second) {
        fail(ErrorCode::DuplicateId,
             "container '" + node.output + "' produced or declared twice");
      }
      if (n.contains("tags")) {
        if (!n["tags"].is_array()) {
          fail(ErrorCode::ParseError, "node tags must be an array");
        }
        for (const auto& t : n["tags"]) {
          if (!t.is_string()) {
            fail(ErrorCode::ParseError, "node tags must be strings");
          }
          node.declared_tags.push_back(
              ConstraintTag::parse(t.get<std::string>()));
        }
      }
      wf.nodes.push_back(std::move(node));
    }
  }

  wf.nodes = topo_sort(std::move(wf.nodes), container_ids);
  return wf;
}

Workflow load_workflow_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::InvalidPath, "cannot read workflow file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workflow(buf.str());
}

RunFn node_run_fn(const OperationSignature& op, const ExecSpec& exec,
                  const std::string& output_id) {
  if (exec.builtin) {
    return [op, output_id](const std::vector<Container>& inputs) {
      return execute_builtin(op, inputs, output_id);
    };
  }
  ExternalOpSpec spec;
  spec.argv = exec.argv;
  spec.output_id = output_id;
  spec.timeout_ms = exec.timeout_ms;
  return external_runner(std::move(spec));
}

LineagePolicy lineage_policy_from(const std::string& name) {
  if (name == "declared-only") return LineagePolicy::DeclaredOnly;
  if (name == "oracle") return LineagePolicy::Oracle;
  if (name == "learn") return LineagePolicy::Learn;
  fail(ErrorCode::ParseError, "unknown lineage policy '" + name + "'");
}

const char* lineage_policy_name(LineagePolicy p) {
  switch (p) {
    case LineagePolicy::DeclaredOnly: return "declared-only";
    case LineagePolicy::Oracle: return "oracle";
    case LineagePolicy::Learn: return "learn";
  }
  return "declared-only";
}

namespace {

struct Resolution {
  Container output;
  LineageTable lineage;
  std::string how;
  std::size_t executions = 0;
  // Whether the lineage is worth writing back to the store.
  bool store = false;
};

Resolution resolve_node(const WorkflowNode& node,
                        const std::vector<Container>& inputs,
                        const RunOptions& opts) {
  Resolution res;
  RunFn run = node_run_fn(node.op, node.exec, node.output);
  std::string node_key = node_signature_key(node.op, inputs);

  if (opts.kb) {
    if (std::optional<LineageTable> hit = opts.kb->get_lineage(node_key)) {
      res.output = run(inputs);
      res.lineage = std::move(*hit);
      res.how = "kb";
      res.executions = 1;
      return res;
    }
  }

  if (node.exec.builtin) {
    res.output = run(inputs);
    res.lineage = capture_exact_lineage(node.op, inputs, res.output);
    res.how = "captured";
    res.executions = 1;
    res.store = true;
    return res;
  }

  if (opts.policy == LineagePolicy::Oracle) {
    OracleStats stats;
    res.lineage = influence_oracle(run, inputs, &stats, &res.output);
    res.how = "oracle";
    res.executions = stats.executions;
    res.store = true;
    return res;
  }

  if (opts.policy == LineagePolicy::Learn && inputs.size() == 1) {
    LearntTags learnt;
    bool have = false;
    if (opts.kb) {
      if (std::optional<KnowledgeBase::TaggedOp> hit =
              opts.kb->get_tags(node.op.canonical_key())) {
        learnt.tags = std::move(hit->tags);
        learnt.origins = std::move(hit->origins);
        have = true;
      }
    }
    if (!have) {
      learnt = learn_tags(run, node.op, inputs[0], opts.learn);
      if (opts.kb) {
        opts.kb->put_tags(node.op.canonical_key(),
                          {learnt.tags, learnt.origins});
      }
    }
    Extrapolation ex = extrapolate_lineage(run, inputs, learnt);
    res.output = std::move(ex.output);
    res.lineage = std::move(ex.lineage);
    res.how = "learnt";
    res.executions = ex.executions;
    res.store = !learnt.tags.empty();
    return res;
  }

  if (!node.declared_tags.empty() && inputs.size() == 1) {
    LearntTags declared;
    declared.tags = node.declared_tags;
    declared.origins.assign(node.declared_tags.size(), declared_now());
    Extrapolation ex = extrapolate_lineage(node_run_fn(node.op, node.exec,
                                                       node.output),
                                           inputs, declared);
    res.output = std::move(ex.output);
    res.lineage = std::move(ex.lineage);
    res.how = "declared";
    res.executions = ex.executions;
    return res;
  }

  res.output = run(inputs);
  std::vector<ContainerSchema> in_schemas;
  for (const auto& in : inputs) in_schemas.push_back(in.schema());
  res.lineage = LineageTable::unknown(std::move(in_schemas),
                                      res.output.schema(), declared_now());
  res.how = "unknown";
  res.executions = 1;
  return res;
}

}  // namespace

RunRecord run_workflow(const Workflow& wf, const RunOptions& opts) {
  RunRecord rec;
  for (const auto& decl : wf.containers) {
    fs::path p(decl.path);
    if (p.is_relative()) p = fs::path(opts.base_dir) / p;
    rec.containers.emplace(decl.id,
                           load_container_file(p.string()).with_id(decl.id));
  }

  for (const auto& node : wf.nodes) {
    std::vector<Container> inputs;
    for (const auto& in : node.inputs) {
      auto it = rec.containers.find(in);
      if (it == rec.containers.end()) {
        fail(ErrorCode::UnknownContainerRef,
             "node '" + node.id + "' reads missing container '" + in + "'");
      }
      inputs.push_back(it->second);
    }

    Resolution res = resolve_node(node, inputs, opts);
    if (opts.kb && res.store) {
      opts.kb->put_lineage(node_signature_key(node.op, inputs), res.lineage);
    }

    NodeRun nr;
    nr.node = node;
    nr.resolution = res.how;
    nr.executions = res.executions;
    nr.lineage = std::move(res.lineage);
    rec.containers.emplace(node.output, std::move(res.output));
    rec.nodes.push_back(std::move(nr));
  }
  return rec;
}

namespace {

std::string safe_file_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_' || c == '.')
               ? c
               : '_';
  }
  return out.empty() ? "_" : out;
}

ordered_json exec_to_json(const ExecSpec& exec) {
  if (exec.builtin) return "builtin";
  ordered_json j;
  j["argv"] = exec.argv;
  j["timeout_ms"] = exec.timeout_ms;
  return j;
}

ordered_json op_to_json(const OperationSignature& op) {
  ordered_json j;
  j["namespace"] = op.ns;
  j["name"] = op.name;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : op.params) params[k] = scalar_to_json(v);
  j["params"] = std::move(params);
  return j;
}

}  // namespace

void save_run_record(const RunRecord& rec, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "containers", ec);
  fs::create_directories(fs::path(dir) / "lineage", ec);
  if (ec) {
    fail(ErrorCode::InvalidPath, "cannot create run record at " + dir);
  }

  ordered_json doc;
  doc["containers"] = ordered_json::array();
  for (const auto& [id, container] : rec.containers) {
    std::string rel = "containers/" + safe_file_name(id) + ".json";
    save_container_file(container, (fs::path(dir) / rel).string());
    ordered_json c;
    c["id"] = id;
    c["file"] = rel;
    doc["containers"].push_back(std::move(c));
  }

  doc["nodes"] = ordered_json::array();
  for (const auto& nr : rec.nodes) {
    std::string base = "lineage/" + safe_file_name(nr.node.id);
    {
      std::ofstream csv(fs::path(dir) / (base + ".csv"), std::ios::binary);
      csv << lineage_to_csv(nr.lineage);
    }
    {
      std::ofstream blob(fs::path(dir) / (base + ".xplt"), std::ios::binary);
      blob << compress_table(nr.lineage);
    }
    ordered_json n;
    n["id"] = nr.node.id;
    n["op"] = op_to_json(nr.node.op);
    n["exec"] = exec_to_json(nr.node.exec);
    n["inputs"] = nr.node.inputs;
    n["output"] = nr.node.output;
    ordered_json tags = ordered_json::array();
    for (const auto& t : nr.node.declared_tags) tags.push_back(t.repr());
    n["tags"] = std::move(tags);
    n["resolution"] = nr.resolution;
    n["executions"] = nr.executions;
    n["lineage"] = base + ".xplt";
    doc["nodes"].push_back(std::move(n));
  }

  std::ofstream out(fs::path(dir) / "record.json", std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) {
    fail(ErrorCode::InvalidPath, "cannot write run record at " + dir);
  }
}

RunRecord load_run_record(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "record.json", std::ios::binary);
  if (!in) {
    fail(ErrorCode::InvalidPath, "no run record at " + dir);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ordered_json doc = ordered_json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("containers") ||
      !doc.contains("nodes")) {
    fail(ErrorCode::ParseError, "malformed record.json in " + dir);
  }

  RunRecord rec;
  try {
    for (const auto& c : doc["containers"]) {
      std::string id = c.at("id").get<std::string>();
      std::string rel = c.at("file").get<std::string>();
      rec.containers.emplace(
          id, load_container_file((fs::path(dir) / rel).string()).with_id(id));
    }
    for (const auto& n : doc["nodes"]) {
      NodeRun nr;
      nr.node.id = n.at("id").get<std::string>();
      nr.node.op = parse_op(n.at("op"));
      nr.node.exec = parse_exec(n.at("exec"));
      for (const auto& i : n.at("inputs")) {
        nr.node.inputs.push_back(i.get<std::string>());
      }
      nr.node.output = n.at("output").get<std::string>();
      for (const auto& t : n.at("tags")) {
        nr.node.declared_tags.push_back(
            ConstraintTag::parse(t.get<std::string>()));
      }
      nr.resolution = n.at("resolution").get<std::string>();
      nr.executions = n.at("executions").get<std::size_t>();
      std::ifstream blob(fs::path(dir) / n.at("lineage").get<std::string>(),
                         std::ios::binary);
      if (!blob) {
        fail(ErrorCode::ParseError,
             "missing lineage blob for node '" + nr.node.id + "'");
      }
      std::ostringstream bbuf;
      bbuf << blob.rdbuf();
      nr.lineage = decompress_table(bbuf.str());
      rec.nodes.push_back(std::move(nr));
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::ParseError,
         std::string("malformed record.json: ") + e.what());
  }
  return rec;
}

}  // namespace xprov
