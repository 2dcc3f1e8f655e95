#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xprov/builtins.hpp"
#include "xprov/external.hpp"
#include "xprov/kb.hpp"
#include "xprov/learn.hpp"
#include "xprov/tags.hpp"

namespace xprov {

// How a node's operation is actually executed.
struct ExecSpec {
  bool builtin = true;
  // External command prefix; input paths and the output path get appended.
  std::vector<std::string> argv;
  std::int64_t timeout_ms = 30000;
};

struct WorkflowNode {
  std::string id;
  OperationSignature op;
  ExecSpec exec;
  std::vector<std::string> inputs;  // container ids
  std::string output;               // container id
  // Constraint tags asserted by the workflow author.
  std::vector<ConstraintTag> declared_tags;
};

struct ContainerDecl {
  std::string id;
  std::string path;  // relative paths resolve against the workflow file
};

struct Workflow {
  std::vector<ContainerDecl> containers;
  std::vector<WorkflowNode> nodes;  // topologically ordered after parsing
};

// Parses and validates a workflow document:
//
//   {"containers": [{"id": "D0", "path": "d0.json"}],
//    "nodes": [{"id": "clean",
//               "op": {"namespace": "pandas", "name": "dropna",
//                      "params": {}},
//               "exec": "builtin",          // or {"argv": [...],
//                                           //     "timeout_ms": 5000}
//               "inputs": ["D0"], "output": "D1",
//               "tags": ["Slice[0]"]}]}     // optional declarations
//
// Errors: ParseError (malformed document), DuplicateId (reused container,
// node, or output ids), UnknownContainerRef (input nobody declares or
// produces), CycleDetected. Nodes come back topologically sorted, ties in
// declaration order.
Workflow parse_workflow(const std::string& json_text);
Workflow load_workflow_file(const std::string& path);

// Executor for one node's operation: dispatches to the built-in by name or
// spawns the external command.
RunFn node_run_fn(const OperationSignature& op, const ExecSpec& exec,
                  const std::string& output_id);

enum class LineagePolicy { DeclaredOnly, Oracle, Learn };

LineagePolicy lineage_policy_from(const std::string& name);
const char* lineage_policy_name(LineagePolicy p);

struct NodeRun {
  WorkflowNode node;
  // How the lineage was obtained: "kb", "captured", "oracle", "learnt",
  // "declared", or "unknown".
  std::string resolution;
  // Executions on the node's full-size inputs.
  std::size_t executions = 0;
  LineageTable lineage;
};

struct RunRecord {
  std::map<std::string, Container> containers;  // workflow id -> value
  std::vector<NodeRun> nodes;                   // topological order
};

struct RunOptions {
  LineagePolicy policy = LineagePolicy::DeclaredOnly;
  // Optional shared store: consulted before deriving lineage, updated with
  // whatever gets derived.
  KnowledgeBase* kb = nullptr;
  LearnConfig learn;
  // Base directory for each container declaration's relative path.
  std::string base_dir = ".";
};

// Executes every node in order and resolves its lineage, trying in turn:
// a stored table for this exact node signature, analytic capture for
// built-ins, the policy's probing strategy (oracle reruns or learning over
// small inputs, external nodes only), tags declared on the node, and
// finally an Unknown table.
RunRecord run_workflow(const Workflow& wf, const RunOptions& opts);

// Persists a run as a directory: record.json plus containers/*.json,
// lineage/<node>.csv (readable) and lineage/<node>.xplt (authoritative).
void save_run_record(const RunRecord& rec, const std::string& dir);
RunRecord load_run_record(const std::string& dir);

}  // namespace xprov
