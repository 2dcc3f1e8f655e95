// Command-line front end over the lineage engine.
//
//   xprov run <workflow.json> --out DIR      execute + resolve lineage
//   xprov query DIR --from A --to B ...      trace cells between containers
//   xprov assert DIR --node N --tag T        check a constraint tag
//   xprov check-leakage DIR                  flag influence crossing records
//   xprov check-reorder DIR --parent --child constraint-based swap check
//   xprov kb list | kb add-tags              inspect / seed the store
//
// Exit codes: 0 success, 1 finding (a failed assertion, leakage, or a
// non-reorderable pair), 2 usage or parse problem, 3 execution or internal
// failure, 4 unresolvable reference. Query output never includes
// timestamps, so identical queries print identical bytes.

#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xprov/container_io.hpp"
#include "xprov/error.hpp"
#include "xprov/query.hpp"
#include "xprov/workflow.hpp"

namespace {

using namespace xprov;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::Precondition:
      return 2;
    case ErrorCode::UnknownOperation:
    case ErrorCode::NotBuiltin:
    case ErrorCode::UnknownContainerRef:
    case ErrorCode::UnknownTarget:
    case ErrorCode::InvalidPath:
    case ErrorCode::DuplicateId:
      return 4;
    default:
      return 3;
  }
}

IndexTuple parse_index(const std::string& text) {
  IndexTuple idx;
  std::string part;
  for (char ch : text) {
    if (ch == ',') {
      idx.push_back(part);
      part.clear();
    } else {
      part.push_back(ch);
    }
  }
  idx.push_back(part);
  return idx;
}

InfluenceKind parse_kind(const std::string& text) {
  if (text == "direct") return InfluenceKind::Direct;
  if (text == "indirect") return InfluenceKind::Indirect;
  fail(ErrorCode::ParseError, "kind must be 'direct' or 'indirect'");
}

std::optional<KnowledgeBase> open_kb(const std::string& dir) {
  std::optional<KnowledgeBase> kb;
  if (!dir.empty()) kb.emplace(dir);
  return kb;
}

struct RunArgs {
  std::string workflow;
  std::string out_dir;
  std::string policy = "declared-only";
  std::string kb_dir;
  std::uint64_t seed = 42;
};

int cmd_run(const RunArgs& a) {
  Workflow wf = load_workflow_file(a.workflow);
  auto kb = open_kb(a.kb_dir);
  RunOptions opts;
  opts.policy = lineage_policy_from(a.policy);
  opts.kb = kb ? &*kb : nullptr;
  opts.learn.seed = a.seed;
  opts.base_dir = std::filesystem::path(a.workflow).parent_path().string();
  if (opts.base_dir.empty()) opts.base_dir = ".";

  RunRecord rec = run_workflow(wf, opts);
  save_run_record(rec, a.out_dir);
  for (const auto& nr : rec.nodes) {
    std::cout << nr.node.id << ": " << nr.resolution << " (" << nr.executions
              << (nr.executions == 1 ? " execution)" : " executions)")
              << "\n";
  }
  return 0;
}

struct QueryArgs {
  std::string record_dir;
  std::string from;
  std::string to;
  std::vector<std::string> indices;
  std::string kind = "indirect";
};

int cmd_query(const QueryArgs& a) {
  RunRecord rec = load_run_record(a.record_dir);
  std::vector<IndexTuple> indices;
  for (const auto& text : a.indices) indices.push_back(parse_index(text));
  ProvQueryResult res =
      prov_query(rec, a.from, indices, a.to, parse_kind(a.kind));
  for (const auto& idx : res.indices) {
    std::cout << index_repr(idx) << "\n";
  }
  std::cout << "completeness: " << completeness_name(res.completeness)
            << "\n";
  std::cout << "origin: " << res.origin.repr() << "\n";
  return 0;
}

struct AssertArgs {
  std::string record_dir;
  std::string node;
  std::string tag;
  std::string kb_dir;
};

int cmd_assert(const AssertArgs& a) {
  RunRecord rec = load_run_record(a.record_dir);
  auto kb = open_kb(a.kb_dir);
  TagAssertion res = assert_tag(rec, a.node, a.tag, kb ? &*kb : nullptr);
  if (!res.holds) {
    std::cout << a.tag << ": does not hold\n";
    return 1;
  }
  for (const auto& tag : res.satisfying) {
    std::cout << tag.repr() << ": holds (" << res.source << ")\n";
  }
  return 0;
}

int cmd_check_leakage(const std::string& record_dir) {
  RunRecord rec = load_run_record(record_dir);
  std::vector<LeakageFinding> findings = check_row_leakage(rec);
  if (findings.empty()) {
    std::cout << "no row leakage detected\n";
    return 0;
  }
  for (const auto& f : findings) {
    std::cout << f.node_id << ": " << f.detail << "\n";
  }
  return 1;
}

struct ReorderArgs {
  std::string record_dir;
  std::string parent;
  std::string child;
  std::string kb_dir;
  bool verify = false;
};

int cmd_check_reorder(const ReorderArgs& a) {
  RunRecord rec = load_run_record(a.record_dir);
  auto kb = open_kb(a.kb_dir);
  bool reorderable =
      double_slice(rec, a.parent, a.child, kb ? &*kb : nullptr);
  std::cout << "reorderable: " << (reorderable ? "yes" : "no") << "\n";
  if (!reorderable) return 1;
  if (a.verify) {
    bool same = verify_reorder(rec, a.parent, a.child);
    std::cout << "verified: " << (same ? "outputs match" : "outputs differ")
              << "\n";
    if (!same) return 1;
  }
  return 0;
}

int cmd_kb_list(const std::string& kb_dir) {
  if (kb_dir.empty()) {
    fail(ErrorCode::Precondition, "a knowledge base directory is required");
  }
  KnowledgeBase kb(kb_dir);
  for (const auto& row : kb.rows()) {
    std::cout << row.kind << " " << row.key << " -> " << row.file << "\n";
  }
  return 0;
}

struct KbAddArgs {
  std::string kb_dir;
  std::string op_key;
  std::vector<std::string> tags;
};

int cmd_kb_add_tags(const KbAddArgs& a) {
  if (a.kb_dir.empty()) {
    fail(ErrorCode::Precondition, "a knowledge base directory is required");
  }
  KnowledgeBase kb(a.kb_dir);
  KnowledgeBase::TaggedOp value;
  for (const auto& text : a.tags) {
    value.tags.push_back(ConstraintTag::parse(text));
  }
  value.origins.assign(value.tags.size(),
                       Origin::declared(std::time(nullptr)));
  kb.put_tags(a.op_key, value);
  std::cout << "stored " << value.tags.size() << " tag(s) for " << a.op_key
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fine-grained lineage for array-processing workflows"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute a workflow and record it");
  run->add_option("workflow", run_args.workflow, "Workflow JSON file")
      ->required();
  run->add_option("--out", run_args.out_dir, "Directory for the run record")
      ->required();
  run->add_option("--policy", run_args.policy,
                  "declared-only | oracle | learn");
  run->add_option("--kb", run_args.kb_dir, "Knowledge base directory")
      ->envname("XPROV_KB");
  run->add_option("--seed", run_args.seed, "Seed for the learning draws");

  QueryArgs query_args;
  auto* query =
      app.add_subcommand("query", "Trace cells between two containers");
  query->add_option("record", query_args.record_dir, "Run record directory")
      ->required();
  query->add_option("--from", query_args.from, "Container the cells live in")
      ->required();
  query->add_option("--to", query_args.to, "Container to trace into")
      ->required();
  query
      ->add_option("--index", query_args.indices,
                   "Cell index as comma-joined labels, e.g. 0,Age "
                   "(repeatable)")
      ->required();
  query->add_option("--kind", query_args.kind, "direct | indirect");

  AssertArgs assert_args;
  auto* asrt =
      app.add_subcommand("assert", "Check a constraint tag on a node");
  asrt->add_option("record", assert_args.record_dir, "Run record directory")
      ->required();
  asrt->add_option("--node", assert_args.node, "Node id")->required();
  asrt->add_option("--tag", assert_args.tag,
                   "Tag text, e.g. Slice[0]; bare Slice or Condition lists "
                   "every satisfying parameterization")
      ->required();
  asrt->add_option("--kb", assert_args.kb_dir, "Knowledge base directory")
      ->envname("XPROV_KB");

  std::string leakage_dir;
  auto* leakage = app.add_subcommand(
      "check-leakage", "Flag nodes whose influence crosses records");
  leakage->add_option("record", leakage_dir, "Run record directory")
      ->required();

  ReorderArgs reorder_args;
  auto* reorder = app.add_subcommand(
      "check-reorder", "Check whether two adjacent nodes can swap");
  reorder
      ->add_option("record", reorder_args.record_dir, "Run record directory")
      ->required();
  reorder->add_option("--parent", reorder_args.parent, "Upstream node id")
      ->required();
  reorder->add_option("--child", reorder_args.child, "Downstream node id")
      ->required();
  reorder->add_option("--kb", reorder_args.kb_dir,
                      "Knowledge base directory")
      ->envname("XPROV_KB");
  reorder->add_flag("--verify", reorder_args.verify,
                    "Also execute both orders and compare outputs");

  auto* kb_cmd = app.add_subcommand("kb", "Knowledge base utilities");
  kb_cmd->require_subcommand(1);
  std::string kb_list_dir;
  auto* kb_list = kb_cmd->add_subcommand("list", "Print every index row");
  kb_list->add_option("--kb", kb_list_dir, "Knowledge base directory")
      ->envname("XPROV_KB");
  KbAddArgs kb_add_args;
  auto* kb_add = kb_cmd->add_subcommand(
      "add-tags", "Declare constraint tags for an operation");
  kb_add->add_option("--kb", kb_add_args.kb_dir, "Knowledge base directory")
      ->envname("XPROV_KB");
  kb_add->add_option("--op", kb_add_args.op_key, "Canonical operation key")
      ->required();
  kb_add->add_option("--tag", kb_add_args.tags, "Tag text (repeatable)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (query->parsed()) return cmd_query(query_args);
    if (asrt->parsed()) return cmd_assert(assert_args);
    if (leakage->parsed()) return cmd_check_leakage(leakage_dir);
    if (reorder->parsed()) return cmd_check_reorder(reorder_args);
    if (kb_cmd->parsed()) {
      if (kb_list->parsed()) return cmd_kb_list(kb_list_dir);
      if (kb_add->parsed()) return cmd_kb_add_tags(kb_add_args);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
