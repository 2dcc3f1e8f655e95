#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "support/support.hpp"
#include "xprov/builtins.hpp"
#include "xprov/container_io.hpp"
#include "xprov/kb.hpp"
#include "xprov/lineage_io.hpp"
#include "xprov/workflow.hpp"

using namespace xprov;
using support::code_of;

namespace {

const char* kFixtureDir = XPROV_FIXTURE_DIR;
const char* kOprun = XPROV_OPRUN_PATH;

std::string fixture(const std::string& name) {
  return (std::filesystem::path(kFixtureDir) / name).string();
}

// Single-node workflow over the people fixture; exec defaults to builtin.
Workflow one_node(const std::string& ns, const std::string& name,
                  std::vector<std::pair<std::string, Scalar>> params,
                  ExecSpec exec = {},
                  std::vector<ConstraintTag> declared = {}) {
  Workflow wf;
  wf.containers.push_back({"D0", "d0.json"});
  WorkflowNode node;
  node.id = "step";
  node.op = OperationSignature::make(ns, name, std::move(params));
  node.exec = std::move(exec);
  node.inputs = {"D0"};
  node.output = "D1";
  node.declared_tags = std::move(declared);
  wf.nodes.push_back(std::move(node));
  return wf;
}

ExecSpec oprun_exec(const std::string& name, const std::string& params_json,
                    std::int64_t timeout_ms = 30000) {
  ExecSpec exec;
  exec.builtin = false;
  exec.argv = {kOprun, name, params_json};
  exec.timeout_ms = timeout_ms;
  return exec;
}

RunOptions base_opts() {
  RunOptions opts;
  opts.base_dir = kFixtureDir;
  return opts;
}

const NodeRun& node_named(const RunRecord& rec, const std::string& id) {
  for (const auto& nr : rec.nodes) {
    if (nr.node.id == id) return nr;
  }
  REQUIRE(false);
  return rec.nodes.front();
}

}  // namespace

TEST_CASE("workflow parsing reads ops, exec specs, and declared tags") {
  Workflow wf = load_workflow_file(fixture("fig1.json"));

  REQUIRE(wf.containers.size() == 1);
  CHECK(wf.containers[0].id == "D0");
  CHECK(wf.containers[0].path == "d0.json");

  REQUIRE(wf.nodes.size() == 3);
  CHECK(wf.nodes[0].id == "clean");
  CHECK(wf.nodes[1].id == "keep_adults");
  CHECK(wf.nodes[2].id == "scale");

  const WorkflowNode& filter = wf.nodes[1];
  CHECK(filter.op.ns == "duckdb");
  CHECK(filter.op.name == "filter");
  CHECK(filter.op.canonical_key() ==
        "duckdb.filter(cmp=\">\",column=\"Age\",value=30)");
  CHECK(filter.exec.builtin);
  CHECK(filter.inputs == std::vector<std::string>{"D1"});
  CHECK(filter.output == "D2");

  std::string external = R"({
    "containers": [{"id": "A", "path": "d0.json"}],
    "nodes": [{
      "id": "n",
      "op": {"namespace": "pandas", "name": "dropna"},
      "exec": {"argv": ["/usr/bin/env", "tool"], "timeout_ms": 5000},
      "inputs": ["A"], "output": "B",
      "tags": ["Slice[0]", "Identity"]
    }]
  })";
  Workflow ext = parse_workflow(external);
  REQUIRE(ext.nodes.size() == 1);
  CHECK_FALSE(ext.nodes[0].exec.builtin);
  CHECK(ext.nodes[0].exec.argv ==
        std::vector<std::string>{"/usr/bin/env", "tool"});
  CHECK(ext.nodes[0].exec.timeout_ms == 5000);
  REQUIRE(ext.nodes[0].declared_tags.size() == 2);
  CHECK(ext.nodes[0].declared_tags[0].repr() == "Slice[0]");
  CHECK(ext.nodes[0].declared_tags[1].repr() == "Identity");
}

TEST_CASE("workflow parsing sorts nodes topologically") {
  // Declared in reverse dependency order.
  std::string doc = R"({
    "containers": [{"id": "D0", "path": "d0.json"}],
    "nodes": [
      {"id": "third", "op": {"namespace": "x", "name": "sort",
        "params": {"column": "Age", "order": "asc"}},
       "inputs": ["D2"], "output": "D3"},
      {"id": "second", "op": {"namespace": "x", "name": "filter",
        "params": {"column": "Age", "cmp": ">", "value": 30}},
       "inputs": ["D1"], "output": "D2"},
      {"id": "first", "op": {"namespace": "x", "name": "dropna"},
       "inputs": ["D0"], "output": "D1"}
    ]
  })";
  Workflow wf = parse_workflow(doc);
  REQUIRE(wf.nodes.size() == 3);
  CHECK(wf.nodes[0].id == "first");
  CHECK(wf.nodes[1].id == "second");
  CHECK(wf.nodes[2].id == "third");

  // Independent nodes keep declaration order.
  std::string flat = R"({
    "containers": [{"id": "D0", "path": "d0.json"}],
    "nodes": [
      {"id": "b", "op": {"namespace": "x", "name": "dropna"},
       "inputs": ["D0"], "output": "B"},
      {"id": "a", "op": {"namespace": "x", "name": "dropna"},
       "inputs": ["D0"], "output": "A"}
    ]
  })";
  Workflow two = parse_workflow(flat);
  CHECK(two.nodes[0].id == "b");
  CHECK(two.nodes[1].id == "a");
}

TEST_CASE("workflow parsing rejects malformed documents") {
  auto parse_code = [](const std::string& text) {
    return code_of([&] { parse_workflow(text); });
  };

  CHECK(parse_code("not json") == ErrorCode::ParseError);
  CHECK(parse_code("[1, 2]") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"containers": {}})") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"containers": [{"id": "A"}]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"nodes": [{"id": "n"}]})") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"nodes": [{"id": "n", "op": {"name": "dropna"},
                                  "inputs": [], "output": "B"}]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"nodes": [{"id": "n",
                                  "op": {"namespace": "x", "name": "f"},
                                  "exec": {"argv": []},
                                  "inputs": [], "output": "B"}]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"nodes": [{"id": "n",
                                  "op": {"namespace": "x", "name": "f"},
                                  "exec": "inline",
                                  "inputs": [], "output": "B"}]})") ==
        ErrorCode::ParseError);
  CHECK(parse_code(R"({"nodes": [{"id": "n",
                                  "op": {"namespace": "x", "name": "f"},
                                  "inputs": [], "output": "B",
                                  "tags": ["NotATag"]}]})") ==
        ErrorCode::ParseError);
}

TEST_CASE("workflow parsing rejects duplicate and dangling ids") {
  CHECK(code_of([] {
          parse_workflow(R"({"containers": [
            {"id": "A", "path": "x.json"},
            {"id": "A", "path": "y.json"}]})");
        }) == ErrorCode::DuplicateId);

  CHECK(code_of([] {
          parse_workflow(R"({
            "containers": [{"id": "A", "path": "x.json"}],
            "nodes": [
              {"id": "n", "op": {"namespace": "x", "name": "f"},
               "inputs": ["A"], "output": "B"},
              {"id": "n", "op": {"namespace": "x", "name": "g"},
               "inputs": ["A"], "output": "C"}]})");
        }) == ErrorCode::DuplicateId);

  // A node may not produce an id that is already a declared container.
  CHECK(code_of([] {
          parse_workflow(R"({
            "containers": [{"id": "A", "path": "x.json"}],
            "nodes": [
              {"id": "n", "op": {"namespace": "x", "name": "f"},
               "inputs": ["A"], "output": "A"}]})");
        }) == ErrorCode::DuplicateId);

  CHECK(code_of([] {
          parse_workflow(R"({"nodes": [
            {"id": "n", "op": {"namespace": "x", "name": "f"},
             "inputs": ["nowhere"], "output": "B"}]})");
        }) == ErrorCode::UnknownContainerRef);

  // Two nodes feeding each other never become ready.
  CHECK(code_of([] {
          parse_workflow(R"({"nodes": [
            {"id": "n", "op": {"namespace": "x", "name": "f"},
             "inputs": ["B"], "output": "A"},
            {"id": "m", "op": {"namespace": "x", "name": "g"},
             "inputs": ["A"], "output": "B"}]})");
        }) == ErrorCode::CycleDetected);

  CHECK(code_of([] { load_workflow_file("/nonexistent/wf.json"); }) ==
        ErrorCode::InvalidPath);
}

TEST_CASE("node_run_fn dispatches builtins and external commands") {
  Container d0 = support::people4x3();
  OperationSignature op = OperationSignature::make("pandas", "dropna", {});

  RunFn builtin = node_run_fn(op, ExecSpec{}, "D1");
  Container via_builtin = builtin({d0});
  Container direct = execute_builtin(op, {d0}, "D1");
  CHECK(containers_equal(via_builtin, direct));

  RunFn external = node_run_fn(op, oprun_exec("dropna", "{}"), "D1");
  Container via_external = external({d0});
  CHECK(containers_equal(via_external, direct));
  CHECK(via_external.id() == "D1");
}

TEST_CASE("external execution failures carry precise codes") {
  Container d0 = support::people4x3();
  auto run_with = [&](ExecSpec exec) {
    return code_of([&] { node_run_fn(OperationSignature::make("x", "f", {}),
                                     exec, "out")({d0}); });
  };

  ExecSpec failing;
  failing.builtin = false;
  failing.argv = {"/bin/false"};
  CHECK(run_with(failing) == ErrorCode::NonZeroExit);

  ExecSpec missing;
  missing.builtin = false;
  missing.argv = {"/nonexistent/binary"};
  CHECK(run_with(missing) == ErrorCode::NonZeroExit);

  ExecSpec slow;
  slow.builtin = false;
  slow.argv = {"/bin/sh", "-c", "sleep 5"};
  slow.timeout_ms = 200;
  CHECK(run_with(slow) == ErrorCode::Timeout);

  // Exits cleanly but never writes the output file.
  ExecSpec silent;
  silent.builtin = false;
  silent.argv = {"/bin/sh", "-c", "true"};
  CHECK(run_with(silent) == ErrorCode::MalformedOutput);

  // Writes garbage where the output container should be. With one input
  // the appended arguments land in $0 (input) and $1 (output).
  ExecSpec garbage;
  garbage.builtin = false;
  garbage.argv = {"/bin/sh", "-c", "echo garbage > \"$1\""};
  CHECK(run_with(garbage) == ErrorCode::MalformedOutput);
}

TEST_CASE("builtin nodes resolve by analytic capture") {
  Workflow wf = load_workflow_file(fixture("fig1.json"));
  RunRecord rec = run_workflow(wf, base_opts());

  REQUIRE(rec.nodes.size() == 3);
  for (const auto& nr : rec.nodes) {
    CHECK(nr.resolution == "captured");
    CHECK(nr.executions == 1);
    CHECK(nr.lineage.completeness(InfluenceKind::Direct) == Completeness::Exact);
    CHECK(nr.lineage.completeness(InfluenceKind::Indirect) == Completeness::Exact);
  }
  for (const char* id : {"D0", "D1", "D2", "D3"}) {
    CHECK(rec.containers.count(id) == 1);
  }

  // The recorded tables are exactly what analytic capture produces.
  const NodeRun& clean = node_named(rec, "clean");
  Container d0 = rec.containers.at("D0");
  Container d1 = rec.containers.at("D1");
  LineageTable expect = capture_exact_lineage(clean.node.op, {d0}, d1);
  CHECK(clean.lineage.records() == expect.records());

  // D1 is the fixture minus its two incomplete people.
  CHECK(d1.dims()[0].labels == std::vector<std::string>{"0", "1"});
  CHECK(rec.containers.at("D2").dims()[0].labels ==
        std::vector<std::string>{"0", "1"});
  const Container& d3 = rec.containers.at("D3");
  CHECK(d3.get({"0", "Age"}) == support::F(1.0));
  CHECK(d3.get({"1", "Age"}) == support::F(0.0));
}

TEST_CASE("external nodes fall back per policy") {
  SUBCASE("no policy, no tags: lineage stays unknown") {
    Workflow wf = one_node("pandas", "dropna", {}, oprun_exec("dropna", "{}"));
    RunRecord rec = run_workflow(wf, base_opts());
    const NodeRun& nr = rec.nodes[0];
    CHECK(nr.resolution == "unknown");
    CHECK(nr.executions == 1);
    CHECK(nr.lineage.completeness(InfluenceKind::Direct) == Completeness::Unknown);
    CHECK(nr.lineage.completeness(InfluenceKind::Indirect) == Completeness::Unknown);
    CHECK(nr.lineage.records().empty());
    CHECK(rec.containers.at("D1").dims()[0].labels ==
          std::vector<std::string>{"0", "1"});
  }

  SUBCASE("declared tags bound the lineage from above") {
    Workflow wf = one_node(
        "pandas", "dropna", {}, oprun_exec("dropna", "{}"),
        {ConstraintTag::parse("Slice[0]"), ConstraintTag::parse("Identity")});
    RunRecord rec = run_workflow(wf, base_opts());
    const NodeRun& nr = rec.nodes[0];
    CHECK(nr.resolution == "declared");
    CHECK(nr.executions == 1);
    CHECK(nr.lineage.completeness(InfluenceKind::Direct) == Completeness::OverApprox);
    // Intersection always stamps a Learnt origin; declared tags bring no
    // observed examples, so the count stays at zero.
    CHECK(nr.lineage.origin().kind == Origin::Kind::Learnt);
    CHECK(nr.lineage.origin().example_count == 0);

    Container d0 = rec.containers.at("D0");
    Container d1 = rec.containers.at("D1");
    LineageTable exact = capture_exact_lineage(
        OperationSignature::make("pandas", "dropna", {}), {d0}, d1);
    const auto& have = nr.lineage.records();
    for (const auto& r : exact.records()) {
      CHECK(std::binary_search(have.begin(), have.end(), r));
    }
  }

  SUBCASE("oracle policy reruns the node once per perturbation") {
    Workflow wf = one_node("pandas", "dropna", {}, oprun_exec("dropna", "{}"));
    RunOptions opts = base_opts();
    opts.policy = LineagePolicy::Oracle;
    RunRecord rec = run_workflow(wf, opts);
    const NodeRun& nr = rec.nodes[0];
    CHECK(nr.resolution == "oracle");
    CHECK(nr.executions == 50);
    CHECK(nr.lineage.completeness(InfluenceKind::Indirect) == Completeness::Exact);
    CHECK(nr.lineage.completeness(InfluenceKind::Direct) == Completeness::OverApprox);
    CHECK(nr.lineage.origin().kind == Origin::Kind::Oracle);
  }

  SUBCASE("learn policy runs the full input exactly once") {
    Workflow wf = one_node("pandas", "dropna", {}, oprun_exec("dropna", "{}"));
    RunOptions opts = base_opts();
    opts.policy = LineagePolicy::Learn;
    RunRecord rec = run_workflow(wf, opts);
    const NodeRun& nr = rec.nodes[0];
    CHECK(nr.resolution == "learnt");
    CHECK(nr.executions == 1);
    CHECK(nr.lineage.completeness(InfluenceKind::Direct) == Completeness::OverApprox);
    CHECK(nr.lineage.origin().kind == Origin::Kind::Learnt);

    Container d0 = rec.containers.at("D0");
    Container d1 = rec.containers.at("D1");
    LineageTable exact = capture_exact_lineage(
        OperationSignature::make("pandas", "dropna", {}), {d0}, d1);
    const auto& have = nr.lineage.records();
    for (const auto& r : exact.records()) {
      CHECK(std::binary_search(have.begin(), have.end(), r));
    }
  }
}

TEST_CASE("knowledge base short-circuits repeated runs") {
  support::TempDir tmp;
  KnowledgeBase kb(tmp.file("kb"));
  Workflow wf = load_workflow_file(fixture("fig1.json"));
  RunOptions opts = base_opts();
  opts.kb = &kb;

  RunRecord cold = run_workflow(wf, opts);
  for (const auto& nr : cold.nodes) CHECK(nr.resolution == "captured");
  std::size_t rows_after_cold = kb.rows().size();
  CHECK(rows_after_cold == 3);

  RunRecord warm = run_workflow(wf, opts);
  for (const auto& nr : warm.nodes) {
    CHECK(nr.resolution == "kb");
    CHECK(nr.executions == 1);
  }
  CHECK(kb.rows().size() == rows_after_cold);
  for (std::size_t i = 0; i < warm.nodes.size(); ++i) {
    CHECK(warm.nodes[i].lineage.records() == cold.nodes[i].lineage.records());
  }

  SUBCASE("learnt tags transfer to fresh inputs of the same op") {
    // Learning on D0 stores tags keyed by the op; a different input misses
    // the per-signature lineage cache but reuses the tags without another
    // learning pass.
    support::TempDir data;
    Container other = support::people4x3().subset(
        {{"0", "1", "2"}, {"Name", "Age", "Children"}}, "D0");
    save_container_file(other, data.file("other.json"));
    save_container_file(support::people4x3(), data.file("d0.json"));

    KnowledgeBase kb2(tmp.file("kb2"));
    RunOptions lopts;
    lopts.base_dir = data.path();
    lopts.policy = LineagePolicy::Learn;
    lopts.kb = &kb2;

    Workflow first = one_node("pandas", "dropna", {},
                              oprun_exec("dropna", "{}"));
    run_workflow(first, lopts);
    auto stored = kb2.get_tags("pandas.dropna()");
    REQUIRE(stored.has_value());
    REQUIRE(stored->tags.size() == 2);
    CHECK(stored->tags[0].repr() == "Slice[0]");
    CHECK(stored->tags[1].repr() == "Identity");
    REQUIRE(stored->origins.size() == 2);
    CHECK(stored->origins[0].repr() == "learnt(n=24)");
    std::size_t rows_after_learn = kb2.rows().size();

    Workflow second = one_node("pandas", "dropna", {},
                               oprun_exec("dropna", "{}"));
    second.containers[0].path = "other.json";
    RunRecord rec2 = run_workflow(second, lopts);
    CHECK(rec2.nodes[0].resolution == "learnt");
    CHECK(rec2.nodes[0].executions == 1);
    // One new lineage row, no new tags row.
    std::vector<KnowledgeBase::IndexRow> rows = kb2.rows();
    CHECK(rows.size() == rows_after_learn + 1);
    CHECK(rows.back().kind == "lineage");
  }
}

TEST_CASE("run records round-trip through disk") {
  Workflow wf = load_workflow_file(fixture("fig1.json"));
  RunRecord rec = run_workflow(wf, base_opts());

  support::TempDir tmp;
  std::string dir = tmp.file("run");
  save_run_record(rec, dir);

  namespace fs = std::filesystem;
  CHECK(fs::exists(fs::path(dir) / "record.json"));
  CHECK(fs::exists(fs::path(dir) / "containers" / "D0.json"));
  CHECK(fs::exists(fs::path(dir) / "containers" / "D3.json"));
  CHECK(fs::exists(fs::path(dir) / "lineage" / "clean.csv"));
  CHECK(fs::exists(fs::path(dir) / "lineage" / "clean.xplt"));

  RunRecord back = load_run_record(dir);
  REQUIRE(back.nodes.size() == rec.nodes.size());
  REQUIRE(back.containers.size() == rec.containers.size());
  for (const auto& [id, container] : rec.containers) {
    REQUIRE(back.containers.count(id) == 1);
    CHECK(containers_equal(back.containers.at(id), container));
    CHECK(back.containers.at(id).id() == id);
  }
  for (std::size_t i = 0; i < rec.nodes.size(); ++i) {
    const NodeRun& a = rec.nodes[i];
    const NodeRun& b = back.nodes[i];
    CHECK(b.node.id == a.node.id);
    CHECK(b.node.op.canonical_key() == a.node.op.canonical_key());
    CHECK(b.resolution == a.resolution);
    CHECK(b.executions == a.executions);
    CHECK(b.lineage.records() == a.lineage.records());
    CHECK(b.lineage.completeness(InfluenceKind::Direct) == a.lineage.completeness(InfluenceKind::Direct));
    CHECK(b.lineage.origin().kind == a.lineage.origin().kind);
  }

  CHECK(code_of([&] { load_run_record(tmp.file("missing")); }) ==
        ErrorCode::InvalidPath);
}

TEST_CASE("knowledge base stores tags and lineage durably") {
  support::TempDir tmp;
  std::string root = tmp.file("kb");

  {
    KnowledgeBase kb(root);
    CHECK(kb.rows().empty());
    CHECK_FALSE(kb.get_tags("pandas.dropna()").has_value());

    KnowledgeBase::TaggedOp tagged;
    tagged.tags = {ConstraintTag::parse("Slice[0]"),
                   ConstraintTag::parse("Identity")};
    tagged.origins = {Origin::learnt(24, 1700000000),
                      Origin::learnt(24, 1700000000)};
    kb.put_tags("pandas.dropna()", tagged);

    Container d0 = support::people4x3();
    Container d1 = execute_builtin(
        OperationSignature::make("pandas", "dropna", {}), {d0}, "D1");
    LineageTable table = capture_exact_lineage(
        OperationSignature::make("pandas", "dropna", {}), {d0}, d1);
    kb.put_lineage("sig-1", table);

    auto tags = kb.get_tags("pandas.dropna()");
    REQUIRE(tags.has_value());
    REQUIRE(tags->tags.size() == 2);
    CHECK(tags->tags[0].repr() == "Slice[0]");
    CHECK(tags->origins[0].repr() == "learnt(n=24)");
    CHECK(tags->origins[0].timestamp == 1700000000);

    auto lineage = kb.get_lineage("sig-1");
    REQUIRE(lineage.has_value());
    CHECK(lineage->records() == table.records());
    CHECK(lineage->completeness(InfluenceKind::Direct) == table.completeness(InfluenceKind::Direct));

    CHECK_FALSE(kb.get_lineage("sig-2").has_value());
  }

  // A fresh handle sees everything the first one wrote.
  {
    KnowledgeBase kb(root);
    CHECK(kb.get_tags("pandas.dropna()").has_value());
    CHECK(kb.get_lineage("sig-1").has_value());
    CHECK(kb.rows().size() == 2);
    CHECK(kb.rows()[0].kind == "tags");
    CHECK(kb.rows()[1].kind == "lineage");
  }

  // Re-putting a key supersedes the old entry: newest wins, history stays.
  {
    KnowledgeBase kb(root);
    KnowledgeBase::TaggedOp update;
    update.tags = {ConstraintTag::parse("Identity")};
    update.origins = {Origin::declared(1700000001)};
    kb.put_tags("pandas.dropna()", update);

    auto tags = kb.get_tags("pandas.dropna()");
    REQUIRE(tags.has_value());
    REQUIRE(tags->tags.size() == 1);
    CHECK(tags->tags[0].repr() == "Identity");
    CHECK(tags->origins[0].kind == Origin::Kind::Declared);
    CHECK(kb.rows().size() == 3);
  }

  // A mangled index line turns every read into a loud failure.
  {
    std::ofstream out(std::filesystem::path(root) / "index.jsonl",
                      std::ios::app | std::ios::binary);
    out << "{broken\n";
  }
  KnowledgeBase kb(root);
  CHECK(code_of([&] { kb.rows(); }) == ErrorCode::CorruptStore);
  CHECK(code_of([&] { kb.get_tags("pandas.dropna()"); }) ==
        ErrorCode::CorruptStore);
}
