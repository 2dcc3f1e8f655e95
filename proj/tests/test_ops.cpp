#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "support/support.hpp"
#include "xprov/builtins.hpp"
#include "xprov/container_io.hpp"
#include "xprov/oracle.hpp"

using namespace xprov;
using namespace support;

namespace {

OperationSignature op(const std::string& name,
                      std::vector<std::pair<std::string, Scalar>> params = {}) {
  return OperationSignature::make("t", name, std::move(params));
}

Container run1(const OperationSignature& o, const Container& in) {
  return execute_builtin(o, {in}, "out");
}

RunFn builtin_fn(const OperationSignature& o) {
  return [o](const std::vector<Container>& inputs) {
    return execute_builtin(o, inputs, "out");
  };
}

}  // namespace

TEST_CASE("dropna keeps exactly the hole-free rows") {
  Container out = run1(op("dropna"), people4x3());
  CHECK(out.dim(0).labels == std::vector<std::string>{"0", "1"});
  CHECK(out.dim(1).labels ==
        std::vector<std::string>{"Name", "Age", "Children"});
  CHECK(out.get({"0", "Name"}) == S("alice"));
  CHECK(out.get({"1", "Children"}) == I(2));

  Container clean = run1(op("dropna"), out);
  CHECK(containers_equal(clean, out));
}

TEST_CASE("dropna can empty a container") {
  Container holes = Container::create(
      "h", {{"row", {"0", "1"}}, {"col", {"a"}}}, {N(), N()});
  Container out = run1(op("dropna"), holes);
  CHECK(out.dim(0).labels.empty());
  CHECK(out.cell_count() == 0);
}

TEST_CASE("filter keeps rows satisfying the predicate") {
  Container d0 = people4x3();
  Container adults = run1(
      op("filter", {{"column", S("Age")}, {"cmp", S(">")}, {"value", I(30)}}),
      d0);
  CHECK(adults.dim(0).labels == std::vector<std::string>{"0", "1", "3"});
  CHECK(adults.get({"3", "Name"}) == S("dana"));

  Container alice = run1(
      op("filter",
         {{"column", S("Name")}, {"cmp", S("=")}, {"value", S("alice")}}),
      d0);
  CHECK(alice.dim(0).labels == std::vector<std::string>{"0"});

  Container none = run1(
      op("filter", {{"column", S("Age")}, {"cmp", S("<")}, {"value", I(0)}}),
      d0);
  CHECK(none.dim(0).labels.empty());
}

TEST_CASE("filter predicates reject nulls and mixed types") {
  Container c = Container::create(
      "m", {{"row", {"0", "1", "2"}}, {"col", {"v"}}},
      {I(5), N(), S("5")});
  Container out = run1(
      op("filter", {{"column", S("v")}, {"cmp", S("!=")}, {"value", I(9)}}),
      c);
  CHECK(out.dim(0).labels == std::vector<std::string>{"0"});

  Container eq = run1(
      op("filter", {{"column", S("v")}, {"cmp", S("=")}, {"value", F(5.0)}}),
      c);
  CHECK(eq.dim(0).labels == std::vector<std::string>{"0"});
}

TEST_CASE("minmax_scale rescales numeric pools per column") {
  Container d2 = Container::create(
      "D2", {{"row", {"0", "1"}}, {"col", {"Name", "Age", "Children"}}},
      {S("alice"), I(35), I(1), S("bob"), I(32), I(2)});
  Container out =
      run1(op("minmax_scale", {{"columns", S("Age,Children")}}), d2);
  CHECK(out.get({"0", "Age"}) == F(1.0));
  CHECK(out.get({"1", "Age"}) == F(0.0));
  CHECK(out.get({"0", "Children"}) == F(0.0));
  CHECK(out.get({"1", "Children"}) == F(1.0));
  CHECK(out.get({"0", "Name"}) == S("alice"));
}

TEST_CASE("minmax_scale passes non-numeric cells through and handles "
          "constant pools") {
  Container c = Container::create(
      "c", {{"row", {"0", "1", "2", "3"}}, {"col", {"x", "k"}}},
      {I(1), I(7), N(), I(7), F(3.0), I(7), S("s"), I(7)});
  Container out = run1(op("minmax_scale", {{"columns", S("x,k")}}), c);
  CHECK(out.get({"0", "x"}) == F(0.0));
  CHECK(out.get({"1", "x"}) == N());
  CHECK(out.get({"2", "x"}) == F(1.0));
  CHECK(out.get({"3", "x"}) == S("s"));
  CHECK(out.get({"0", "k"}) == F(0.0));
  CHECK(out.get({"3", "k"}) == F(0.0));
}

TEST_CASE("map_add_constant shifts numbers and promotes on float") {
  Container d0 = people4x3();
  Container plus1 = run1(op("map_add_constant", {{"k", I(1)}}), d0);
  CHECK(plus1.get({"0", "Age"}) == I(36));
  CHECK(plus1.get({"0", "Name"}) == S("alice"));
  CHECK(plus1.get({"3", "Children"}) == N());

  Container plus_half = run1(op("map_add_constant", {{"k", F(0.5)}}), d0);
  CHECK(plus_half.get({"0", "Age"}) == F(35.5));
}

TEST_CASE("sort orders by one column, nulls last, fresh labels") {
  Container d0 = people4x3();
  Container by_age =
      run1(op("sort", {{"column", S("Age")}, {"asc", B(true)}}), d0);
  CHECK(by_age.dim(0).labels == std::vector<std::string>{"0", "1", "2", "3"});
  CHECK(by_age.get({"0", "Age"}) == I(28));
  CHECK(by_age.get({"1", "Age"}) == I(32));
  CHECK(by_age.get({"2", "Age"}) == I(35));
  CHECK(by_age.get({"3", "Age"}) == I(41));
  CHECK(by_age.get({"0", "Children"}) == I(0));

  Container by_kids =
      run1(op("sort", {{"column", S("Children")}, {"asc", B(true)}}), d0);
  CHECK(by_kids.get({"3", "Children"}) == N());
  Container by_kids_desc =
      run1(op("sort", {{"column", S("Children")}, {"asc", B(false)}}), d0);
  CHECK(by_kids_desc.get({"0", "Children"}) == I(2));
  CHECK(by_kids_desc.get({"3", "Children"}) == N());
}

TEST_CASE("sort is stable on ties") {
  Container ties = Container::create(
      "t", {{"row", {"a", "b", "c"}}, {"col", {"k", "v"}}},
      {I(1), S("first"), I(1), S("second"), I(0), S("third")});
  Container out = run1(op("sort", {{"column", S("k")}, {"asc", B(true)}}),
                       ties);
  CHECK(out.get({"0", "v"}) == S("third"));
  CHECK(out.get({"1", "v"}) == S("first"));
  CHECK(out.get({"2", "v"}) == S("second"));
}

TEST_CASE("project keeps listed columns in listed order") {
  Container d0 = people4x3();
  Container out = run1(op("project", {{"columns", S("Age,Name")}}), d0);
  CHECK(out.dim(1).labels == std::vector<std::string>{"Age", "Name"});
  CHECK(out.get({"2", "Age"}) == I(28));
  CHECK(out.dim(0).labels == d0.dim(0).labels);
}

TEST_CASE("builtins validate their inputs") {
  Container d0 = people4x3();
  CHECK(code_of([&] { run1(op("no_such_op"), d0); }) ==
        ErrorCode::UnknownOperation);
  CHECK(code_of([&] {
          run1(op("filter", {{"column", S("Nope")},
                             {"cmp", S(">")},
                             {"value", I(1)}}),
               d0);
        }) == ErrorCode::UnknownIndex);
  CHECK(code_of([&] {
          run1(op("filter", {{"column", S("Age")},
                             {"cmp", S(">=")},
                             {"value", I(1)}}),
               d0);
        }) == ErrorCode::Precondition);
  Container flat = Container::create("f", {{"x", {"0", "1"}}}, {I(1), I(2)});
  CHECK(code_of([&] { run1(op("dropna"), flat); }) == ErrorCode::Precondition);
  CHECK(code_of([&] { execute_builtin(op("dropna"), {d0, d0}, "o"); }) ==
        ErrorCode::Precondition);
}

TEST_CASE("longhand builtin names alias the short ones") {
  Container d0 = people4x3();
  CHECK(is_builtin("dropna"));
  CHECK(is_builtin("drop_null_rows"));
  CHECK(is_builtin("filter_rows"));
  CHECK(is_builtin("minmax_scale_columns"));
  CHECK(is_builtin("sort_by_column"));
  CHECK(is_builtin("project_columns"));
  CHECK(!is_builtin("melt"));
  CHECK(builtin_names().size() == 6);
  CHECK(containers_equal(run1(op("drop_null_rows"), d0),
                         run1(op("dropna"), d0)));
}

TEST_CASE("standard_domain never offers the current value and always "
          "offers something") {
  Container d0 = people4x3();
  for (const auto& idx : d0.all_indices()) {
    auto domain = standard_domain(d0, idx);
    CHECK(!domain.empty());
    for (const auto& probe : domain) {
      CHECK(probe != d0.get(idx));
    }
  }
  // Int cell 35 with container-wide numeric range [0, 41].
  auto dom = standard_domain(d0, {"0", "Age"});
  std::set<std::string> got;
  for (const auto& p : dom) got.insert(p.repr());
  CHECK(got == std::set<std::string>{"0", "-35", "36", "-1", "42", "null"});
  // Null cell in an all-int column gets non-null numeric probes.
  for (const auto& p : standard_domain(d0, {"3", "Children"})) {
    CHECK(p.is_int());
  }
  // Null cell among string peers gets a string probe.
  for (const auto& p : standard_domain(d0, {"2", "Name"})) {
    CHECK(p.is_str());
  }
}

TEST_CASE("influence oracle on dropna: counts, baseline, and row shape") {
  Container d0 = people4x3();
  OracleStats stats;
  Container baseline;
  LineageTable t =
      influence_oracle(builtin_fn(op("dropna")), {d0}, &stats, &baseline);
  CHECK(stats.perturbations == 48);
  CHECK(stats.executions == 50);
  CHECK(containers_equal(baseline, run1(op("dropna"), d0)));

  CHECK(t.influencers_of({"0", "Age"}, InfluenceKind::Direct) ==
        std::set<IndexTuple>{{"0", "Age"}});
  CHECK(t.influencers_of({"0", "Age"}, InfluenceKind::Indirect) ==
        std::set<IndexTuple>{
            {"0", "Name"}, {"0", "Age"}, {"0", "Children"}});
  CHECK(t.completeness(InfluenceKind::Indirect) == Completeness::Exact);
  CHECK(t.completeness(InfluenceKind::Direct) == Completeness::OverApprox);
  CHECK(t.origin().kind == Origin::Kind::Oracle);
}

TEST_CASE("influence oracle rejects nondeterministic operations") {
  int calls = 0;
  RunFn flaky = [&calls](const std::vector<Container>& inputs) {
    ++calls;
    return inputs[0].with_cell({"0", "Age"}, I(calls));
  };
  CHECK(code_of([&] { influence_oracle(flaky, {people4x3()}); }) ==
        ErrorCode::NonDeterministicOp);
}

TEST_CASE("analytic capture verifies the claimed output") {
  Container d0 = people4x3();
  Container out = run1(op("dropna"), d0);
  CHECK(code_of([&] {
          capture_exact_lineage(op("dropna"), {d0},
                                out.with_cell({"0", "Age"}, I(1)));
        }) == ErrorCode::OutputMismatch);
  CHECK(code_of([&] { capture_exact_lineage(op("no_such_op"), {d0}, out); }) ==
        ErrorCode::NotBuiltin);
  LineageTable t = capture_exact_lineage(op("dropna"), {d0}, out);
  CHECK(t.completeness(InfluenceKind::Direct) == Completeness::Exact);
  CHECK(t.completeness(InfluenceKind::Indirect) == Completeness::Exact);
  CHECK(t.origin().kind == Origin::Kind::CapturedExact);
}

namespace {

void check_capture_matches_oracle(const OperationSignature& o,
                                  const Container& in) {
  Container out = execute_builtin(o, {in}, "out");
  LineageTable analytic = capture_exact_lineage(o, {in}, out);
  LineageTable probed = influence_oracle(builtin_fn(o), {in});
  INFO("op ", o.canonical_key(), " on ", serialize_container(in));
  CHECK(analytic.records() == probed.records());
}

}  // namespace

TEST_CASE("capture equals the oracle on the worked fixture") {
  Container d0 = people4x3();
  check_capture_matches_oracle(op("dropna"), d0);
  check_capture_matches_oracle(
      op("filter", {{"column", S("Age")}, {"cmp", S(">")}, {"value", I(30)}}),
      d0);
  check_capture_matches_oracle(
      op("filter",
         {{"column", S("Name")}, {"cmp", S("=")}, {"value", S("bob")}}),
      d0);
  check_capture_matches_oracle(
      op("minmax_scale", {{"columns", S("Age,Children")}}), d0);
  check_capture_matches_oracle(op("map_add_constant", {{"k", I(1)}}), d0);
  check_capture_matches_oracle(
      op("sort", {{"column", S("Age")}, {"asc", B(true)}}), d0);
  check_capture_matches_oracle(
      op("sort", {{"column", S("Children")}, {"asc", B(false)}}), d0);
  check_capture_matches_oracle(op("project", {{"columns", S("Name,Age")}}),
                               d0);
}

TEST_CASE("capture equals the oracle across randomized containers") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    Container c = random_container(rng);
    for (const auto& name : builtin_names()) {
      check_capture_matches_oracle(random_op(name, c, rng), c);
    }
  }
}
