#include <doctest.h>

#include <algorithm>

#include "symslice/slicer.hpp"
#include "test_support.hpp"

using namespace symslice;

namespace {

// expected-set checker: concrete ids plus symbolic parameters
void check_set(const Universe& u, const SliceSet& actual, std::vector<InstrId> ids,
               std::vector<ValueKey> syms = {}) {
  std::set<std::size_t> expect;
  for (InstrId id : ids) expect.insert(u.bit_of(id));
  for (const auto& k : syms) expect.insert(u.bit_of(k));
  std::set<std::size_t> got;
  actual.for_each([&](std::size_t bit) { got.insert(bit); });
  CHECK(got == expect);
}

const SliceSet& table_at(const SliceTable& t, const std::string& fn, const std::string& name) {
  static SliceSet empty;
  auto it = t.find(ValueKey{fn, name});
  return it == t.end() ? empty : it->second;
}

std::vector<InstrId> ids(std::vector<InstrId> v) { return v; }

} // namespace

TEST_CASE("table 1: intraprocedural analysis of @add") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  const ProcSummary& add = a.result().summaries.at("@add");
  ValueKey la{"@add", "%a"}, lb{"@add", "%b"};

  check_set(u, table_at(add.table, "@add", "%a"), {24, 25, 26, 27}, {la, lb});
  check_set(u, table_at(add.table, "@add", "%b"), {}, {lb});
  // intermediate registers
  check_set(u, table_at(add.table, "@add", "%1"), {24}, {la});
  check_set(u, table_at(add.table, "@add", "%2"), {25}, {lb});
  check_set(u, table_at(add.table, "@add", "%3"), {24, 25, 26}, {la, lb});

  // dropping symbolic parameters
  CHECK(concretize(u, table_at(add.table, "@add", "%a")) == ids({24, 25, 26, 27}));
  CHECK(concretize(u, table_at(add.table, "@add", "%b")).empty());

  // OUT/IN/SUMM as published
  CHECK(out_params(u, add) == std::set<std::string>{"%a"});
  CHECK(in_params(u, add) == std::set<std::string>{"%b"});
  CHECK(summ(u, add, "%a") == std::set<std::string>{"%a", "%b"});
  CHECK(summ(u, add, "%b") == std::set<std::string>{"%b"});
}

TEST_CASE("intra_slice on @add matches the interprocedural summary") {
  Module m = load_fixture("fig8.sir");
  IntraResult r = intra_slice(m, "@add");
  Analysis a(m);
  const Universe& u = a.universe();
  ValueKey la{"@add", "%a"}, lb{"@add", "%b"};
  check_set(u, table_at(r.summary.table, "@add", "%a"), {24, 25, 26, 27}, {la, lb});
  check_set(u, table_at(r.summary.table, "@add", "%b"), {}, {lb});
  // L rows as published: L(26) = {24,25,26,l_a,l_b}, L(28) = {28}
  check_set(u, r.L.at(26), {24, 25, 26}, {la, lb});
  check_set(u, r.L.at(27), {24, 25, 26, 27}, {la, lb});
  check_set(u, r.L.at(28), {28});
  CHECK_THROWS_AS(intra_slice(m, "@A"), AnalysisError); // has calls
}

TEST_CASE("table 2: @inc and @A summaries and instantiations") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  ValueKey lz{"@inc", "%z"}, lx{"@A", "%x"}, ly{"@A", "%y"};

  // T'_{@add,31}
  const CallInstantiation& site31 = a.result().instantiations.at(31);
  CHECK(site31.callee == "@add");
  check_set(u, site31.spec.at(ValueKey{"@add", "%a"}), {}, {lz});
  check_set(u, site31.spec.at(ValueKey{"@add", "%b"}), {30});
  check_set(u, site31.tprime.at(ValueKey{"@add", "%a"}), {24, 25, 26, 27, 30, 31}, {lz});
  check_set(u, site31.tprime.at(ValueKey{"@add", "%b"}), {31});

  const ProcSummary& inc = a.result().summaries.at("@inc");
  check_set(u, table_at(inc.table, "@inc", "%z"), {24, 25, 26, 27, 30, 31}, {lz});
  check_set(u, table_at(inc.table, "@inc", "%tmp"), {30});

  // T'_{@inc,22}(%z) = {24,25,26,27,30,31,22,l_%y}
  const CallInstantiation& site22 = a.result().instantiations.at(22);
  check_set(u, site22.tprime.at(ValueKey{"@inc", "%z"}), {22, 24, 25, 26, 27, 30, 31}, {ly});

  const ProcSummary& A = a.result().summaries.at("@A");
  check_set(u, table_at(A.table, "@A", "%x"), {21, 24, 25, 26, 27}, {lx, ly});
  check_set(u, table_at(A.table, "@A", "%y"), {22, 24, 25, 26, 27, 30, 31}, {ly});
  // callee rows as seen at @A's exit (Table 2, row 23)
  CHECK(concretize(u, table_at(A.table, "@add", "%a")) == ids({21, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(A.table, "@add", "%b")) == ids({21, 22, 31}));
  CHECK(concretize(u, table_at(A.table, "@inc", "%tmp")) == ids({22, 30}));
  CHECK(concretize(u, table_at(A.table, "@inc", "%z")) == ids({22, 24, 25, 26, 27, 30, 31}));
}

TEST_CASE("table 3: final slice table of fig8") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  const SliceTable& S = a.result().S;

  CHECK(concretize(u, table_at(S, "@add", "%a")) ==
        ids({5, 6, 7, 9, 10, 11, 12, 13, 14, 21, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@add", "%b")) ==
        ids({5, 7, 9, 10, 11, 12, 13, 14, 21, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@inc", "%z")) ==
        ids({5, 7, 9, 10, 11, 12, 13, 14, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@inc", "%tmp")) ==
        ids({5, 7, 9, 10, 11, 12, 13, 14, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@A", "%x")) ==
        ids({5, 6, 7, 9, 10, 11, 12, 13, 14, 21, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@A", "%y")) ==
        ids({5, 7, 9, 10, 11, 12, 13, 14, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@main", "%n")) == ids({5}));
  CHECK(concretize(u, table_at(S, "@main", "%i")) ==
        ids({5, 7, 9, 10, 11, 12, 13, 14, 22, 24, 25, 26, 27, 30, 31}));
  CHECK(concretize(u, table_at(S, "@main", "%sum")) ==
        ids({5, 6, 7, 9, 10, 11, 12, 13, 14, 21, 22, 24, 25, 26, 27, 30, 31}));
}

TEST_CASE("backward_slice API and the precision witness ids") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  auto z = a.backward_slice("@inc", "%z");
  CHECK(std::find(z.begin(), z.end(), 6) == z.end());
  CHECK(std::find(z.begin(), z.end(), 21) == z.end());
  CHECK(a.backward_slice("@main", "%n") == ids({5}));
  CHECK_THROWS_AS(a.backward_slice("@main", "%nope"), AnalysisError);
}

TEST_CASE("instr_deps over explicit tables") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  const ModuleIndex& idx = a.index();
  ValueKey la{"@add", "%a"}, lb{"@add", "%b"};

  DepTable L;
  SliceTable S;
  ControlDeps cd;
  // S(%1)={24,l_a}, S(%2)={25,l_b} as before node 26
  SliceSet s1(u.size()), s2(u.size());
  s1.insert(u.bit_of(InstrId(24)));
  s1.insert(u.bit_of(la));
  s2.insert(u.bit_of(InstrId(25)));
  s2.insert(u.bit_of(lb));
  S[{"@add", "%1"}] = s1;
  S[{"@add", "%2"}] = s2;
  SliceSet l26 = instr_deps(u, idx, idx.instr(26), L, S, cd);
  check_set(u, l26, {24, 25, 26}, {la, lb});

  // instruction with no refs and no cd yields {i}
  SliceSet l3 = instr_deps(u, idx, idx.instr(3), L, S, cd);
  check_set(u, l3, {3});
}

TEST_CASE("update_def_slices: stores replace, phis extend") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  const ModuleIndex& idx = a.index();

  SliceTable S;
  SliceSet old(u.size());
  old.insert(u.bit_of(InstrId(1)));
  S[{"@add", "%a"}] = old;
  SliceSet lp(u.size());
  lp.insert(u.bit_of(InstrId(27)));
  update_def_slices(u, idx, idx.instr(27), lp, S); // store i32 %3, i32* %a
  check_set(u, S.at({"@add", "%a"}), {27});

  // phi at 9 extends
  SliceTable S2;
  SliceSet seeded(u.size());
  seeded.insert(u.bit_of(InstrId(2)));
  S2[{"@main", "%3"}] = seeded;
  SliceSet l9(u.size());
  l9.insert(u.bit_of(InstrId(9)));
  update_def_slices(u, idx, idx.instr(9), l9, S2);
  check_set(u, S2.at({"@main", "%3"}), {2, 9});

  // DEF(i) empty leaves the table unchanged
  SliceTable S3;
  update_def_slices(u, idx, idx.instr(8), lp, S3);
  CHECK(S3.empty());
}

TEST_CASE("init_slice_table seeds only empty entries") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  const Function& add = *m.function("@add");

  SliceTable t;
  init_slice_table(u, add, {}, t);
  check_set(u, t.at({"@add", "%a"}), {}, {{"@add", "%a"}});
  check_set(u, t.at({"@add", "%b"}), {}, {{"@add", "%b"}});
  // idempotent, and non-empty entries stay
  SliceSet custom(u.size());
  custom.insert(u.bit_of(InstrId(7)));
  t[{"@add", "%a"}] = custom;
  init_slice_table(u, add, {}, t);
  check_set(u, t.at({"@add", "%a"}), {7});
}

TEST_CASE("gmod/gref of @add") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  auto [gmod, gref] = gmod_gref(a.universe(), a.result().summaries.at("@add"));
  CHECK(gmod == std::set<std::string>{"%a"});
  CHECK(gref == std::set<std::string>{"%a", "%b"});
}

TEST_CASE("OUT and IN partition the frame on every fixture procedure") {
  for (const char* name : {"fig8.sir", "diamond.sir", "globals.sir", "recurse.sir"}) {
    Module m = load_fixture(name);
    Analysis a(m);
    const Universe& u = a.universe();
    for (const auto& [fn, sum] : a.result().summaries) {
      auto outs = out_params(u, sum);
      auto ins = in_params(u, sum);
      std::set<std::string> both;
      for (const auto& p : sum.frame_params) {
        CHECK((outs.count(p) + ins.count(p)) == 1);
        both.insert(p);
      }
      CHECK(both.size() == sum.frame_params.size());
      // GMOD coincides with OUT by construction of the test above
      auto [gmod, gref] = gmod_gref(u, sum);
      CHECK(gmod == outs);
    }
  }
}

TEST_CASE("forward slice of ⟨1,%n⟩ equals the published complement") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  auto fwd = a.forward_slice("@main", "%n");
  std::vector<InstrId> expect;
  for (InstrId i = 1; i <= 32; ++i)
    if (i != 1 && i != 2 && i != 3 && i != 4 && i != 6 && i != 7 && i != 8) expect.push_back(i);
  CHECK(fwd == expect);
}

TEST_CASE("forward slice needs full-IDT mode; unreferenced variable is empty") {
  Module m = load_fixture("fig8.sir");
  AnalysisOptions fast;
  fast.mode = SliceMode::BackwardFast;
  Analysis a(m, fast);
  CHECK_THROWS_AS(a.forward_slice("@main", "%n"), AnalysisError);

  auto res = parse_module(
      "define i32 @main() {\nentry:\n  %dead = alloca i32\n  ret i32 0\n}\n");
  REQUIRE(res.ok());
  Analysis b(res.module);
  CHECK(b.forward_slice("@main", "%dead").empty());
}

TEST_CASE("symbolic hygiene: summaries carry only their own symbols") {
  for (const char* name : {"fig8.sir", "globals.sir", "recurse.sir"}) {
    Module m = load_fixture(name);
    Analysis a(m);
    const Universe& u = a.universe();
    for (const auto& [fname, sum] : a.result().summaries)
      for (const auto& [key, set] : sum.table)
        set.for_each([&](std::size_t bit) {
          if (bit < u.instr_count()) return;
          CHECK(u.symbols()[bit - u.instr_count()].func == fname);
        });
  }
}

TEST_CASE("self-membership and monotone rows in full-IDT mode") {
  Module m = load_fixture("fig8.sir");
  Analysis a(m);
  const Universe& u = a.universe();
  for (InstrId i = 1; i <= u.instr_count(); ++i) {
    auto it = a.result().L_full.find(i);
    REQUIRE(it != a.result().L_full.end());
    CHECK(it->second.contains(u.bit_of(i)));
  }
}

TEST_CASE("call-free module: interprocedural result equals intra_slice") {
  Module m = load_fixture("diamond.sir");
  Analysis a(m);
  IntraResult r = intra_slice(m, "@main");
  const Universe& u = a.universe();
  for (const auto& [key, set] : r.summary.table) {
    auto it = a.result().summaries.at("@main").table.find(key);
    REQUIRE(it != a.result().summaries.at("@main").table.end());
    CHECK(set == it->second);
  }
}

TEST_CASE("arity mismatch is reported") {
  auto res = parse_module(
      "define void @f(i32 %x, i32 %y) {\nentry:\n  ret void\n}\n"
      "define i32 @main() {\nentry:\n  call void @f(i32 1)\n  ret i32 0\n}\n");
  REQUIRE(res.ok());
  CHECK_THROWS_AS(Analysis{res.module}, AnalysisError);
}
