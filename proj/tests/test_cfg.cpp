#include <doctest.h>

#include <functional>

#include "symslice/cfg.hpp"
#include "symslice/generator.hpp"
#include "test_support.hpp"

using namespace symslice;

namespace {

// naive postdominator sets by iterative dataflow: pdom(n) = {n} ∪ ∩ pdom(succ)
std::map<InstrId, std::set<InstrId>> naive_pdom_sets(const Cfg& cfg) {
  std::map<InstrId, std::vector<InstrId>> succs = cfg.succs;
  for (auto [a, b] : cfg.synthetic_edges) succs[a].push_back(b);
  std::set<InstrId> all(cfg.nodes.begin(), cfg.nodes.end());
  all.insert(Cfg::kVirtualExit);
  std::map<InstrId, std::set<InstrId>> pdom;
  for (InstrId n : all) pdom[n] = n == Cfg::kVirtualExit ? std::set<InstrId>{n} : all;
  bool changed = true;
  while (changed) {
    changed = false;
    for (InstrId n : cfg.nodes) {
      std::set<InstrId> meet = all;
      bool first = true;
      for (InstrId s : succs[n]) {
        if (first) {
          meet = pdom[s];
          first = false;
        } else {
          std::set<InstrId> tmp;
          for (InstrId x : meet)
            if (pdom[s].count(x)) tmp.insert(x);
          meet = std::move(tmp);
        }
      }
      if (first) meet.clear();
      meet.insert(n);
      if (meet != pdom[n]) {
        pdom[n] = std::move(meet);
        changed = true;
      }
    }
  }
  return pdom;
}

// maximal-path control dependence by definition: n depends on branch j iff
// one successor of j starts only maximal paths through n's block and another
// starts a maximal path avoiding it. Avoidance = reach exit or any cycle in
// the graph without the block.
std::map<InstrId, std::set<InstrId>> bruteforce_cd(const Cfg& cfg, const ModuleIndex& idx) {
  std::map<InstrId, std::set<InstrId>> out;
  const Function& fn = idx.function_of(cfg.nodes.front());
  std::vector<std::vector<InstrId>> blocks;
  for (const auto& b : fn.blocks) {
    if (b.instructions.empty() || !cfg.has_node(b.instructions.front().id)) continue;
    std::vector<InstrId> ids;
    for (const auto& ins : b.instructions) ids.push_back(ins.id);
    blocks.push_back(std::move(ids));
  }
  std::vector<InstrId> branches;
  for (InstrId n : cfg.nodes) {
    Opcode op = idx.instr(n).op;
    if (op == Opcode::BrCond || op == Opcode::Switch) branches.push_back(n);
  }
  for (const auto& block : blocks) {
    std::set<InstrId> removed(block.begin(), block.end());
    // can_avoid(s): some maximal path from s misses the block entirely
    std::function<bool(InstrId, std::set<InstrId>&)> can_avoid =
        [&](InstrId n, std::set<InstrId>& on_path) -> bool {
      if (removed.count(n)) return false;
      if (n == Cfg::kVirtualExit) return true;
      if (!on_path.insert(n).second) return true; // closed a cycle avoiding the block
      auto it = cfg.succs.find(n);
      if (it != cfg.succs.end())
        for (InstrId s : it->second) {
          if (can_avoid(s, on_path)) {
            on_path.erase(n);
            return true;
          }
        }
      on_path.erase(n);
      return false;
    };
    for (InstrId j : branches) {
      bool avoids = false, hits = false;
      for (InstrId s : cfg.succs.at(j)) {
        std::set<InstrId> on_path;
        if (can_avoid(s, on_path))
          avoids = true;
        else
          hits = true;
      }
      if (avoids && hits)
        for (InstrId n : block) out[n].insert(j);
    }
  }
  return out;
}

} // namespace

TEST_CASE("fig8 @main CFG has the while back edge") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@main"));
  const auto& succs15 = cfg.succs.at(15);
  CHECK(std::find(succs15.begin(), succs15.end(), 9) != succs15.end());
  CHECK(cfg.entry == 1);
  CHECK(cfg.diagnostics.empty());
}

TEST_CASE("CFG node and edge counts match a textual recount") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  const Function& fn = *m.function("@main");
  Cfg cfg = build_cfg(idx, fn);
  // recount from the text: 20 instructions; intra-block edges = per-block
  // (len-1); terminator edges from the branch targets
  std::size_t instrs = 0, intra = 0, term = 0;
  for (const auto& b : fn.blocks) {
    instrs += b.instructions.size();
    intra += b.instructions.size() - 1;
    const auto& t = b.instructions.back();
    if (t.op == Opcode::Ret || t.op == Opcode::Unreachable)
      term += 1;
    else
      term += t.labels.size();
  }
  CHECK(cfg.nodes.size() == instrs);
  std::size_t edges = 0;
  for (const auto& [n, ss] : cfg.succs) edges += ss.size();
  CHECK(edges == intra + term);
}

TEST_CASE("single-block function is a path graph") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@add"));
  CHECK(cfg.nodes == std::vector<InstrId>{24, 25, 26, 27, 28});
  for (InstrId n : {24, 25, 26, 27}) {
    REQUIRE(cfg.succs.at(n).size() == 1);
    CHECK(cfg.succs.at(n)[0] == n + 1);
  }
  CHECK(cfg.succs.at(28)[0] == Cfg::kVirtualExit);
}

TEST_CASE("postdominators: straight-line and diamond") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg add_cfg = build_cfg(idx, *m.function("@add"));
  auto ipdom = postdominators(add_cfg);
  for (InstrId n : {24, 25, 26, 27}) CHECK(ipdom.at(n) == n + 1);
  CHECK(ipdom.at(28) == Cfg::kVirtualExit);

  Module d = load_fixture("diamond.sir");
  ModuleIndex didx(d);
  Cfg dc = build_cfg(didx, *d.function("@main"));
  // branch at 6 (br i1 %3): immediate postdominator is the join block head
  auto dpd = postdominators(dc);
  CHECK(dpd.at(6) == 10); // %6 = load i32* %y heads the join block
}

TEST_CASE("postdominators agree with the naive dataflow oracle on random CFGs") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenOptions opts;
    opts.seed = seed;
    opts.max_procs = 2;
    opts.max_instrs = 60;
    Module m = generate_module(opts);
    ModuleIndex idx(m);
    for (const auto& fn : m.functions) {
      Cfg cfg = build_cfg(idx, fn);
      auto ipdom = postdominators(cfg);
      auto sets = naive_pdom_sets(cfg);
      for (InstrId n : cfg.nodes) {
        // ipdom(n) must be the unique closest strict postdominator
        REQUIRE(ipdom.count(n));
        InstrId p = ipdom.at(n);
        if (p != Cfg::kVirtualExit) {
          CHECK(sets.at(n).count(p));
          // every other strict postdominator of n also postdominates p
          for (InstrId q : sets.at(n))
            if (q != n && q != p) CHECK(sets.at(p).count(q));
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("control dependence on fig8: loop body and loop exit depend on the branch") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@main"));
  ControlDeps cd = control_deps(cfg, idx);
  CHECK(cd.cd.at(13).count(12)); // call inside while.body
  CHECK(cd.cd.at(9).count(12));  // loop header re-entry
  CHECK(cd.cd.at(16).count(12)); // nontermination-sensitive: after the loop
  CHECK(cd.cd.at(20).count(12));
  CHECK(cd.cd.find(5) == cd.cd.end()); // entry block depends on nothing
  // inverse consistency
  for (const auto& [i, js] : cd.cd)
    for (InstrId j : js) CHECK(cd.infl.at(j).count(i));
  for (const auto& [j, is] : cd.infl)
    for (InstrId i : is) CHECK(cd.cd.at(i).count(j));
}

TEST_CASE("single-block function has no control dependence") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@add"));
  ControlDeps cd = control_deps(cfg, idx);
  CHECK(cd.cd.empty());
}

TEST_CASE("control dependence equals the path-enumeration oracle on random CFGs") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenOptions opts;
    opts.seed = seed + 1000;
    opts.max_procs = 1;
    opts.max_instrs = 30;
    Module m = generate_module(opts);
    ModuleIndex idx(m);
    for (const auto& fn : m.functions) {
      Cfg cfg = build_cfg(idx, fn);
      ControlDeps cd = control_deps(cfg, idx);
      auto brute = bruteforce_cd(cfg, idx);
      std::map<InstrId, std::set<InstrId>> mine;
      for (const auto& [i, js] : cd.cd) mine[i] = js;
      CHECK(mine == brute);
    }
  }
}

TEST_CASE("instructions of one block share their control-dependence set") {
  Module m = load_fixture("globals.sir");
  ModuleIndex idx(m);
  for (const auto& fn : m.functions) {
    Cfg cfg = build_cfg(idx, fn);
    ControlDeps cd = control_deps(cfg, idx);
    for (const auto& b : fn.blocks) {
      std::set<InstrId> first;
      auto it = cd.cd.find(b.instructions.front().id);
      if (it != cd.cd.end()) first = it->second;
      for (const auto& ins : b.instructions) {
        std::set<InstrId> cur;
        auto jt = cd.cd.find(ins.id);
        if (jt != cd.cd.end()) cur = jt->second;
        CHECK(cur == first);
      }
    }
  }
}

TEST_CASE("reverse postorder of @add is the instruction order") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@add"));
  CHECK(reverse_postorder(cfg) == std::vector<InstrId>{24, 25, 26, 27, 28});
}

TEST_CASE("reverse postorder visits loop headers before bodies") {
  Module m = load_fixture("fig8.sir");
  ModuleIndex idx(m);
  Cfg cfg = build_cfg(idx, *m.function("@main"));
  auto rpo = reverse_postorder(cfg);
  REQUIRE(rpo.size() == cfg.nodes.size());
  auto pos = [&](InstrId n) {
    return std::find(rpo.begin(), rpo.end(), n) - rpo.begin();
  };
  CHECK(pos(1) == 0);
  CHECK(pos(9) < pos(13));
  std::set<InstrId> seen(rpo.begin(), rpo.end());
  CHECK(seen.size() == rpo.size());
}

TEST_CASE("unreachable blocks are diagnosed and excluded") {
  auto res = parse_module(
      "define void @f() {\n"
      "entry:\n  ret void\n"
      "dead:\n  %x = add i32 1, 2\n  ret void\n}\n");
  REQUIRE(res.ok());
  ModuleIndex idx(res.module);
  Cfg cfg = build_cfg(idx, res.module.functions[0]);
  REQUIRE(cfg.diagnostics.size() == 1);
  CHECK(cfg.diagnostics[0].message.find("unreachable") != std::string::npos);
  CHECK(cfg.nodes == std::vector<InstrId>{1});
}
