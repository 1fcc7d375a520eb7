#include "symslice/cfg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace symslice {

namespace {

std::vector<std::string> reachable_blocks(const Function& fn, std::vector<Diagnostic>* diags) {
  std::set<std::string> seen;
  std::vector<std::string> order;
  std::vector<std::string> stack{fn.blocks.front().label};
  seen.insert(fn.blocks.front().label);
  while (!stack.empty()) {
    std::string l = stack.back();
    stack.pop_back();
    order.push_back(l);
    const BasicBlock* b = fn.block(l);
    if (!b || b->instructions.empty()) continue;
    for (const auto& t : b->instructions.back().labels)
      if (seen.insert(t).second) stack.push_back(t);
  }
  if (diags)
    for (const auto& b : fn.blocks)
      if (!seen.count(b.label))
        diags->push_back({b.instructions.empty() ? 0 : b.instructions.front().id,
                          fn.name + ": unreachable block " + b.label});
  return order;
}

// nodes with a path to the virtual exit, via reverse BFS
std::set<InstrId> exit_reaching(const Cfg& cfg) {
  std::set<InstrId> seen;
  std::vector<InstrId> stack;
  auto pit = cfg.preds.find(Cfg::kVirtualExit);
  if (pit != cfg.preds.end())
    for (InstrId p : pit->second)
      if (seen.insert(p).second) stack.push_back(p);
  while (!stack.empty()) {
    InstrId n = stack.back();
    stack.pop_back();
    auto it = cfg.preds.find(n);
    if (it == cfg.preds.end()) continue;
    for (InstrId p : it->second)
      if (seen.insert(p).second) stack.push_back(p);
  }
  return seen;
}

} // namespace

std::vector<const BasicBlock*> block_rpo(const Function& fn) {
  std::set<std::string> seen;
  std::vector<const BasicBlock*> post;
  std::function<void(const BasicBlock*)> dfs = [&](const BasicBlock* b) {
    if (!b || !seen.insert(b->label).second) return;
    if (!b->instructions.empty())
      for (const auto& t : b->instructions.back().labels) dfs(fn.block(t));
    post.push_back(b);
  };
  dfs(&fn.blocks.front());
  std::reverse(post.begin(), post.end());
  return post;
}

Cfg build_cfg(const ModuleIndex& idx, const Function& fn) {
  Cfg cfg;
  cfg.function = fn.name;
  auto order = reachable_blocks(fn, &cfg.diagnostics);
  std::set<std::string> reach(order.begin(), order.end());

  for (const auto& b : fn.blocks) {
    if (!reach.count(b.label)) continue;
    for (const auto& ins : b.instructions) cfg.nodes.push_back(ins.id);
  }
  std::sort(cfg.nodes.begin(), cfg.nodes.end());
  cfg.entry = fn.blocks.front().instructions.front().id;

  auto add_edge = [&cfg](InstrId a, InstrId b) {
    cfg.succs[a].push_back(b);
    cfg.preds[b].push_back(a);
  };

  for (const auto& b : fn.blocks) {
    if (!reach.count(b.label)) continue;
    for (std::size_t i = 0; i + 1 < b.instructions.size(); ++i)
      add_edge(b.instructions[i].id, b.instructions[i + 1].id);
    const auto& term = b.instructions.back();
    if (term.op == Opcode::Ret || term.op == Opcode::Unreachable) {
      add_edge(term.id, Cfg::kVirtualExit);
    } else {
      std::set<std::string> dedup;
      for (const auto& l : term.labels) {
        if (!dedup.insert(l).second) continue;
        const BasicBlock* t = fn.block(l);
        if (t && !t->instructions.empty()) add_edge(term.id, t->instructions.front().id);
      }
    }
  }

  // Loops with no exiting path get a synthetic edge so postdominators stay
  // total; slicing and control dependence ignore these edges.
  auto reaches = exit_reaching(cfg);
  std::set<InstrId> stuck;
  for (InstrId n : cfg.nodes)
    if (!reaches.count(n)) stuck.insert(n);
  while (!stuck.empty()) {
    // representative: smallest stuck node whose predecessors all leave the
    // stuck set or that heads the region
    InstrId head = *stuck.begin();
    for (InstrId n : stuck) {
      for (InstrId p : cfg.preds.count(n) ? cfg.preds.at(n) : std::vector<InstrId>{})
        if (!stuck.count(p)) {
          head = std::min(head, n);
        }
    }
    cfg.synthetic_edges.emplace_back(head, Cfg::kVirtualExit);
    // recompute with the synthetic edge counted
    Cfg aug = cfg; // shallow copy adequate: maps copied
    for (auto [a, b] : cfg.synthetic_edges) {
      aug.succs[a].push_back(b);
      aug.preds[b].push_back(a);
    }
    auto reaches2 = exit_reaching(aug);
    std::set<InstrId> rest;
    for (InstrId n : stuck)
      if (!reaches2.count(n)) rest.insert(n);
    stuck.swap(rest);
  }
  return cfg;
}

std::map<InstrId, InstrId> postdominators(const Cfg& cfg) {
  // Cooper-Harvey-Kennedy on the reverse graph, virtual exit as root.
  std::map<InstrId, std::vector<InstrId>> succs = cfg.succs;
  std::map<InstrId, std::vector<InstrId>> preds = cfg.preds;
  for (auto [a, b] : cfg.synthetic_edges) {
    succs[a].push_back(b);
    preds[b].push_back(a);
  }

  // postorder over the reverse graph starting from the exit
  std::map<InstrId, int> po;
  std::vector<InstrId> order;
  std::set<InstrId> seen;
  std::function<void(InstrId)> dfs = [&](InstrId n) {
    if (!seen.insert(n).second) return;
    auto it = preds.find(n);
    if (it != preds.end())
      for (InstrId p : it->second) dfs(p);
    po[n] = static_cast<int>(order.size());
    order.push_back(n);
  };
  dfs(Cfg::kVirtualExit);

  std::map<InstrId, InstrId> ipdom;
  ipdom[Cfg::kVirtualExit] = Cfg::kVirtualExit;
  auto intersect = [&](InstrId a, InstrId b) {
    while (a != b) {
      while (po.at(a) < po.at(b)) a = ipdom.at(a);
      while (po.at(b) < po.at(a)) b = ipdom.at(b);
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      InstrId n = *it;
      if (n == Cfg::kVirtualExit) continue;
      InstrId idom = 0;
      bool found = false;
      auto sit = succs.find(n);
      if (sit != succs.end())
        for (InstrId s : sit->second) {
          if (s != Cfg::kVirtualExit && !ipdom.count(s)) continue;
          if (!found) {
            idom = s;
            found = true;
          } else {
            idom = intersect(idom, s);
          }
        }
      if (!found) continue;
      auto cur = ipdom.find(n);
      if (cur == ipdom.end() || cur->second != idom) {
        ipdom[n] = idom;
        changed = true;
      }
    }
  }
  ipdom.erase(Cfg::kVirtualExit);
  return ipdom;
}

ControlDeps control_deps(const Cfg& cfg, const ModuleIndex& idx) {
  // Block-granular, nontermination-sensitive: instruction n depends on
  // conditional branch j iff some successor of j starts only maximal paths
  // through n's block while another successor can avoid it (by reaching the
  // exit or by looping forever without touching the block).
  ControlDeps out;
  const Function* fn = idx.module().function(cfg.function);
  assert(fn);

  // block graph over reachable blocks; index B = exit
  std::vector<const BasicBlock*> blocks;
  std::map<std::string, int> bindex;
  for (const auto& b : fn->blocks) {
    if (b.instructions.empty() || !cfg.has_node(b.instructions.front().id)) continue;
    bindex[b.label] = static_cast<int>(blocks.size());
    blocks.push_back(&b);
  }
  int nb = static_cast<int>(blocks.size());
  int exit_node = nb;
  std::vector<std::vector<int>> bsucc(nb + 1), bpred(nb + 1);
  for (int i = 0; i < nb; ++i) {
    const auto& term = blocks[i]->instructions.back();
    if (term.op == Opcode::Ret || term.op == Opcode::Unreachable) {
      bsucc[i].push_back(exit_node);
      bpred[exit_node].push_back(i);
    } else {
      std::set<int> dedup;
      for (const auto& l : term.labels) {
        auto it = bindex.find(l);
        if (it == bindex.end() || !dedup.insert(it->second).second) continue;
        bsucc[i].push_back(it->second);
        bpred[it->second].push_back(i);
      }
    }
  }

  std::vector<int> branch_blocks;
  for (int i = 0; i < nb; ++i) {
    Opcode op = blocks[i]->instructions.back().op;
    if (op == Opcode::BrCond || op == Opcode::Switch) branch_blocks.push_back(i);
  }
  if (branch_blocks.empty()) return out;

  for (int target = 0; target < nb; ++target) {
    // avoid[s]: some maximal path from block s misses `target`
    std::vector<char> avoid(nb + 1, 0);
    avoid[exit_node] = 1;
    // reverse reachability from exit in G \ target
    {
      std::vector<int> stack{exit_node};
      while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (int p : bpred[n]) {
          if (p == target || avoid[p]) continue;
          avoid[p] = 1;
          stack.push_back(p);
        }
      }
    }
    // nodes with an infinite path in G \ target: repeatedly drop nodes
    // without a surviving successor; survivors can walk forever
    {
      std::vector<char> cand(nb + 1, 1);
      cand[exit_node] = 0;
      if (target <= nb) cand[target] = 0;
      bool shrunk = true;
      while (shrunk) {
        shrunk = false;
        for (int n = 0; n < nb; ++n) {
          if (!cand[n]) continue;
          bool has = false;
          for (int s : bsucc[n])
            if (s != exit_node && cand[s]) {
              has = true;
              break;
            }
          if (!has) {
            cand[n] = 0;
            shrunk = true;
          }
        }
      }
      for (int n = 0; n < nb; ++n)
        if (cand[n]) avoid[n] = 1;
    }

    for (int jb : branch_blocks) {
      bool some_avoids = false;
      bool some_must_hit = false;
      for (int s : bsucc[jb]) {
        if (s != target && avoid[s])
          some_avoids = true;
        else
          some_must_hit = true;
      }
      if (!(some_avoids && some_must_hit)) continue;
      InstrId j = blocks[jb]->instructions.back().id;
      for (const auto& ins : blocks[target]->instructions) {
        out.cd[ins.id].insert(j);
        out.infl[j].insert(ins.id);
      }
    }
  }
  return out;
}

std::vector<InstrId> reverse_postorder(const Cfg& cfg) {
  std::vector<InstrId> post;
  std::set<InstrId> seen;
  std::function<void(InstrId)> dfs = [&](InstrId n) {
    if (n == Cfg::kVirtualExit || !seen.insert(n).second) return;
    auto it = cfg.succs.find(n);
    if (it != cfg.succs.end())
      for (InstrId s : it->second) dfs(s);
    post.push_back(n);
  };
  dfs(cfg.entry);
  std::reverse(post.begin(), post.end());
  return post;
}

} // namespace symslice
