#include "symslice/callgraph.hpp"

#include <algorithm>
#include <functional>

namespace symslice {

CallGraph build_callgraph(const Module& m) {
  CallGraph cg;
  for (const auto& fn : m.functions) cg.nodes.push_back(fn.name);
  for (const auto& fn : m.functions)
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions) {
        if (ins.op != Opcode::Call) continue;
        if (m.function(ins.callee)) {
          cg.edges.push_back({fn.name, ins.callee, ins.id});
        } else {
          cg.external_edges.push_back({fn.name, ins.callee, ins.id});
          cg.externals.insert(ins.callee);
        }
      }
  return cg;
}

std::vector<std::vector<std::string>> scc_order(const CallGraph& cg) {
  // Tarjan; the SCC finish order is a reverse topological order of the
  // condensation, i.e. callees come out before callers.
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& e : cg.edges) succ[e.caller].push_back(e.callee);

  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> sccs;
  int counter = 0;

  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& w : succ[v]) {
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> scc;
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
        if (w == v) break;
      }
      std::sort(scc.begin(), scc.end());
      sccs.push_back(std::move(scc));
    }
  };

  // visit @main last so its SCC lands at the very end among roots
  std::vector<std::string> visit_order;
  for (const auto& n : cg.nodes)
    if (n != "@main") visit_order.push_back(n);
  for (const auto& n : cg.nodes)
    if (n == "@main") visit_order.push_back(n);
  for (const auto& n : visit_order)
    if (!index.count(n)) strongconnect(n);
  return sccs;
}

std::map<std::string, std::set<std::string>> transitive_globals(const Module& m,
                                                                const ModuleIndex& idx,
                                                                const CallGraph& cg) {
  std::map<std::string, std::set<std::string>> direct;
  for (const auto& fn : m.functions) {
    auto& s = direct[fn.name];
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions) {
        auto scan = [&](const Value& v) {
          if (v.is_name() && v.text[0] == '@' && m.has_global(v.text)) s.insert(v.text);
        };
        for (const auto& v : ins.operands) scan(v);
        for (const auto& in : ins.incomings) scan(in.value);
      }
  }
  std::map<std::string, std::vector<std::string>> callees;
  for (const auto& e : cg.edges) callees[e.caller].push_back(e.callee);

  auto order = scc_order(cg); // bottom-up: callees first
  std::map<std::string, std::set<std::string>> out;
  for (const auto& scc : order) {
    std::set<std::string> acc;
    for (const auto& fn : scc) {
      acc.insert(direct[fn].begin(), direct[fn].end());
      for (const auto& c : callees[fn]) {
        auto it = out.find(c);
        if (it != out.end()) acc.insert(it->second.begin(), it->second.end());
        // same-SCC callee: merged below by sharing acc
      }
    }
    // recursive SCC members share one set; iterate once more to close over
    // same-SCC direct sets (already in acc)
    for (const auto& fn : scc) out[fn] = acc;
  }
  return out;
}

} // namespace symslice
