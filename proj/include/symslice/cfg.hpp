// Per-function control-flow graphs, postdominators, and the
// control-dependence map CD(i) / influence ranges INFL(j).
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "symslice/ir.hpp"

namespace symslice {

// Instruction-level CFG of one function. Node 0 is the virtual exit.
struct Cfg {
  static constexpr InstrId kVirtualExit = 0;

  std::string function;
  InstrId entry = 0;
  std::vector<InstrId> nodes; // reachable instruction ids, ascending
  std::map<InstrId, std::vector<InstrId>> succs;
  std::map<InstrId, std::vector<InstrId>> preds;
  // extra edges that only exist for postdominator totality (loops with no
  // exiting path get a synthetic edge to the virtual exit)
  std::vector<std::pair<InstrId, InstrId>> synthetic_edges;
  std::vector<Diagnostic> diagnostics; // unreachable blocks etc.

  bool has_node(InstrId id) const {
    return std::binary_search(nodes.begin(), nodes.end(), id);
  }
};

struct ControlDeps {
  // branch instructions i is control-dependent on
  std::map<InstrId, std::set<InstrId>> cd;
  // inverse: instructions influenced by branch j
  std::map<InstrId, std::set<InstrId>> infl;
};

Cfg build_cfg(const ModuleIndex& idx, const Function& fn);

// Immediate postdominators, rooted at the virtual exit (mapped to node 0).
std::map<InstrId, InstrId> postdominators(const Cfg& cfg);

// Control dependence per instruction. Sources are conditional terminators
// only. The relation is nontermination-sensitive: a node after a loop is
// dependent on the loop branch when the loop admits an infinite path that
// avoids the node.
ControlDeps control_deps(const Cfg& cfg, const ModuleIndex& idx);

std::vector<InstrId> reverse_postorder(const Cfg& cfg);

// Block-level reverse postorder of the owning function's reachable blocks.
std::vector<const BasicBlock*> block_rpo(const Function& fn);

} // namespace symslice
