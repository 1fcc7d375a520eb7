// Procedure call graph, SCC condensation, bottom-up analysis order.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "symslice/ir.hpp"

namespace symslice {

struct CallEdge {
  std::string caller;
  std::string callee;
  InstrId site;
};

struct CallGraph {
  std::vector<std::string> nodes; // defined functions, module order
  std::vector<CallEdge> edges;    // direct calls between defined functions
  std::vector<CallEdge> external_edges;
  std::set<std::string> externals;
};

CallGraph build_callgraph(const Module& m);

// Reverse topological order of the SCC condensation: callees before callers;
// recursive procedures grouped. "@main", when present, comes last among
// otherwise unordered roots.
std::vector<std::vector<std::string>> scc_order(const CallGraph& cg);

// Globals referenced or modified by fn or anything it transitively calls.
std::map<std::string, std::set<std::string>> transitive_globals(const Module& m,
                                                                const ModuleIndex& idx,
                                                                const CallGraph& cg);

} // namespace symslice
