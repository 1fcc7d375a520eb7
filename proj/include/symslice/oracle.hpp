// Reference slicers used for differential testing: PDG reachability,
// SDG two-phase slicing with independently computed summary edges, and a
// context-insensitive Weiser-style baseline.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "symslice/cfg.hpp"
#include "symslice/effects.hpp"
#include "symslice/ir.hpp"

namespace symslice {

enum class SdgVertexKind { Instr, Entry, FormalIn, FormalOut, ActualIn, ActualOut };
enum class SdgEdgeKind { Control, Flow, Call, ParamIn, ParamOut, Summary };

struct SdgVertex {
  SdgVertexKind kind = SdgVertexKind::Instr;
  InstrId instr = 0;    // Instr / call site of Actual* vertices
  std::string func;     // owning procedure
  std::string var;      // Formal*/Actual* parameter name; return pseudo-formal uses the function name
};

struct Pdg {
  std::string function;
  int entry_vertex = -1;
  std::vector<SdgVertex> verts;
  std::vector<std::vector<std::pair<int, SdgEdgeKind>>> in_edges;
  std::map<InstrId, int> instr_vertex;
};

struct Sdg {
  std::vector<SdgVertex> verts;
  std::vector<std::vector<std::pair<int, SdgEdgeKind>>> in_edges;
  std::map<std::string, int> entry;
  std::map<std::pair<std::string, std::string>, int> fin;
  std::map<std::pair<std::string, std::string>, int> fout;
  std::map<std::pair<InstrId, std::string>, int> ain;
  std::map<std::pair<InstrId, std::string>, int> aout;
  std::map<InstrId, int> instr_vertex;
  // reaching definitions of each value at its procedure's exit
  std::map<std::string, std::map<std::string, std::vector<int>>> rd_exit;
  std::size_t summary_edge_count = 0;

  // summary pairs per procedure, for Lemma-3 style checks: (in-param, out-param)
  std::map<std::string, std::set<std::pair<std::string, std::string>>> summary_pairs;
};

// Intraprocedural PDG. The function must not call defined procedures.
Pdg build_pdg(const ModuleIndex& idx, const Function& fn, const Cfg& cfg, const ControlDeps& cd,
              const EffectsTable& effects = EffectsTable::defaults());

// Transitive predecessors of v over control+flow edges, projected onto
// instruction ids (v included).
std::set<InstrId> bruteforce_closure(const Pdg& pdg, InstrId v);

Sdg build_sdg(const Module& m, const ModuleIndex& idx,
              const EffectsTable& effects = EffectsTable::defaults());

// Two-phase backward slice of ⟨fn end, var⟩ over the SDG.
std::set<InstrId> sdg_backward_slice(const Sdg& sdg, const std::string& fn, const std::string& var);

// Context-insensitive closure over all non-summary edges: descends into
// callees and ascends to every caller.
std::set<InstrId> weiser_slice(const Sdg& sdg, const std::string& fn, const std::string& var);
std::set<InstrId> weiser_slice(const Module& m, const std::string& fn, const std::string& var);

} // namespace symslice
