// Symbolic slicing: intraprocedural fixpoint over instruction
// backward-dependence sets, procedure symbolic slices with OUT/IN/SUMM
// views, call-site instantiation, interprocedural bottom-up analysis,
// forward slicing and GMOD/GREF.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symslice/callgraph.hpp"
#include "symslice/cfg.hpp"
#include "symslice/effects.hpp"
#include "symslice/ir.hpp"
#include "symslice/slice_set.hpp"

namespace symslice {

enum class SliceMode { BackwardFast, FullIdt };

class AnalysisError : public std::runtime_error {
public:
  enum Kind { UnknownCallee, ArityMismatch, UnknownVariable, ModeError, Internal };
  AnalysisError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

using DepTable = std::map<InstrId, SliceSet>;
using SliceTable = std::map<ValueKey, SliceSet>;

struct ProcSummary {
  std::string proc;
  std::vector<std::string> frame_params; // FRML ∪ GLOB ∪ [return pseudo-formal]
  SliceTable table;                      // full snapshot at the procedure's exit

  bool is_frame_param(const std::string& name) const {
    return std::find(frame_params.begin(), frame_params.end(), name) != frame_params.end();
  }
};

struct CallInstantiation {
  InstrId site = 0;
  std::string callee;
  std::map<ValueKey, SliceSet> spec;   // symbolic parameter -> passed-down dependences
  std::map<ValueKey, SliceSet> tprime; // instantiated summary
};

struct SliceResult {
  SliceMode mode = SliceMode::FullIdt;
  std::shared_ptr<const Universe> universe;
  DepTable L;        // rows as computed by the fixpoint (may hold symbols)
  DepTable L_full;   // FullIdt only: symbols expanded, call contexts folded in
  SliceTable S;      // final symbolic slice table, all frames
  std::map<std::string, ProcSummary> summaries;
  std::map<InstrId, CallInstantiation> instantiations; // last instantiation per site
  std::vector<Diagnostic> diagnostics;
};

// --- granular operations -------------------------------------------------

// S(x) := {l_x} for each x in FRML(P) ∪ GLOB(P) with an empty entry.
void init_slice_table(const Universe& u, const Function& proc,
                      const std::set<std::string>& globals, SliceTable& table);

// l' = L(i) ∪ ⋃_{j∈CD(i)} L(j) ∪ ⋃_{x∈REF(i)} S(x); missing L rows count as
// {i}, missing S entries as empty.
SliceSet instr_deps(const Universe& u, const ModuleIndex& idx, const Instruction& instr,
                    const DepTable& L, const SliceTable& S, const ControlDeps& cd);

// Applies l' to every defined value: multi-valued definitions extend, others
// replace.
void update_def_slices(const Universe& u, const ModuleIndex& idx, const Instruction& instr,
                       const SliceSet& lprime, SliceTable& S);

std::set<std::string> out_params(const Universe& u, const ProcSummary& summary);
std::set<std::string> in_params(const Universe& u, const ProcSummary& summary);
std::set<std::string> summ(const Universe& u, const ProcSummary& summary, const std::string& x);
// (GMOD, GREF)
std::pair<std::set<std::string>, std::set<std::string>> gmod_gref(const Universe& u,
                                                                  const ProcSummary& summary);

std::vector<InstrId> concretize(const Universe& u, const SliceSet& s);

// --- whole-module analysis ------------------------------------------------

struct AnalysisOptions {
  SliceMode mode = SliceMode::FullIdt;
  EffectsTable effects = EffectsTable::defaults();
  bool record_instantiations = true;
};

class Analysis {
public:
  Analysis(const Module& m, AnalysisOptions opts = {});

  const Module& module() const { return *mod_; }
  const ModuleIndex& index() const { return idx_; }
  const Universe& universe() const { return *result_.universe; }
  const SliceResult& result() const { return result_; }
  const CallGraph& callgraph() const { return cg_; }
  const Cfg& cfg(const std::string& fn) const { return cfgs_.at(fn); }
  const ControlDeps& control_dependence(const std::string& fn) const { return cds_.at(fn); }
  const std::set<std::string>& globals_of(const std::string& fn) const { return glob_t_.at(fn); }

  // backward slice of ⟨fn end, var⟩, symbolic parameters removed
  std::vector<InstrId> backward_slice(const std::string& fn, const std::string& var) const;
  // forward slice of ⟨fn start, var⟩; requires FullIdt mode
  std::vector<InstrId> forward_slice(const std::string& fn, const std::string& var) const;

  // auto-generated criteria: every global at @main's end, every alloca'd
  // local at its procedure's end
  std::vector<std::pair<std::string, std::string>> auto_criteria() const;

private:
  friend struct Engine;
  const Module* mod_;
  ModuleIndex idx_;
  AnalysisOptions opts_;
  CallGraph cg_;
  std::map<std::string, Cfg> cfgs_;
  std::map<std::string, ControlDeps> cds_;
  std::map<std::string, std::set<std::string>> glob_t_;
  SliceResult result_;
};

// Algorithm-1 entry point: one call-free procedure, optionally seeded.
struct IntraResult {
  DepTable L;
  SliceTable S;
  ProcSummary summary;
};
IntraResult intra_slice(const Module& m, const std::string& fn, SliceMode mode = SliceMode::FullIdt);

// Convenience wrappers over a throwaway Analysis.
std::vector<InstrId> backward_slice(const Module& m, const std::string& fn, const std::string& var);
std::vector<InstrId> forward_slice(const Module& m, const std::string& fn, const std::string& var);

// Name of the pseudo-formal carrying a function's return value.
inline std::string return_param(const Function& fn) { return fn.name; }

} // namespace symslice
