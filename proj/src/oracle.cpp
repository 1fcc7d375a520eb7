#include "symslice/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>

#include "symslice/callgraph.hpp"
#include "symslice/slicer.hpp"

namespace symslice {

namespace {

bool is_global(const std::string& n) { return !n.empty() && n[0] == '@'; }

// use/def events of one instruction, in evaluation order
struct Events {
  std::vector<std::pair<std::string, int>> uses; // (name, vertex)
  std::vector<std::pair<std::string, int>> defs; // (name, vertex) — later defs kill earlier ones
};

struct GraphBuilder {
  std::vector<SdgVertex>& verts;
  std::vector<std::vector<std::pair<int, SdgEdgeKind>>>& in_edges;

  int add_vertex(SdgVertex v) {
    verts.push_back(std::move(v));
    in_edges.emplace_back();
    return static_cast<int>(verts.size()) - 1;
  }
  void add_edge(int from, int to, SdgEdgeKind kind) {
    in_edges[to].emplace_back(from, kind);
  }
};

// Reaching-definitions pass over one function; mirrors the slicer's view
// mechanics: block-in is the union of predecessor block-outs, definitions
// kill sequentially inside a block.
struct RdPass {
  using State = std::map<std::string, std::set<int>>;

  const Function& fn;
  const std::map<InstrId, Events>& events;
  State entry_state;

  std::map<std::string, State> out;
  State exit_state;

  void run() {
    auto rpo = block_rpo(fn);
    std::map<std::string, std::set<std::string>> preds;
    for (const auto* b : rpo) {
      const auto& term = b->instructions.back();
      for (const auto& l : term.labels) preds[l].insert(b->label);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto* b : rpo) {
        State st;
        if (b == rpo.front()) st = entry_state;
        auto pit = preds.find(b->label);
        if (pit != preds.end())
          for (const auto& p : pit->second) {
            auto oit = out.find(p);
            if (oit == out.end()) continue;
            for (const auto& [k, v] : oit->second) st[k].insert(v.begin(), v.end());
          }
        for (const auto& ins : b->instructions) {
          auto eit = events.find(ins.id);
          if (eit == events.end()) continue;
          for (const auto& [name, vert] : eit->second.defs) st[name] = {vert};
        }
        auto oit = out.find(b->label);
        if (oit == out.end() || oit->second != st) {
          out[b->label] = std::move(st);
          changed = true;
        }
      }
    }
    for (const auto* b : rpo) {
      Opcode term = b->instructions.back().op;
      if (term != Opcode::Ret && term != Opcode::Unreachable) continue;
      auto oit = out.find(b->label);
      if (oit == out.end()) continue;
      for (const auto& [k, v] : oit->second) exit_state[k].insert(v.begin(), v.end());
    }
  }

  // second walk: emit flow edges def -> use
  void emit_flow(GraphBuilder& gb) {
    auto rpo = block_rpo(fn);
    std::map<std::string, std::set<std::string>> preds;
    for (const auto* b : rpo) {
      const auto& term = b->instructions.back();
      for (const auto& l : term.labels) preds[l].insert(b->label);
    }
    for (const auto* b : rpo) {
      State st;
      if (b == rpo.front()) st = entry_state;
      auto pit = preds.find(b->label);
      if (pit != preds.end())
        for (const auto& p : pit->second) {
          auto oit = out.find(p);
          if (oit == out.end()) continue;
          for (const auto& [k, v] : oit->second) st[k].insert(v.begin(), v.end());
        }
      for (const auto& ins : b->instructions) {
        auto eit = events.find(ins.id);
        if (eit == events.end()) continue;
        for (const auto& [name, vert] : eit->second.uses) {
          auto sit = st.find(name);
          if (sit == st.end()) continue;
          for (int d : sit->second) gb.add_edge(d, vert, SdgEdgeKind::Flow);
        }
        for (const auto& [name, vert] : eit->second.defs) st[name] = {vert};
      }
    }
  }
};

void add_memory_use(const ModuleIndex& idx, const std::string& fn, const Value& v, int vert,
                    Events& ev) {
  if (!v.is_name()) return;
  ev.uses.emplace_back(idx.root(fn, v.text), vert);
  if (idx.is_derived_address(fn, v.text)) ev.uses.emplace_back(v.text, vert);
}

} // namespace

// --- PDG ---------------------------------------------------------------------

Pdg build_pdg(const ModuleIndex& idx, const Function& fn, const Cfg& cfg, const ControlDeps& cd,
              const EffectsTable& effects) {
  Pdg pdg;
  pdg.function = fn.name;
  GraphBuilder gb{pdg.verts, pdg.in_edges};
  pdg.entry_vertex = gb.add_vertex({SdgVertexKind::Entry, 0, fn.name, ""});

  const Module& m = idx.module();
  std::map<InstrId, Events> events;
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions) {
      if (!cfg.has_node(ins.id)) continue;
      int v = gb.add_vertex({SdgVertexKind::Instr, ins.id, fn.name, ""});
      pdg.instr_vertex[ins.id] = v;
      Events ev;
      if (ins.op == Opcode::Call) {
        if (m.function(ins.callee))
          throw std::invalid_argument("build_pdg: " + fn.name + " calls defined procedure " +
                                      ins.callee);
        ExternalEffect eff = effects.effect_for(ins.callee);
        for (std::size_t k = 0; k < ins.operands.size(); ++k) {
          const Value& a = ins.operands[k];
          if (!a.is_name()) continue;
          if (eff.reads_all || eff.read_args.count(static_cast<int>(k)))
            add_memory_use(idx, fn.name, a, v, ev);
          if (eff.write_args.count(static_cast<int>(k)) ||
              (eff.writes_pointer_args && a.is_pointer_type()))
            ev.defs.emplace_back(idx.root(fn.name, a.text), v);
        }
        if (!ins.result.empty()) ev.defs.emplace_back(ins.result, v);
      } else {
        for (const auto& x : ref_set(idx, ins)) ev.uses.emplace_back(x, v);
        for (const auto& x : def_set(idx, ins)) ev.defs.emplace_back(x, v);
      }
      events[ins.id] = std::move(ev);
    }

  // control edges
  for (const auto& [id, v] : pdg.instr_vertex) {
    auto cdit = cd.cd.find(id);
    if (cdit == cd.cd.end() || cdit->second.empty()) {
      gb.add_edge(pdg.entry_vertex, v, SdgEdgeKind::Control);
    } else {
      for (InstrId j : cdit->second) gb.add_edge(pdg.instr_vertex.at(j), v, SdgEdgeKind::Control);
    }
  }

  // formals/globals have no defining vertex in a PDG
  RdPass rd{fn, events, {}};
  rd.run();
  rd.emit_flow(gb);
  return pdg;
}

std::set<InstrId> bruteforce_closure(const Pdg& pdg, InstrId v) {
  std::set<InstrId> out;
  auto it = pdg.instr_vertex.find(v);
  if (it == pdg.instr_vertex.end()) return out;
  std::set<int> seen{it->second};
  std::vector<int> stack{it->second};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& [p, kind] : pdg.in_edges[n])
      if (seen.insert(p).second) stack.push_back(p);
  }
  for (int n : seen)
    if (pdg.verts[n].kind == SdgVertexKind::Instr) out.insert(pdg.verts[n].instr);
  return out;
}

// --- SDG ---------------------------------------------------------------------

namespace {

struct SdgBuilder {
  const Module& m;
  const ModuleIndex& idx;
  const EffectsTable& effects;
  Sdg& sdg;
  GraphBuilder gb;

  std::map<std::string, std::set<std::string>> glob_t;
  std::map<std::string, Cfg> cfgs;
  std::map<std::string, ControlDeps> cds;
  // formals/globals (and the return pseudo-formal) a procedure may modify on
  // some exit-reaching path
  std::map<std::string, std::set<std::string>> may_mod;
  std::map<std::string, bool> has_ret;

  SdgBuilder(const Module& mod, const ModuleIndex& index, const EffectsTable& eff, Sdg& out)
      : m(mod), idx(index), effects(eff), sdg(out), gb{out.verts, out.in_edges} {}

  std::set<InstrId> exit_reaching(const Cfg& cfg) const {
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

  bool frame_param(const Function& fn, const std::string& name) const {
    if (is_global(name)) return glob_t.at(fn.name).count(name) > 0;
    return std::find(fn.formals.begin(), fn.formals.end(), name) != fn.formals.end();
  }

  void compute_may_mod() {
    for (const auto& fn : m.functions) {
      may_mod[fn.name] = {};
      has_ret[fn.name] = false;
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions)
          if (ins.op == Opcode::Ret && cfgs.at(fn.name).has_node(ins.id)) has_ret[fn.name] = true;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& fn : m.functions) {
        auto reach = exit_reaching(cfgs.at(fn.name));
        auto& mods = may_mod.at(fn.name);
        auto add = [&](const std::string& name) {
          if (frame_param(fn, name) && mods.insert(name).second) changed = true;
        };
        for (const auto& b : fn.blocks)
          for (const auto& ins : b.instructions) {
            if (!reach.count(ins.id)) continue;
            if (ins.op == Opcode::Store && ins.operands.size() > 1 && ins.operands[1].is_name()) {
              add(idx.root(fn.name, ins.operands[1].text));
            } else if (ins.op == Opcode::Call) {
              if (const Function* callee = m.function(ins.callee)) {
                const auto& cm = may_mod.at(callee->name);
                for (std::size_t k = 0; k < callee->formals.size() && k < ins.operands.size(); ++k)
                  if (cm.count(callee->formals[k]) && ins.operands[k].is_name())
                    add(idx.root(fn.name, ins.operands[k].text));
                for (const auto& g : glob_t.at(callee->name))
                  if (cm.count(g)) add(g);
              } else {
                ExternalEffect eff = effects.effect_for(ins.callee);
                for (std::size_t k = 0; k < ins.operands.size(); ++k) {
                  const Value& a = ins.operands[k];
                  if (!a.is_name()) continue;
                  if (eff.write_args.count(static_cast<int>(k)) ||
                      (eff.writes_pointer_args && a.is_pointer_type()))
                    add(idx.root(fn.name, a.text));
                }
              }
            }
          }
      }
    }
  }

  void build() {
    CallGraph cg = build_callgraph(m);
    glob_t = transitive_globals(m, idx, cg);
    for (const auto& fn : m.functions) {
      cfgs.emplace(fn.name, build_cfg(idx, fn));
      cds.emplace(fn.name, control_deps(cfgs.at(fn.name), idx));
    }
    compute_may_mod();

    // vertices
    for (const auto& fn : m.functions) {
      sdg.entry[fn.name] = gb.add_vertex({SdgVertexKind::Entry, 0, fn.name, ""});
      for (const auto& f : fn.formals)
        sdg.fin[{fn.name, f}] = gb.add_vertex({SdgVertexKind::FormalIn, 0, fn.name, f});
      for (const auto& g : glob_t.at(fn.name))
        sdg.fin[{fn.name, g}] = gb.add_vertex({SdgVertexKind::FormalIn, 0, fn.name, g});
      for (const auto& y : may_mod.at(fn.name))
        sdg.fout[{fn.name, y}] = gb.add_vertex({SdgVertexKind::FormalOut, 0, fn.name, y});
      if (!fn.is_void() && has_ret.at(fn.name))
        sdg.fout[{fn.name, fn.name}] = gb.add_vertex({SdgVertexKind::FormalOut, 0, fn.name, fn.name});
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions) {
          if (!cfgs.at(fn.name).has_node(ins.id)) continue;
          sdg.instr_vertex[ins.id] = gb.add_vertex({SdgVertexKind::Instr, ins.id, fn.name, ""});
        }
    }
    // entry/formal control, call-site vertices, param edges, events, flow
    for (const auto& fn : m.functions) build_function(fn);

    compute_summaries();
  }

  void build_function(const Function& fn) {
    const Cfg& cfg = cfgs.at(fn.name);
    const ControlDeps& cd = cds.at(fn.name);
    int entry = sdg.entry.at(fn.name);

    for (const auto& f : fn.formals)
      gb.add_edge(entry, sdg.fin.at({fn.name, f}), SdgEdgeKind::Control);
    for (const auto& g : glob_t.at(fn.name))
      gb.add_edge(entry, sdg.fin.at({fn.name, g}), SdgEdgeKind::Control);
    for (const auto& [key, v] : sdg.fout)
      if (key.first == fn.name) gb.add_edge(entry, v, SdgEdgeKind::Control);

    std::map<InstrId, Events> events;
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions) {
        if (!cfg.has_node(ins.id)) continue;
        int v = sdg.instr_vertex.at(ins.id);
        auto cdit = cd.cd.find(ins.id);
        if (cdit == cd.cd.end() || cdit->second.empty()) {
          gb.add_edge(entry, v, SdgEdgeKind::Control);
        } else {
          for (InstrId j : cdit->second)
            gb.add_edge(sdg.instr_vertex.at(j), v, SdgEdgeKind::Control);
        }
        events[ins.id] = build_events(fn, ins, v);
      }

    RdPass rd{fn, events, {}};
    for (const auto& f : fn.formals) rd.entry_state[f] = {sdg.fin.at({fn.name, f})};
    for (const auto& g : glob_t.at(fn.name)) rd.entry_state[g] = {sdg.fin.at({fn.name, g})};
    rd.run();
    rd.emit_flow(gb);

    // formal-out flow: definitions reaching the exit
    for (const auto& y : may_mod.at(fn.name)) {
      auto it = rd.exit_state.find(y);
      if (it == rd.exit_state.end()) continue;
      for (int d : it->second) gb.add_edge(d, sdg.fout.at({fn.name, y}), SdgEdgeKind::Flow);
    }
    if (!fn.is_void() && has_ret.at(fn.name)) {
      int fr = sdg.fout.at({fn.name, fn.name});
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions)
          if (ins.op == Opcode::Ret && cfg.has_node(ins.id))
            gb.add_edge(sdg.instr_vertex.at(ins.id), fr, SdgEdgeKind::Flow);
    }
    // record exit reaching definitions for criterion seeding
    for (const auto& [name, defs] : rd.exit_state)
      sdg.rd_exit[fn.name][name] = std::vector<int>(defs.begin(), defs.end());
  }

  Events build_events(const Function& fn, const Instruction& ins, int v) {
    Events ev;
    if (ins.op != Opcode::Call) {
      for (const auto& x : ref_set(idx, ins)) ev.uses.emplace_back(x, v);
      for (const auto& x : def_set(idx, ins)) ev.defs.emplace_back(x, v);
      return ev;
    }
    const Function* callee = m.function(ins.callee);
    if (!callee) {
      ExternalEffect eff = effects.effect_for(ins.callee);
      for (std::size_t k = 0; k < ins.operands.size(); ++k) {
        const Value& a = ins.operands[k];
        if (!a.is_name()) continue;
        if (eff.reads_all || eff.read_args.count(static_cast<int>(k)))
          add_memory_use(idx, fn.name, a, v, ev);
        if (eff.write_args.count(static_cast<int>(k)) ||
            (eff.writes_pointer_args && a.is_pointer_type()))
          ev.defs.emplace_back(idx.root(fn.name, a.text), v);
      }
      if (!ins.result.empty()) ev.defs.emplace_back(ins.result, v);
      return ev;
    }

    // call to a defined procedure: actual-in/actual-out structure
    gb.add_edge(v, sdg.entry.at(callee->name), SdgEdgeKind::Call);
    for (const auto& a : ins.operands)
      if (a.is_name() && !a.is_pointer_type()) ev.uses.emplace_back(a.text, v);

    for (std::size_t k = 0; k < callee->formals.size(); ++k) {
      const std::string& formal = callee->formals[k];
      int ain = gb.add_vertex({SdgVertexKind::ActualIn, ins.id, fn.name, formal});
      sdg.ain[{ins.id, formal}] = ain;
      gb.add_edge(v, ain, SdgEdgeKind::Control);
      gb.add_edge(ain, sdg.fin.at({callee->name, formal}), SdgEdgeKind::ParamIn);
      if (k < ins.operands.size() && ins.operands[k].is_name())
        add_memory_use(idx, fn.name, ins.operands[k], ain, ev);
      if (may_mod.at(callee->name).count(formal)) {
        int aout = gb.add_vertex({SdgVertexKind::ActualOut, ins.id, fn.name, formal});
        sdg.aout[{ins.id, formal}] = aout;
        gb.add_edge(v, aout, SdgEdgeKind::Control);
        gb.add_edge(sdg.fout.at({callee->name, formal}), aout, SdgEdgeKind::ParamOut);
        if (k < ins.operands.size() && ins.operands[k].is_name())
          ev.defs.emplace_back(idx.root(fn.name, ins.operands[k].text), aout);
      }
    }
    for (const auto& g : glob_t.at(callee->name)) {
      int ain = gb.add_vertex({SdgVertexKind::ActualIn, ins.id, fn.name, g});
      sdg.ain[{ins.id, g}] = ain;
      gb.add_edge(v, ain, SdgEdgeKind::Control);
      gb.add_edge(ain, sdg.fin.at({callee->name, g}), SdgEdgeKind::ParamIn);
      ev.uses.emplace_back(g, ain);
      if (may_mod.at(callee->name).count(g)) {
        int aout = gb.add_vertex({SdgVertexKind::ActualOut, ins.id, fn.name, g});
        sdg.aout[{ins.id, g}] = aout;
        gb.add_edge(v, aout, SdgEdgeKind::Control);
        gb.add_edge(sdg.fout.at({callee->name, g}), aout, SdgEdgeKind::ParamOut);
        ev.defs.emplace_back(g, aout);
      }
    }
    if (!ins.result.empty() && !callee->is_void() && has_ret.at(callee->name)) {
      int aout = gb.add_vertex({SdgVertexKind::ActualOut, ins.id, fn.name, callee->name});
      sdg.aout[{ins.id, callee->name}] = aout;
      gb.add_edge(v, aout, SdgEdgeKind::Control);
      gb.add_edge(sdg.fout.at({callee->name, callee->name}), aout, SdgEdgeKind::ParamOut);
      ev.defs.emplace_back(ins.result, aout);
    }
    return ev;
  }

  // summary edges by same-level worklist: formal-in reaches formal-out over
  // control/flow/summary edges inside one procedure
  void compute_summaries() {
    std::map<InstrId, const Function*> call_sites; // site -> callee
    for (const auto& fn : m.functions)
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions)
          if (ins.op == Opcode::Call)
            if (const Function* callee = m.function(ins.callee)) call_sites[ins.id] = callee;

    bool grown = true;
    while (grown) {
      grown = false;
      for (const auto& fn : m.functions) {
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& [key, fo] : sdg.fout) {
          if (key.first != fn.name) continue;
          // backward closure inside fn
          std::set<int> seen{fo};
          std::vector<int> stack{fo};
          while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            for (const auto& [p, kind] : sdg.in_edges[n]) {
              if (kind != SdgEdgeKind::Control && kind != SdgEdgeKind::Flow &&
                  kind != SdgEdgeKind::Summary)
                continue;
              if (seen.insert(p).second) stack.push_back(p);
            }
          }
          for (int n : seen)
            if (sdg.verts[n].kind == SdgVertexKind::FormalIn && sdg.verts[n].func == fn.name)
              pairs.insert({sdg.verts[n].var, key.second});
        }
        if (pairs != sdg.summary_pairs[fn.name]) {
          sdg.summary_pairs[fn.name] = pairs;
          grown = true;
        }
      }
      if (!grown) break;
      // materialize new summary edges at every call site
      for (const auto& [site, callee] : call_sites) {
        for (const auto& [x, y] : sdg.summary_pairs[callee->name]) {
          auto ait = sdg.ain.find({site, x});
          auto oit = sdg.aout.find({site, y});
          if (ait == sdg.ain.end() || oit == sdg.aout.end()) continue;
          bool present = false;
          for (const auto& [p, kind] : sdg.in_edges[oit->second])
            if (p == ait->second && kind == SdgEdgeKind::Summary) present = true;
          if (!present) {
            gb.add_edge(ait->second, oit->second, SdgEdgeKind::Summary);
            ++sdg.summary_edge_count;
          }
        }
      }
    }
  }
};

std::vector<int> criterion_seeds(const Sdg& sdg, const std::string& fn, const std::string& var) {
  std::vector<int> seeds;
  auto eit = sdg.entry.find(fn);
  if (eit == sdg.entry.end())
    throw AnalysisError(AnalysisError::UnknownVariable, "unknown procedure " + fn);
  seeds.push_back(eit->second);
  auto fit = sdg.rd_exit.find(fn);
  if (fit != sdg.rd_exit.end()) {
    auto vit = fit->second.find(var);
    if (vit != fit->second.end())
      for (int d : vit->second) seeds.push_back(d);
  }
  return seeds;
}

std::set<InstrId> project_instrs(const Sdg& sdg, const std::set<int>& verts) {
  std::set<InstrId> out;
  for (int v : verts)
    if (sdg.verts[v].kind == SdgVertexKind::Instr) out.insert(sdg.verts[v].instr);
  return out;
}

} // namespace

Sdg build_sdg(const Module& m, const ModuleIndex& idx, const EffectsTable& effects) {
  Sdg sdg;
  SdgBuilder b(m, idx, effects, sdg);
  b.build();
  return sdg;
}

std::set<InstrId> sdg_backward_slice(const Sdg& sdg, const std::string& fn, const std::string& var) {
  auto seeds = criterion_seeds(sdg, fn, var);
  // phase 1: every edge except param-out
  std::set<int> phase1(seeds.begin(), seeds.end());
  std::vector<int> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& [p, kind] : sdg.in_edges[n]) {
      if (kind == SdgEdgeKind::ParamOut) continue;
      if (phase1.insert(p).second) stack.push_back(p);
    }
  }
  // phase 2: descend through param-out, never back up through call/param-in
  std::set<int> all = phase1;
  stack.assign(phase1.begin(), phase1.end());
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& [p, kind] : sdg.in_edges[n]) {
      if (kind == SdgEdgeKind::Call || kind == SdgEdgeKind::ParamIn) continue;
      if (all.insert(p).second) stack.push_back(p);
    }
  }
  return project_instrs(sdg, all);
}

std::set<InstrId> weiser_slice(const Sdg& sdg, const std::string& fn, const std::string& var) {
  auto seeds = criterion_seeds(sdg, fn, var);
  std::set<int> seen(seeds.begin(), seeds.end());
  std::vector<int> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (const auto& [p, kind] : sdg.in_edges[n]) {
      if (kind == SdgEdgeKind::Summary) continue; // no summaries: descend and ascend freely
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return project_instrs(sdg, seen);
}

std::set<InstrId> weiser_slice(const Module& m, const std::string& fn, const std::string& var) {
  ModuleIndex idx(m);
  Sdg sdg = build_sdg(m, idx);
  return weiser_slice(sdg, fn, var);
}

} // namespace symslice
