#include "symslice/slicer.hpp"

#include <algorithm>
#include <cassert>

namespace symslice {

namespace {

SliceSet singleton(const Universe& u, InstrId id) {
  SliceSet s(u.size());
  s.insert(u.bit_of(id));
  return s;
}

SliceSet symbol_set(const Universe& u, const ValueKey& k) {
  SliceSet s(u.size());
  s.insert(u.bit_of(k));
  return s;
}

bool is_global_name(const std::string& n) { return !n.empty() && n[0] == '@'; }

} // namespace

void init_slice_table(const Universe& u, const Function& proc,
                      const std::set<std::string>& globals, SliceTable& table) {
  auto seed = [&](const std::string& name) {
    ValueKey key{proc.name, name};
    auto it = table.find(key);
    if (it != table.end() && !it->second.empty()) return;
    table[key] = symbol_set(u, key);
  };
  for (const auto& f : proc.formals) seed(f);
  for (const auto& g : globals) seed(g);
}

SliceSet instr_deps(const Universe& u, const ModuleIndex& idx, const Instruction& instr,
                    const DepTable& L, const SliceTable& S, const ControlDeps& cd) {
  SliceSet out(u.size());
  auto row = L.find(instr.id);
  if (row != L.end() && !row->second.empty())
    out |= row->second;
  else
    out.insert(u.bit_of(instr.id));
  auto cdit = cd.cd.find(instr.id);
  if (cdit != cd.cd.end())
    for (InstrId j : cdit->second) {
      auto jrow = L.find(j);
      if (jrow != L.end() && !jrow->second.empty())
        out |= jrow->second;
      else
        out.insert(u.bit_of(j));
    }
  const std::string& fn = idx.function_of(instr.id).name;
  for (const auto& x : ref_set(idx, instr)) {
    auto it = S.find(ValueKey{fn, x});
    if (it != S.end()) out |= it->second;
  }
  return out;
}

void update_def_slices(const Universe& u, const ModuleIndex& idx, const Instruction& instr,
                       const SliceSet& lprime, SliceTable& S) {
  const std::string& fn = idx.function_of(instr.id).name;
  for (const auto& x : def_set(idx, instr)) {
    ValueKey key{fn, x};
    if (instr.is_multi_valued()) {
      auto it = S.find(key);
      if (it == S.end())
        S[key] = lprime;
      else
        it->second |= lprime;
    } else {
      S[key] = lprime;
    }
  }
}

std::set<std::string> out_params(const Universe& u, const ProcSummary& summary) {
  std::set<std::string> out;
  for (const auto& x : summary.frame_params) {
    ValueKey key{summary.proc, x};
    auto it = summary.table.find(key);
    if (it == summary.table.end()) continue;
    if (!(it->second == symbol_set(u, key))) out.insert(x);
  }
  return out;
}

std::set<std::string> in_params(const Universe& u, const ProcSummary& summary) {
  std::set<std::string> out;
  for (const auto& x : summary.frame_params) {
    ValueKey key{summary.proc, x};
    auto it = summary.table.find(key);
    if (it == summary.table.end() || it->second == symbol_set(u, key)) out.insert(x);
  }
  return out;
}

std::set<std::string> summ(const Universe& u, const ProcSummary& summary, const std::string& x) {
  std::set<std::string> out;
  auto it = summary.table.find(ValueKey{summary.proc, x});
  if (it == summary.table.end()) return out;
  it->second.for_each([&](std::size_t bit) {
    if (bit < u.instr_count()) return;
    const ValueKey& sym = u.symbols()[bit - u.instr_count()];
    if (sym.func == summary.proc && summary.is_frame_param(sym.name)) out.insert(sym.name);
  });
  return out;
}

std::pair<std::set<std::string>, std::set<std::string>> gmod_gref(const Universe& u,
                                                                  const ProcSummary& summary) {
  std::set<std::string> gmod = out_params(u, summary);
  std::set<std::string> gref;
  for (const auto& [key, set] : summary.table) {
    set.for_each([&](std::size_t bit) {
      if (bit < u.instr_count()) return;
      const ValueKey& sym = u.symbols()[bit - u.instr_count()];
      if (sym.func == summary.proc && summary.is_frame_param(sym.name)) gref.insert(sym.name);
    });
  }
  return {gmod, gref};
}

std::vector<InstrId> concretize(const Universe& u, const SliceSet& s) {
  return concrete_ids(u, s);
}

// --- engine -----------------------------------------------------------------

struct Engine {
  Analysis& a;
  const Module& m;
  const ModuleIndex& idx;
  const Universe& u;
  SliceResult& res;

  // per-function frame data
  struct Frame {
    const Function* fn = nullptr;
    std::vector<std::string> params;  // formals + retname + globals
    std::vector<std::string> names;   // params + registers
    std::vector<const BasicBlock*> rpo;
  };
  std::map<std::string, Frame> frames;
  // transitive callees (self included): the frames a summary may legitimately
  // carry
  std::map<std::string, std::set<std::string>> reach;
  // union over call sites of everything passed down to each symbolic
  // parameter (Eq. 10); feeds the symbol substitution of the final IDT
  std::map<ValueKey, SliceSet> spec_accum;

  using View = std::map<std::string, SliceSet>;

  explicit Engine(Analysis& an)
      : a(an), m(an.module()), idx(an.index()), u(an.universe()), res(an.result_) {}

  std::vector<InstrId> cd_of(InstrId id) const {
    const auto& cds = a.cds_.at(idx.function_of(id).name).cd;
    auto it = cds.find(id);
    if (it == cds.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  SliceSet row(InstrId id) const {
    auto it = res.L.find(id);
    if (it != res.L.end() && !it->second.empty()) return it->second;
    SliceSet s(u.size());
    s.insert(u.bit_of(id));
    return s;
  }

  void store_row(const Instruction& ins, const SliceSet& l) {
    bool keep = res.mode == SliceMode::FullIdt || ins.op == Opcode::BrCond ||
                ins.op == Opcode::Switch || ins.op == Opcode::Call;
    if (keep) res.L[ins.id] = l;
  }

  void setup_frames() {
    for (const auto& fn : m.functions) {
      Frame fr;
      fr.fn = &fn;
      fr.params = fn.formals;
      if (!fn.is_void()) fr.params.push_back(return_param(fn));
      for (const auto& g : a.glob_t_.at(fn.name)) fr.params.push_back(g);
      fr.names = fr.params;
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions)
          if (!ins.result.empty()) fr.names.push_back(ins.result);
      fr.rpo = block_rpo(fn);
      frames[fn.name] = std::move(fr);
    }
    std::map<std::string, std::set<std::string>> callees;
    for (const auto& e : a.cg_.edges) callees[e.caller].insert(e.callee);
    for (const auto& fn : m.functions) {
      std::set<std::string>& r = reach[fn.name];
      std::vector<std::string> stack{fn.name};
      r.insert(fn.name);
      while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const auto& c : callees[cur])
          if (r.insert(c).second) stack.push_back(c);
      }
    }
  }

  // drop all symbolic elements not owned by `owner` from the live table
  void scrub_foreign_symbols(const std::string& owner) {
    SliceSet keep(u.size());
    const auto& syms = u.symbols();
    for (std::size_t i = 0; i < syms.size(); ++i)
      if (syms[i].func == owner) keep.insert(u.instr_count() + i);
    for (auto& [key, set] : res.S) set.mask_symbols(u.instr_count(), keep);
  }

  SliceSet lookup(const View& view, const std::string& name) const {
    auto it = view.find(name);
    if (it != view.end()) return it->second;
    return SliceSet(u.size());
  }

  bool out_param(const ProcSummary& tq, const std::string& name) const {
    ValueKey key{tq.proc, name};
    auto it = tq.table.find(key);
    if (it == tq.table.end()) return false;
    return !(it->second == symbol_set(u, key));
  }

  // Eq. 10: pass call-site dependences down to the callee's symbolic params.
  std::map<ValueKey, SliceSet> compute_spec(const Instruction& ins, const Function& callee,
                                            const View& view) {
    std::map<ValueKey, SliceSet> spec;
    const std::string& caller = idx.function_of(ins.id).name;
    for (std::size_t k = 0; k < callee.formals.size(); ++k) {
      if (k >= ins.operands.size())
        throw AnalysisError(AnalysisError::ArityMismatch,
                            "call at instruction " + std::to_string(ins.id) + " to " + callee.name +
                                " passes too few arguments");
      SliceSet s(u.size());
      const Value& actual = ins.operands[k];
      if (actual.is_name()) {
        s |= lookup(view, idx.root(caller, actual.text));
        if (idx.is_derived_address(caller, actual.text)) s |= lookup(view, actual.text);
      }
      spec[ValueKey{callee.name, callee.formals[k]}] = std::move(s);
    }
    for (const auto& g : a.glob_t_.at(callee.name))
      spec[ValueKey{callee.name, g}] = lookup(view, g);
    return spec;
  }

  // Eq. 9, generalized: every summary entry has the callee's symbolic
  // parameters substituted by SPEC and the call-site dependences folded in;
  // unmodified (IN) globals contribute nothing and IN formals reduce to the
  // call site itself.
  std::map<ValueKey, SliceSet> compute_tprime(const ProcSummary& tq, const SliceSet& l_site,
                                              const std::map<ValueKey, SliceSet>& spec) {
    std::map<ValueKey, SliceSet> tprime;
    for (const auto& [key, tval] : tq.table) {
      bool is_param = key.func == tq.proc && tq.is_frame_param(key.name);
      // the return pseudo-formal shares the procedure's name and is not a global
      bool is_global = is_global_name(key.name) && key.name != tq.proc;
      if (is_param && tval == symbol_set(u, key)) {
        if (is_global) {
          tprime[key] = SliceSet(u.size());
        } else {
          tprime[key] = l_site;
        }
        continue;
      }
      SliceSet tp = tval;
      tp.truncate(u.instr_count()); // concrete part
      tp |= l_site;
      tval.for_each([&](std::size_t bit) {
        if (bit < u.instr_count()) return;
        const ValueKey& sym = u.symbols()[bit - u.instr_count()];
        auto sit = spec.find(sym);
        if (sit != spec.end())
          tp |= sit->second;
        else
          tp.insert(bit); // foreign symbol: leave in place, a later frame owns it
      });
      tprime[key] = std::move(tp);
    }
    return tprime;
  }

  void assign(View& view, const std::string& name, const SliceSet& v, bool extend) {
    if (extend) {
      auto it = view.find(name);
      if (it == view.end())
        view[name] = v;
      else
        it->second |= v;
    } else {
      view[name] = v;
    }
  }

  void transfer_call(const Instruction& ins, View& view, bool extend_only) {
    const std::string& caller = idx.function_of(ins.id).name;
    const Function* callee = m.function(ins.callee);

    if (!callee) {
      // external procedure
      ExternalEffect eff = a.opts_.effects.effect_for(ins.callee);
      SliceSet l(u.size());
      l.insert(u.bit_of(ins.id));
      for (InstrId j : cd_of(ins.id)) l |= row(j);
      for (std::size_t k = 0; k < ins.operands.size(); ++k) {
        const Value& v = ins.operands[k];
        if (!v.is_name()) continue;
        bool is_read = eff.reads_all || eff.read_args.count(static_cast<int>(k));
        if (!is_read) continue;
        l |= lookup(view, idx.root(caller, v.text));
        if (idx.is_derived_address(caller, v.text)) l |= lookup(view, v.text);
      }
      store_row(ins, l);
      for (std::size_t k = 0; k < ins.operands.size(); ++k) {
        const Value& v = ins.operands[k];
        if (!v.is_name()) continue;
        bool is_written = eff.write_args.count(static_cast<int>(k)) ||
                          (eff.writes_pointer_args && v.is_pointer_type());
        if (is_written) assign(view, idx.root(caller, v.text), l, extend_only);
      }
      if (!ins.result.empty()) assign(view, ins.result, l, extend_only);
      return;
    }

    const ProcSummary& tq = res.summaries.at(callee->name);

    // Eq. 5: the call's own row carries control context and non-pointer
    // argument dependences; pointer actuals travel through SPEC instead.
    SliceSet l_site(u.size());
    l_site.insert(u.bit_of(ins.id));
    for (InstrId j : cd_of(ins.id)) l_site |= row(j);
    for (const auto& v : ins.operands)
      if (v.is_name() && !v.is_pointer_type()) l_site |= lookup(view, v.text);
    store_row(ins, l_site);

    auto spec = compute_spec(ins, *callee, view);
    auto tprime = compute_tprime(tq, l_site, spec);

    if (!extend_only)
      for (const auto& [sym, v] : spec) {
        auto it = spec_accum.find(sym);
        if (it == spec_accum.end())
          spec_accum[sym] = v;
        else
          it->second |= v;
      }

    if (a.opts_.record_instantiations) {
      CallInstantiation ci;
      ci.site = ins.id;
      ci.callee = callee->name;
      ci.spec = spec;
      ci.tprime = tprime;
      res.instantiations[ins.id] = std::move(ci);
    }

    // Eq. 11
    for (const auto& [key, tp] : tprime) {
      bool is_param = key.func == callee->name && tq.is_frame_param(key.name);
      if (is_param && is_global_name(key.name) && key.name != callee->name) {
        if (out_param(tq, key.name)) {
          assign(view, key.name, tp, extend_only); // kill the caller's view of the global
          auto it = res.S.find(key);
          if (it == res.S.end())
            res.S[key] = tp;
          else
            it->second |= tp;
        }
        continue;
      }
      auto it = res.S.find(key);
      if (it == res.S.end())
        res.S[key] = tp;
      else
        it->second |= tp;
    }
    for (std::size_t k = 0; k < callee->formals.size(); ++k) {
      const Value& actual = ins.operands[k];
      if (!actual.is_name()) continue;
      if (!out_param(tq, callee->formals[k])) continue;
      const SliceSet& tp = tprime.at(ValueKey{callee->name, callee->formals[k]});
      assign(view, idx.root(caller, actual.text), tp, extend_only);
    }
    if (!ins.result.empty() && !callee->is_void()) {
      ValueKey rk{callee->name, return_param(*callee)};
      auto it = tprime.find(rk);
      if (it != tprime.end()) assign(view, ins.result, it->second, extend_only);
    }
  }

  void transfer(const Function& fn, const Instruction& ins, View& view, bool extend_only) {
    if (ins.op == Opcode::Call) {
      transfer_call(ins, view, extend_only);
      return;
    }
    SliceSet l(u.size());
    l.insert(u.bit_of(ins.id));
    for (InstrId j : cd_of(ins.id)) l |= row(j);
    for (const auto& x : ref_set(idx, ins)) l |= lookup(view, x);
    store_row(ins, l);

    for (const auto& x : def_set(idx, ins)) {
      if (ins.is_multi_valued())
        assign(view, x, l, true);
      else
        assign(view, x, l, extend_only);
    }
    if (ins.op == Opcode::Ret && !fn.is_void())
      assign(view, return_param(fn), l, true); // any return path may produce the value
  }

  // One procedure pass: block-level fixpoint with join merging.
  void pass(const std::string& name, bool reset, bool extend_only) {
    const Frame& fr = frames.at(name);
    const Function& fn = *fr.fn;
    const Cfg& cfg = a.cfgs_.at(name);

    scrub_foreign_symbols(name);

    View init;
    for (const auto& p : fr.params) {
      ValueKey key{name, p};
      if (reset) {
        init[p] = symbol_set(u, key);
      } else {
        auto it = res.S.find(key);
        init[p] = it != res.S.end() ? it->second : symbol_set(u, key);
      }
    }
    if (!reset) {
      for (const auto& n : fr.names) {
        if (init.count(n)) continue;
        auto it = res.S.find(ValueKey{name, n});
        if (it != res.S.end()) init[n] = it->second;
      }
    }

    std::map<std::string, std::set<std::string>> preds;
    for (const auto* b : fr.rpo) {
      const auto& term = b->instructions.back();
      for (const auto& l : term.labels) preds[l].insert(b->label);
    }

    std::map<std::string, View> out;
    std::size_t frame_size = fr.names.size() + 1;
    std::size_t guard = u.size() * frame_size + 16;
    std::size_t rounds = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      if (++rounds > guard)
        throw AnalysisError(AnalysisError::Internal,
                            name + ": slice fixpoint failed to stabilize (monotonicity bug)");
      for (const auto* b : fr.rpo) {
        View view;
        if (b == fr.rpo.front()) view = init;
        auto pit = preds.find(b->label);
        if (pit != preds.end())
          for (const auto& p : pit->second) {
            auto oit = out.find(p);
            if (oit == out.end()) continue;
            for (const auto& [k, v] : oit->second) {
              auto vit = view.find(k);
              if (vit == view.end())
                view[k] = v;
              else
                vit->second |= v;
            }
          }
        for (const auto& ins : b->instructions) transfer(fn, ins, view, extend_only);
        auto oit = out.find(b->label);
        if (oit == out.end() || !(oit->second == view)) {
          out[b->label] = std::move(view);
          changed = true;
        }
      }
    }

    // Eq. 4: the procedure symbolic slice combines the slice tables at exit
    // instructions.
    View exit_state;
    bool any_exit = false;
    for (const auto* b : fr.rpo) {
      Opcode term = b->instructions.back().op;
      if (term != Opcode::Ret && term != Opcode::Unreachable) continue;
      any_exit = true;
      auto oit = out.find(b->label);
      if (oit == out.end()) continue;
      for (const auto& [k, v] : oit->second) {
        auto it = exit_state.find(k);
        if (it == exit_state.end())
          exit_state[k] = v;
        else
          it->second |= v;
      }
    }
    if (!any_exit) exit_state = init; // no path leaves: only the entry view is observable

    if (!extend_only) {
      for (const auto& n : fr.names) res.S.erase(ValueKey{name, n});
      for (const auto& [k, v] : exit_state) res.S[ValueKey{name, k}] = v;
    } else {
      for (const auto& [k, v] : exit_state) {
        ValueKey key{name, k};
        auto it = res.S.find(key);
        if (it == res.S.end())
          res.S[key] = v;
        else
          it->second |= v;
      }
    }
  }

  ProcSummary snapshot(const std::string& name) {
    ProcSummary s;
    s.proc = name;
    s.frame_params = frames.at(name).params;
    s.table = res.S;
    return s;
  }

  ProcSummary seed_summary(const std::string& name) {
    ProcSummary s;
    s.proc = name;
    s.frame_params = frames.at(name).params;
    for (const auto& p : s.frame_params) {
      ValueKey key{name, p};
      s.table[key] = symbol_set(u, key);
    }
    return s;
  }

  bool same_table(const SliceTable& a_, const SliceTable& b_) const {
    if (a_.size() != b_.size()) return false;
    auto it = a_.begin();
    auto jt = b_.begin();
    for (; it != a_.end(); ++it, ++jt)
      if (it->first != jt->first || !(it->second == jt->second)) return false;
    return true;
  }

  void run() {
    setup_frames();
    auto order = scc_order(a.cg_);
    std::set<std::pair<std::string, std::string>> edge_set;
    for (const auto& e : a.cg_.edges) edge_set.insert({e.caller, e.callee});

    for (const auto& scc : order) {
      bool recursive = scc.size() > 1 || edge_set.count({scc[0], scc[0]});
      if (!recursive) {
        pass(scc[0], /*reset=*/true, /*extend_only=*/false);
        res.summaries[scc[0]] = snapshot(scc[0]);
        continue;
      }
      for (const auto& p : scc) res.summaries[p] = seed_summary(p);
      std::size_t guard = u.size() * scc.size() * 4 + 16;
      std::size_t rounds = 0;
      bool stable = false;
      while (!stable) {
        if (++rounds > guard)
          throw AnalysisError(AnalysisError::Internal,
                              scc[0] + ": recursive summary fixpoint failed to stabilize");
        stable = true;
        for (const auto& p : scc) {
          pass(p, /*reset=*/true, /*extend_only=*/false);
          ProcSummary next = snapshot(p);
          if (!same_table(next.table, res.summaries.at(p).table)) stable = false;
          res.summaries[p] = std::move(next);
        }
      }
      // replay call-site extensions into the final rows; monotone, so kills
      // are demoted to unions
      for (int i = 0; i < 2; ++i)
        for (const auto& p : scc) pass(p, /*reset=*/false, /*extend_only=*/true);
    }

    if (res.mode == SliceMode::FullIdt) finalize_idt();
  }

  void finalize_idt() {
    // A symbolic parameter stands for whatever reaches it at call sites.
    // Close the SPEC accumulation over symbol-to-symbol references, then
    // keep the concrete part; parameters of uncalled procedures vanish.
    const auto& syms = u.symbols();
    std::vector<SliceSet> flows(syms.size(), SliceSet(u.size()));
    for (std::size_t i = 0; i < syms.size(); ++i) {
      auto it = spec_accum.find(syms[i]);
      if (it != spec_accum.end()) flows[i] = it->second;
    }
    bool grew = true;
    std::size_t guard = syms.size() * u.size() + 8;
    std::size_t rounds = 0;
    while (grew) {
      grew = false;
      if (++rounds > guard)
        throw AnalysisError(AnalysisError::Internal, "symbol substitution failed to close");
      for (std::size_t i = 0; i < syms.size(); ++i) {
        SliceSet next = flows[i];
        flows[i].for_each([&](std::size_t bit) {
          if (bit >= u.instr_count()) next |= flows[bit - u.instr_count()];
        });
        if (!(next == flows[i])) {
          flows[i] = std::move(next);
          grew = true;
        }
      }
    }
    std::vector<SliceSet> csub;
    csub.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
      SliceSet c = flows[i];
      c.truncate(u.instr_count());
      csub.push_back(std::move(c));
    }
    auto expand = [&](const SliceSet& rowset) {
      SliceSet out = rowset;
      out.truncate(u.instr_count());
      rowset.for_each([&](std::size_t bit) {
        if (bit >= u.instr_count()) out |= csub[bit - u.instr_count()];
      });
      return out;
    };

    DepTable expanded;
    for (InstrId id = 1; id <= u.instr_count(); ++id) expanded[id] = expand(row(id));

    // call-context closure: every instruction of a callee depends on its
    // call sites' rows and their contexts
    std::map<std::string, std::vector<const CallEdge*>> in_edges;
    for (const auto& e : a.cg_.edges) in_edges[e.callee].push_back(&e);
    std::map<std::string, SliceSet> ctx;
    for (const auto& fn : m.functions) ctx[fn.name] = SliceSet(u.size());
    auto order = scc_order(a.cg_);
    for (auto scc_it = order.rbegin(); scc_it != order.rend(); ++scc_it) {
      for (std::size_t round = 0; round < scc_it->size() + 1; ++round) {
        bool changed = false;
        for (const auto& q : *scc_it) {
          SliceSet acc(u.size());
          auto eit = in_edges.find(q);
          if (eit != in_edges.end())
            for (const CallEdge* e : eit->second) {
              acc |= expanded.at(e->site);
              acc |= ctx.at(e->caller);
            }
          if (!(acc == ctx.at(q))) {
            ctx[q] = std::move(acc);
            changed = true;
          }
        }
        if (!changed) break;
      }
    }

    for (InstrId id = 1; id <= u.instr_count(); ++id) {
      SliceSet full = expanded.at(id);
      full |= ctx.at(idx.function_of(id).name);
      res.L_full[id] = std::move(full);
    }
  }
};

// --- Analysis ---------------------------------------------------------------

namespace {

std::shared_ptr<const Universe> build_universe(const Module& m, const ModuleIndex& idx,
                                               const std::map<std::string, std::set<std::string>>& glob_t) {
  std::vector<ValueKey> symbols;
  for (const auto& fn : m.functions) {
    for (const auto& f : fn.formals) symbols.push_back({fn.name, f});
    if (!fn.is_void()) symbols.push_back({fn.name, fn.name});
    for (const auto& g : glob_t.at(fn.name)) symbols.push_back({fn.name, g});
  }
  return std::make_shared<Universe>(idx.instr_count(), std::move(symbols));
}

} // namespace

Analysis::Analysis(const Module& m, AnalysisOptions opts) : mod_(&m), idx_(m), opts_(std::move(opts)) {
  for (const auto& fn : m.functions)
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions)
        if (ins.op == Opcode::Call && !m.function(ins.callee) && !m.external(ins.callee))
          throw AnalysisError(AnalysisError::UnknownCallee,
                              "call to unknown procedure " + ins.callee + " at instruction " +
                                  std::to_string(ins.id));

  cg_ = build_callgraph(m);
  glob_t_ = transitive_globals(m, idx_, cg_);
  for (const auto& fn : m.functions) {
    cfgs_.emplace(fn.name, build_cfg(idx_, fn));
    cds_.emplace(fn.name, control_deps(cfgs_.at(fn.name), idx_));
    for (const auto& d : cfgs_.at(fn.name).diagnostics) result_.diagnostics.push_back(d);
  }
  result_.mode = opts_.mode;
  result_.universe = build_universe(m, idx_, glob_t_);

  Engine engine(*this);
  engine.run();
}

std::vector<InstrId> Analysis::backward_slice(const std::string& fn, const std::string& var) const {
  auto it = result_.S.find(ValueKey{fn, var});
  if (it != result_.S.end()) return concretize(*result_.universe, it->second);
  const Function* f = mod_->function(fn);
  if (!f) throw AnalysisError(AnalysisError::UnknownVariable, "unknown procedure " + fn);
  bool structural = is_global_name(var)
                        ? mod_->has_global(var)
                        : (idx_.defines_register(fn, var) ||
                           std::find(f->formals.begin(), f->formals.end(), var) != f->formals.end());
  if (!structural)
    throw AnalysisError(AnalysisError::UnknownVariable, var + " is not a value of " + fn);
  return {};
}

std::vector<InstrId> Analysis::forward_slice(const std::string& fn, const std::string& var) const {
  if (result_.mode != SliceMode::FullIdt)
    throw AnalysisError(AnalysisError::ModeError, "forward slicing requires full-IDT mode");
  const Function* f = mod_->function(fn);
  if (!f) throw AnalysisError(AnalysisError::UnknownVariable, "unknown procedure " + fn);
  bool structural = is_global_name(var)
                        ? mod_->has_global(var)
                        : (idx_.defines_register(fn, var) ||
                           std::find(f->formals.begin(), f->formals.end(), var) != f->formals.end());
  if (!structural)
    throw AnalysisError(AnalysisError::UnknownVariable, var + " is not a value of " + fn);

  // target rows: instructions whose REF mentions the criterion variable
  SliceSet targets(result_.universe->size());
  for (InstrId id = 1; id <= result_.universe->instr_count(); ++id) {
    const Instruction& ins = idx_.instr(id);
    if (!is_global_name(var) && idx_.function_of(id).name != fn) continue;
    auto refs = ref_set(idx_, ins);
    if (refs.count(var)) targets.insert(result_.universe->bit_of(id));
  }
  std::vector<InstrId> out;
  for (InstrId id = 1; id <= result_.universe->instr_count(); ++id) {
    auto it = result_.L_full.find(id);
    if (it == result_.L_full.end()) continue;
    SliceSet probe = it->second;
    probe &= targets;
    if (!probe.empty()) out.push_back(id);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Analysis::auto_criteria() const {
  std::vector<std::pair<std::string, std::string>> out;
  if (mod_->function("@main"))
    for (const auto& g : mod_->globals) out.emplace_back("@main", g.name);
  for (const auto& fn : mod_->functions)
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions)
        if (ins.op == Opcode::Alloca) out.emplace_back(fn.name, ins.result);
  return out;
}

IntraResult intra_slice(const Module& m, const std::string& fn, SliceMode mode) {
  const Function* f = m.function(fn);
  if (!f) throw AnalysisError(AnalysisError::UnknownVariable, "unknown procedure " + fn);
  for (const auto& b : f->blocks)
    for (const auto& ins : b.instructions)
      if (ins.op == Opcode::Call && m.function(ins.callee))
        throw AnalysisError(AnalysisError::Internal,
                            "intra_slice requires a call-free procedure; " + fn + " calls " +
                                ins.callee);
  AnalysisOptions opts;
  opts.mode = mode;
  Analysis a(m, opts);
  IntraResult out;
  out.summary = a.result().summaries.at(fn);
  // restrict to the procedure's own frame: pure intraprocedural state
  SliceTable own;
  for (const auto& [k, v] : out.summary.table)
    if (k.func == fn) own[k] = v;
  out.summary.table = std::move(own);
  out.S = out.summary.table;
  for (const auto& b : f->blocks)
    for (const auto& ins : b.instructions) {
      auto it = a.result().L.find(ins.id);
      if (it != a.result().L.end()) out.L[ins.id] = it->second;
    }
  return out;
}

std::vector<InstrId> backward_slice(const Module& m, const std::string& fn, const std::string& var) {
  AnalysisOptions opts;
  opts.mode = SliceMode::BackwardFast;
  opts.record_instantiations = false;
  Analysis a(m, opts);
  return a.backward_slice(fn, var);
}

std::vector<InstrId> forward_slice(const Module& m, const std::string& fn, const std::string& var) {
  Analysis a(m);
  return a.forward_slice(fn, var);
}

} // namespace symslice
