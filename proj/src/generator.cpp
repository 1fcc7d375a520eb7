#include "symslice/generator.hpp"

#include <algorithm>
#include <stdexcept>

#include "symslice/parser.hpp"

namespace symslice {

namespace {

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    // splitmix64: stable across platforms
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  bool chance(int pct) { return below(100) < pct; }
};

struct FnPlan {
  std::string name;
  std::vector<std::string> formal_types; // "i32" or "i32*"
  bool returns_value = false;
  std::vector<int> callees; // indices into the plan vector
};

struct ModuleGen {
  GenOptions opts;
  Rng rng;
  Module mod;
  std::vector<FnPlan> plans;
  int budget;
  bool uses_printf = false, uses_scanf = false, uses_memcpy = false;

  explicit ModuleGen(const GenOptions& o) : opts(o), rng(o.seed), budget(o.max_instrs) {}

  void plan() {
    int nprocs = opts.loop_heavy ? 1 + rng.below(2) : 1 + rng.below(std::max(1, opts.max_procs));
    for (int i = 0; i < nprocs; ++i) {
      FnPlan p;
      p.name = i == 0 ? "@main" : "@f" + std::to_string(i);
      if (i > 0) {
        int nf = rng.below(4);
        for (int k = 0; k < nf; ++k)
          p.formal_types.push_back(rng.chance(55) ? "i32*" : "i32");
        p.returns_value = rng.chance(40);
      }
      plans.push_back(std::move(p));
    }
    // forward call edges; occasional recursion among non-main procedures
    for (int i = 0; i < nprocs; ++i) {
      for (int j = i + 1; j < nprocs; ++j)
        if (i == 0 ? rng.chance(70) : rng.chance(45)) plans[i].callees.push_back(j);
      if (opts.allow_recursion && i > 0) {
        if (rng.chance(12)) plans[i].callees.push_back(i); // self recursion
        if (i > 1 && rng.chance(10)) plans[i].callees.push_back(1 + rng.below(i - 1)); // back edge
      }
    }
    if (opts.allow_globals && rng.chance(60)) {
      int ng = 1 + rng.below(3);
      for (int g = 0; g < ng; ++g)
        mod.globals.push_back({"@g" + std::to_string(g), "i32", "0"});
    }
  }

  void run() {
    plan();
    for (std::size_t i = 0; i < plans.size(); ++i) emit_function(static_cast<int>(i));
    if (uses_printf) mod.externals.push_back({"@printf", {}, "i32", true});
    if (uses_scanf) mod.externals.push_back({"@scanf", {}, "i32", true});
    if (uses_memcpy) mod.externals.push_back({"@memcpy", {}, "void", true});
  }

  struct FnCtx {
    Function fn;
    std::vector<std::string> cells;      // i32 memory objects usable as pointer actuals
    std::vector<std::string> arrays;     // array allocas, addressed through gep
    std::vector<std::string> values;     // in-scope i32 registers / by-value formals
    std::vector<std::string> bools;      // in-scope i1 registers
    int regs = 0;
    std::size_t cur = 0; // index into fn.blocks
    int depth = 0;

    std::string fresh() { return "%t" + std::to_string(regs++); }
    std::string label(std::size_t b) const { return fn.blocks[b].label; }
  };

  Instruction make(Opcode op) {
    Instruction ins;
    ins.op = op;
    return ins;
  }

  void push(FnCtx& c, Instruction ins) {
    c.fn.blocks[c.cur].instructions.push_back(std::move(ins));
    --budget;
  }

  std::size_t new_block(FnCtx& c) {
    c.fn.blocks.push_back({"b" + std::to_string(c.fn.blocks.size()), {}});
    return c.fn.blocks.size() - 1;
  }

  // branch current block to `target` and continue there
  void br_to(FnCtx& c, std::size_t target) {
    Instruction br = make(Opcode::BrUncond);
    br.labels.push_back(c.label(target));
    push(c, std::move(br));
    c.cur = target;
  }

  std::string const_val() { return std::to_string(rng.below(100)); }

  // an i32 operand: constant, in-scope register, or a fresh load
  Value value_operand(FnCtx& c) {
    int pick = rng.below(100);
    if (pick < 30 || (c.values.empty() && c.cells.empty()))
      return Value::constant(const_val(), "i32");
    if (pick < 65 && !c.values.empty())
      return Value::name(c.values[rng.below(static_cast<int>(c.values.size()))], "i32");
    if (!c.cells.empty()) {
      Instruction ld = make(Opcode::Load);
      ld.result = c.fresh();
      ld.type = "i32";
      ld.operands.push_back(Value::name(c.cells[rng.below(static_cast<int>(c.cells.size()))], "i32*"));
      std::string r = ld.result;
      push(c, std::move(ld));
      c.values.push_back(r);
      return Value::name(r, "i32");
    }
    return Value::constant(const_val(), "i32");
  }

  std::string binop(FnCtx& c) {
    static const char* kinds[] = {"add", "sub", "mul", "and", "or", "xor"};
    Instruction op = make(Opcode::BinOp);
    op.detail = kinds[rng.below(6)];
    op.type = "i32";
    op.result = c.fresh();
    op.operands.push_back(value_operand(c));
    op.operands.push_back(value_operand(c));
    std::string r = op.result;
    push(c, std::move(op));
    c.values.push_back(r);
    return r;
  }

  std::string icmp(FnCtx& c) {
    static const char* preds[] = {"eq", "ne", "slt", "sle", "sgt", "sge"};
    Instruction op = make(Opcode::ICmp);
    op.detail = preds[rng.below(6)];
    op.type = "i32";
    op.result = c.fresh();
    op.operands.push_back(value_operand(c));
    op.operands.push_back(value_operand(c));
    std::string r = op.result;
    push(c, std::move(op));
    c.bools.push_back(r);
    return r;
  }

  void store_to(FnCtx& c, const std::string& cell, Value v) {
    Instruction st = make(Opcode::Store);
    st.operands.push_back(std::move(v));
    st.operands.push_back(Value::name(cell, "i32*"));
    push(c, std::move(st));
  }

  std::string pick_cell(FnCtx& c) {
    return c.cells[rng.below(static_cast<int>(c.cells.size()))];
  }

  void stmt_store(FnCtx& c) {
    if (c.cells.empty()) return;
    Value v = rng.chance(50) ? Value::name(binop(c), "i32") : value_operand(c);
    store_to(c, pick_cell(c), std::move(v));
  }

  void stmt_gep(FnCtx& c) {
    if (c.arrays.empty()) return;
    Instruction gep = make(Opcode::GetElementPtr);
    gep.result = c.fresh();
    std::string arr = c.arrays[rng.below(static_cast<int>(c.arrays.size()))];
    gep.operands.push_back(Value::name(arr, "[4 x i32]*"));
    gep.operands.push_back(Value::constant("0", "i32"));
    gep.operands.push_back(value_operand(c));
    gep.type = "i32*";
    std::string p = gep.result;
    push(c, std::move(gep));
    if (rng.chance(50)) {
      Instruction ld = make(Opcode::Load);
      ld.result = c.fresh();
      ld.type = "i32";
      ld.operands.push_back(Value::name(p, "i32*"));
      std::string r = ld.result;
      push(c, std::move(ld));
      c.values.push_back(r);
    } else {
      Instruction st = make(Opcode::Store);
      st.operands.push_back(value_operand(c));
      st.operands.push_back(Value::name(p, "i32*"));
      push(c, std::move(st));
    }
  }

  void stmt_select(FnCtx& c) {
    if (c.bools.empty()) icmp(c);
    Instruction sel = make(Opcode::Select);
    sel.result = c.fresh();
    sel.operands.push_back(Value::name(c.bools[rng.below(static_cast<int>(c.bools.size()))], "i1"));
    sel.operands.push_back(value_operand(c));
    sel.operands.push_back(value_operand(c));
    sel.type = "i32";
    std::string r = sel.result;
    push(c, std::move(sel));
    c.values.push_back(r);
  }

  void stmt_call(FnCtx& c, int self) {
    const auto& callees = plans[self].callees;
    bool external_ok = opts.allow_externals;
    if (callees.empty() && !external_ok) return;
    bool external = external_ok && (callees.empty() || rng.chance(35));
    if (external) {
      int kind = rng.below(3);
      if (kind == 0 || c.cells.empty()) {
        Instruction call = make(Opcode::Call);
        call.callee = "@printf";
        call.type = "i32";
        call.result = c.fresh();
        call.ellipsis_args = true;
        if (rng.chance(80)) call.operands.push_back(value_operand(c));
        uses_printf = true;
        std::string r = call.result;
        push(c, std::move(call));
        c.values.push_back(r);
      } else if (kind == 1) {
        Instruction call = make(Opcode::Call);
        call.callee = "@scanf";
        call.type = "i32";
        call.result = c.fresh();
        call.ellipsis_args = true;
        call.operands.push_back(Value::name(pick_cell(c), "i32*"));
        uses_scanf = true;
        std::string r = call.result;
        push(c, std::move(call));
        c.values.push_back(r);
      } else if (c.cells.size() >= 2) {
        Instruction call = make(Opcode::Call);
        call.callee = "@memcpy";
        call.type = "void";
        std::vector<std::string> picked = pick_distinct_cells(c, 2);
        call.operands.push_back(Value::name(picked[0], "i32*"));
        call.operands.push_back(Value::name(picked[1], "i32*"));
        uses_memcpy = true;
        push(c, std::move(call));
      }
      return;
    }
    int target = callees[rng.below(static_cast<int>(callees.size()))];
    const FnPlan& callee = plans[target];
    int nptr = 0;
    for (const auto& t : callee.formal_types)
      if (t == "i32*") ++nptr;
    if (nptr > static_cast<int>(c.cells.size())) return; // not enough distinct cells
    std::vector<std::string> ptrs = pick_distinct_cells(c, nptr);
    Instruction call = make(Opcode::Call);
    call.callee = callee.name;
    call.type = callee.returns_value ? "i32" : "void";
    std::size_t pi = 0;
    for (const auto& t : callee.formal_types) {
      if (t == "i32*")
        call.operands.push_back(Value::name(ptrs[pi++], "i32*"));
      else
        call.operands.push_back(value_operand(c));
    }
    if (callee.returns_value && rng.chance(70)) {
      call.result = c.fresh();
      std::string r = call.result;
      push(c, std::move(call));
      c.values.push_back(r);
    } else {
      push(c, std::move(call));
    }
  }

  std::vector<std::string> pick_distinct_cells(FnCtx& c, int n) {
    std::vector<std::string> pool = c.cells;
    // deterministic partial shuffle
    for (int i = 0; i < n && i < static_cast<int>(pool.size()); ++i) {
      int j = i + rng.below(static_cast<int>(pool.size()) - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(std::min<std::size_t>(n, pool.size()));
    return pool;
  }

  void stmt_if(FnCtx& c, int self) {
    std::string cond = icmp(c);
    std::size_t then_b = new_block(c);
    std::size_t else_b = new_block(c);
    std::size_t join_b = new_block(c);
    Instruction br = make(Opcode::BrCond);
    br.operands.push_back(Value::name(cond, "i1"));
    br.labels = {c.label(then_b), c.label(else_b)};
    push(c, std::move(br));

    std::size_t vals = c.values.size(), bools = c.bools.size();
    c.cur = then_b;
    ++c.depth;
    emit_stmts(c, self, 1 + rng.below(3));
    std::string then_end = c.label(c.cur);
    std::string tval = c.values.empty() ? "" : c.values.back();
    c.values.resize(vals);
    c.bools.resize(bools);
    br_to(c, join_b);

    c.cur = else_b;
    emit_stmts(c, self, rng.below(3));
    std::string else_end = c.label(c.cur);
    std::string eval = c.values.empty() ? "" : c.values.back();
    c.values.resize(vals);
    c.bools.resize(bools);
    --c.depth;
    // land in join via the else side
    Instruction br2 = make(Opcode::BrUncond);
    br2.labels.push_back(c.label(join_b));
    push(c, std::move(br2));
    c.cur = join_b;

    if (!tval.empty() && !eval.empty() && tval != eval && rng.chance(40)) {
      Instruction phi = make(Opcode::Phi);
      phi.result = c.fresh();
      phi.type = "i32";
      phi.incomings.push_back({Value::name(tval, "i32"), then_end});
      phi.incomings.push_back({Value::name(eval, "i32"), else_end});
      std::string r = phi.result;
      push(c, std::move(phi));
      c.values.push_back(r);
    }
  }

  void stmt_switch(FnCtx& c, int self) {
    Value scrutinee = value_operand(c);
    std::size_t a = new_block(c);
    std::size_t b = new_block(c);
    std::size_t dflt = new_block(c);
    std::size_t join_b = new_block(c);
    Instruction sw = make(Opcode::Switch);
    sw.operands.push_back(std::move(scrutinee));
    sw.labels = {c.label(dflt), c.label(a), c.label(b)};
    sw.cases = {{"0", c.label(a)}, {"1", c.label(b)}};
    push(c, std::move(sw));
    std::size_t vals = c.values.size(), bools = c.bools.size();
    for (std::size_t arm : {a, b, dflt}) {
      c.cur = arm;
      emit_stmts(c, self, rng.below(2));
      c.values.resize(vals);
      c.bools.resize(bools);
      Instruction br = make(Opcode::BrUncond);
      br.labels.push_back(c.label(join_b));
      push(c, std::move(br));
    }
    c.cur = join_b;
  }

  void stmt_while_mem(FnCtx& c, int self) {
    if (c.cells.empty()) return;
    std::string counter = pick_cell(c);
    store_to(c, counter, Value::constant("0", "i32"));
    std::size_t header = new_block(c);
    std::size_t body = new_block(c);
    std::size_t exit = new_block(c);
    br_to(c, header);

    Instruction ld = make(Opcode::Load);
    ld.result = c.fresh();
    ld.type = "i32";
    ld.operands.push_back(Value::name(counter, "i32*"));
    std::string cv = ld.result;
    push(c, std::move(ld));
    Instruction cmp = make(Opcode::ICmp);
    cmp.detail = "slt";
    cmp.type = "i32";
    cmp.result = c.fresh();
    cmp.operands.push_back(Value::name(cv, "i32"));
    cmp.operands.push_back(value_operand(c));
    std::string cond = cmp.result;
    push(c, std::move(cmp));
    Instruction br = make(Opcode::BrCond);
    br.operands.push_back(Value::name(cond, "i1"));
    br.labels = {c.label(body), c.label(exit)};
    push(c, std::move(br));

    c.cur = body;
    std::size_t vals = c.values.size(), bools = c.bools.size();
    ++c.depth;
    emit_stmts(c, self, 1 + rng.below(3));
    --c.depth;
    c.values.resize(vals);
    c.bools.resize(bools);
    Instruction ld2 = make(Opcode::Load);
    ld2.result = c.fresh();
    ld2.type = "i32";
    ld2.operands.push_back(Value::name(counter, "i32*"));
    std::string cv2 = ld2.result;
    push(c, std::move(ld2));
    Instruction inc = make(Opcode::BinOp);
    inc.detail = "add";
    inc.type = "i32";
    inc.result = c.fresh();
    inc.operands.push_back(Value::name(cv2, "i32"));
    inc.operands.push_back(Value::constant("1", "i32"));
    std::string nv = inc.result;
    push(c, std::move(inc));
    store_to(c, counter, Value::name(nv, "i32"));
    Instruction br2 = make(Opcode::BrUncond);
    br2.labels.push_back(c.label(header));
    push(c, std::move(br2));
    c.cur = exit;
  }

  void stmt_while_phi(FnCtx& c, int self) {
    Value init = value_operand(c);
    std::string pre = c.label(c.cur);
    std::size_t header = new_block(c);
    std::size_t body = new_block(c);
    std::size_t exit = new_block(c);
    br_to(c, header);

    Instruction phi = make(Opcode::Phi);
    phi.result = c.fresh();
    phi.type = "i32";
    std::string ivar = phi.result;
    // the back-edge incoming is patched in after the body is emitted
    phi.incomings.push_back({init, pre});
    push(c, std::move(phi));

    Instruction cmp = make(Opcode::ICmp);
    cmp.detail = "slt";
    cmp.type = "i32";
    cmp.result = c.fresh();
    cmp.operands.push_back(Value::name(ivar, "i32"));
    cmp.operands.push_back(Value::constant(std::to_string(10 + rng.below(90)), "i32"));
    std::string cond = cmp.result;
    push(c, std::move(cmp));
    Instruction br = make(Opcode::BrCond);
    br.operands.push_back(Value::name(cond, "i1"));
    br.labels = {c.label(body), c.label(exit)};
    push(c, std::move(br));

    c.cur = body;
    c.values.push_back(ivar);
    std::size_t vals = c.values.size(), bools = c.bools.size();
    ++c.depth;
    emit_stmts(c, self, 1 + rng.below(2));
    --c.depth;
    c.values.resize(vals);
    c.bools.resize(bools);
    Instruction inc = make(Opcode::BinOp);
    inc.detail = "add";
    inc.type = "i32";
    inc.result = c.fresh();
    inc.operands.push_back(Value::name(ivar, "i32"));
    inc.operands.push_back(Value::constant("1", "i32"));
    std::string nv = inc.result;
    push(c, std::move(inc));
    std::string body_end = c.label(c.cur);
    Instruction br2 = make(Opcode::BrUncond);
    br2.labels.push_back(c.label(header));
    push(c, std::move(br2));

    // patch the phi with the real back-edge value and label
    c.fn.blocks[header].instructions.front().incomings.push_back(
        {Value::name(nv, "i32"), body_end});
    c.cur = exit;
    c.values.erase(std::find(c.values.begin(), c.values.end(), ivar));
  }

  void emit_stmts(FnCtx& c, int self, int count) {
    for (int k = 0; k < count; ++k) {
      if (budget <= 10) return;
      int pick = rng.below(100);
      if (pick < 28) {
        stmt_store(c);
      } else if (pick < 40) {
        binop(c);
      } else if (pick < 58) {
        stmt_call(c, self);
      } else if (pick < 70 && c.depth < 3) {
        stmt_if(c, self);
      } else if (pick < 80 && opts.allow_loops && c.depth < 2) {
        if (rng.chance(60))
          stmt_while_mem(c, self);
        else
          stmt_while_phi(c, self);
      } else if (pick < 86) {
        stmt_gep(c);
      } else if (pick < 92) {
        stmt_select(c);
      } else if (pick < 96 && c.depth < 2) {
        stmt_switch(c, self);
      } else {
        stmt_store(c);
      }
    }
  }

  void emit_loop_heavy(FnCtx& c, int self) {
    // chains of while loops over shared cells, in the style of the classic
    // loopN stress programs
    int nloops = 20 + rng.below(40);
    Instruction sc = make(Opcode::Call);
    sc.callee = "@scanf";
    sc.type = "i32";
    sc.result = c.fresh();
    sc.ellipsis_args = true;
    sc.operands.push_back(Value::name(c.cells[0], "i32*"));
    uses_scanf = true;
    std::string r = sc.result;
    push(c, std::move(sc));
    c.values.push_back(r);
    for (int k = 0; k < nloops; ++k) {
      std::string counter = c.cells[1 + rng.below(static_cast<int>(c.cells.size()) - 1)];
      store_to(c, counter, Value::constant("0", "i32"));
      std::size_t header = new_block(c);
      std::size_t body = new_block(c);
      std::size_t exit = new_block(c);
      br_to(c, header);
      Instruction ld = make(Opcode::Load);
      ld.result = c.fresh();
      ld.type = "i32";
      ld.operands.push_back(Value::name(counter, "i32*"));
      std::string cv = ld.result;
      push(c, std::move(ld));
      Instruction bound = make(Opcode::Load);
      bound.result = c.fresh();
      bound.type = "i32";
      bound.operands.push_back(Value::name(c.cells[0], "i32*"));
      std::string bv = bound.result;
      push(c, std::move(bound));
      Instruction cmp = make(Opcode::ICmp);
      cmp.detail = "slt";
      cmp.type = "i32";
      cmp.result = c.fresh();
      cmp.operands.push_back(Value::name(cv, "i32"));
      cmp.operands.push_back(Value::name(bv, "i32"));
      std::string cond = cmp.result;
      push(c, std::move(cmp));
      Instruction br = make(Opcode::BrCond);
      br.operands.push_back(Value::name(cond, "i1"));
      br.labels = {c.label(body), c.label(exit)};
      push(c, std::move(br));
      c.cur = body;
      // mix a couple of the shared cells
      std::string src = pick_cell(c);
      std::string dst = pick_cell(c);
      Instruction l1 = make(Opcode::Load);
      l1.result = c.fresh();
      l1.type = "i32";
      l1.operands.push_back(Value::name(src, "i32*"));
      std::string v1 = l1.result;
      push(c, std::move(l1));
      Instruction l2 = make(Opcode::Load);
      l2.result = c.fresh();
      l2.type = "i32";
      l2.operands.push_back(Value::name(dst, "i32*"));
      std::string v2 = l2.result;
      push(c, std::move(l2));
      Instruction add = make(Opcode::BinOp);
      add.detail = "add";
      add.type = "i32";
      add.result = c.fresh();
      add.operands.push_back(Value::name(v1, "i32"));
      add.operands.push_back(Value::name(v2, "i32"));
      std::string v3 = add.result;
      push(c, std::move(add));
      store_to(c, dst, Value::name(v3, "i32"));
      Instruction l3 = make(Opcode::Load);
      l3.result = c.fresh();
      l3.type = "i32";
      l3.operands.push_back(Value::name(counter, "i32*"));
      std::string cv2 = l3.result;
      push(c, std::move(l3));
      Instruction inc = make(Opcode::BinOp);
      inc.detail = "add";
      inc.type = "i32";
      inc.result = c.fresh();
      inc.operands.push_back(Value::name(cv2, "i32"));
      inc.operands.push_back(Value::constant("1", "i32"));
      std::string nv = inc.result;
      push(c, std::move(inc));
      store_to(c, counter, Value::name(nv, "i32"));
      Instruction br2 = make(Opcode::BrUncond);
      br2.labels.push_back(c.label(header));
      push(c, std::move(br2));
      c.cur = exit;
    }
  }

  void emit_function(int self) {
    const FnPlan& p = plans[self];
    FnCtx c;
    c.fn.name = p.name;
    c.fn.ret_type = p.returns_value ? "i32" : (self == 0 ? "i32" : "void");
    for (std::size_t k = 0; k < p.formal_types.size(); ++k) {
      c.fn.formals.push_back("%a" + std::to_string(k));
      c.fn.formal_types.push_back(p.formal_types[k]);
      if (p.formal_types[k] == "i32*")
        c.cells.push_back(c.fn.formals.back());
      else
        c.values.push_back(c.fn.formals.back());
    }
    for (const auto& g : mod.globals) c.cells.push_back(g.name);
    c.fn.blocks.push_back({"entry", {}});
    c.cur = 0;

    int nlocals = opts.loop_heavy ? 4 + rng.below(3) : 2 + rng.below(3);
    for (int k = 0; k < nlocals; ++k) {
      Instruction al = make(Opcode::Alloca);
      al.result = "%v" + std::to_string(k);
      al.type = "i32";
      push(c, std::move(al));
      c.cells.push_back("%v" + std::to_string(k));
    }
    if (!opts.loop_heavy && rng.chance(30)) {
      Instruction al = make(Opcode::Alloca);
      al.result = "%arr";
      al.type = "[4 x i32]";
      push(c, std::move(al));
      c.arrays.push_back("%arr");
    }
    // seed a couple of cells so slices are non-trivial
    for (int k = 0; k < 2 && k < static_cast<int>(c.cells.size()); ++k)
      store_to(c, c.cells[k], Value::constant(const_val(), "i32"));
    if (self == 0 && opts.allow_externals && !c.cells.empty()) {
      Instruction sc = make(Opcode::Call);
      sc.callee = "@scanf";
      sc.type = "i32";
      sc.result = c.fresh();
      sc.ellipsis_args = true;
      sc.operands.push_back(Value::name(pick_cell(c), "i32*"));
      uses_scanf = true;
      std::string r = sc.result;
      push(c, std::move(sc));
      c.values.push_back(r);
    }

    if (opts.loop_heavy && self == 0) {
      emit_loop_heavy(c, self);
    } else {
      int share = budget / std::max<std::size_t>(1, plans.size() - self);
      int count = 3 + rng.below(std::max(2, share / 4));
      emit_stmts(c, self, count);
    }

    if (self == 0 && opts.allow_externals && !c.cells.empty()) {
      Instruction pr = make(Opcode::Call);
      pr.callee = "@printf";
      pr.type = "i32";
      pr.result = c.fresh();
      pr.ellipsis_args = true;
      Instruction ld = make(Opcode::Load);
      ld.result = c.fresh();
      ld.type = "i32";
      ld.operands.push_back(Value::name(pick_cell(c), "i32*"));
      std::string lv = ld.result;
      // careful with ordering: load first, then print it
      pr.operands.push_back(Value::name(lv, "i32"));
      uses_printf = true;
      push(c, std::move(ld));
      push(c, std::move(pr));
    }

    Instruction ret = make(Opcode::Ret);
    if (c.fn.ret_type == "void") {
      ret.type = "void";
    } else {
      ret.type = "i32";
      ret.operands.push_back(rng.chance(60) && !c.values.empty()
                                 ? Value::name(c.values[rng.below(static_cast<int>(c.values.size()))],
                                               "i32")
                                 : Value::constant(const_val(), "i32"));
    }
    push(c, std::move(ret));
    mod.functions.push_back(std::move(c.fn));
  }
};

} // namespace

Module generate_module(const GenOptions& opts) {
  ModuleGen gen(opts);
  gen.run();
  // normalize through the printer/parser so spans and numbering come from the
  // canonical text
  std::string text = print_module(gen.mod);
  ParseResult parsed = parse_module(text);
  if (!parsed.ok())
    throw std::logic_error("generator produced unparsable text (seed " +
                           std::to_string(opts.seed) + ")");
  return parsed.module;
}

std::string generate_module_text(const GenOptions& opts) {
  ModuleGen gen(opts);
  gen.run();
  return print_module(gen.mod);
}

} // namespace symslice
