#include "symslice/ir.hpp"

#include <algorithm>
#include <cassert>

namespace symslice {

const BasicBlock* Function::block(const std::string& label) const {
  for (const auto& b : blocks)
    if (b.label == label) return &b;
  return nullptr;
}

const Function* Module::function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const ExternalDecl* Module::external(const std::string& name) const {
  for (const auto& e : externals)
    if (e.name == name) return &e;
  return nullptr;
}

bool Module::has_global(const std::string& name) const {
  for (const auto& g : globals)
    if (g.name == name) return true;
  return false;
}

ModuleIndex::ModuleIndex(const Module& m) : mod_(&m) {
  for (const auto& fn : m.functions) {
    auto& roots = roots_[fn.name];
    auto& derived = derived_[fn.name];
    auto& pointers = pointers_[fn.name];
    auto& registers = registers_[fn.name];
    for (std::size_t i = 0; i < fn.formals.size(); ++i) {
      roots[fn.formals[i]] = fn.formals[i];
      if (fn.formal_is_pointer(i)) pointers.insert(fn.formals[i]);
    }
    for (const auto& g : m.globals) {
      roots[g.name] = g.name;
      pointers.insert(g.name);
    }
    for (const auto& b : fn.blocks) {
      for (const auto& ins : b.instructions) {
        by_id_.push_back(&ins);
        fn_of_.push_back(&fn);
        block_of_.push_back(b.label);
        if (ins.result.empty()) continue;
        registers.insert(ins.result);
        switch (ins.op) {
          case Opcode::Alloca:
            roots[ins.result] = ins.result;
            pointers.insert(ins.result);
            break;
          case Opcode::GetElementPtr:
          case Opcode::Cast: {
            // Follow the base operand's root when it is a name; scalar casts
            // keep their own identity.
            const Value* base = ins.operands.empty() ? nullptr : &ins.operands.front();
            bool ptr_result = !ins.type.empty() && ins.type.back() == '*';
            if (base && base->is_name() && (ins.op == Opcode::GetElementPtr || ptr_result)) {
              auto it = roots.find(base->text);
              roots[ins.result] = it != roots.end() ? it->second : base->text;
              derived.insert(ins.result);
              pointers.insert(ins.result);
            } else {
              roots[ins.result] = ins.result;
              if (ptr_result) pointers.insert(ins.result);
            }
            break;
          }
          default:
            roots[ins.result] = ins.result;
            if (!ins.type.empty() && ins.type.back() == '*') pointers.insert(ins.result);
            break;
        }
      }
    }
  }
  // ids are assumed dense and ordered; enforced by the parser/builder
  for (std::size_t i = 0; i < by_id_.size(); ++i) assert(by_id_[i]->id == i + 1);
}

const std::string& ModuleIndex::root(const std::string& fn, const std::string& name) const {
  auto fit = roots_.find(fn);
  if (fit != roots_.end()) {
    auto it = fit->second.find(name);
    if (it != fit->second.end()) return it->second;
  }
  return name;
}

bool ModuleIndex::is_derived_address(const std::string& fn, const std::string& name) const {
  auto fit = derived_.find(fn);
  return fit != derived_.end() && fit->second.count(name) > 0;
}

bool ModuleIndex::is_pointer_value(const std::string& fn, const std::string& name) const {
  if (!name.empty() && name[0] == '@') return true;
  auto fit = pointers_.find(fn);
  return fit != pointers_.end() && fit->second.count(name) > 0;
}

bool ModuleIndex::defines_register(const std::string& fn, const std::string& name) const {
  auto fit = registers_.find(fn);
  return fit != registers_.end() && fit->second.count(name) > 0;
}

namespace {

// Memory-object roots (allocas, pointer formals, globals) carry the cell's
// slice, not address arithmetic, so they do not count as data operands of
// gep/cast chains.
bool is_cell_root(const ModuleIndex& idx, const std::string& fn, const std::string& name) {
  return idx.root(fn, name) == name && idx.is_pointer_value(fn, name) &&
         !idx.is_derived_address(fn, name);
}

void add_operand_ref(const ModuleIndex& idx, const std::string& fn, const Value& v,
                     std::set<std::string>& out) {
  if (!v.is_name()) return;
  out.insert(v.text);
}

void add_memory_ref(const ModuleIndex& idx, const std::string& fn, const Value& v,
                    std::set<std::string>& out) {
  if (!v.is_name()) return;
  out.insert(idx.root(fn, v.text));
  if (idx.is_derived_address(fn, v.text)) out.insert(v.text);
}

} // namespace

std::set<std::string> ref_set(const ModuleIndex& idx, const Instruction& instr) {
  const std::string& fn = idx.function_of(instr.id).name;
  std::set<std::string> out;
  switch (instr.op) {
    case Opcode::Alloca:
    case Opcode::BrUncond:
    case Opcode::Unreachable:
      break;
    case Opcode::Load:
      if (!instr.operands.empty()) add_memory_ref(idx, fn, instr.operands[0], out);
      break;
    case Opcode::Store:
      if (!instr.operands.empty()) add_operand_ref(idx, fn, instr.operands[0], out);
      // The destination pointer is the DEF target; only derived address
      // arithmetic contributes a read.
      if (instr.operands.size() > 1 && instr.operands[1].is_name() &&
          idx.is_derived_address(fn, instr.operands[1].text))
        out.insert(instr.operands[1].text);
      break;
    case Opcode::BinOp:
    case Opcode::ICmp:
    case Opcode::Select:
      for (const auto& v : instr.operands) add_operand_ref(idx, fn, v, out);
      break;
    case Opcode::Phi:
      for (const auto& in : instr.incomings) add_operand_ref(idx, fn, in.value, out);
      break;
    case Opcode::BrCond:
    case Opcode::Switch:
      if (!instr.operands.empty()) add_operand_ref(idx, fn, instr.operands[0], out);
      break;
    case Opcode::Ret:
      if (!instr.operands.empty()) add_operand_ref(idx, fn, instr.operands[0], out);
      break;
    case Opcode::Call:
      for (const auto& v : instr.operands) add_memory_ref(idx, fn, v, out);
      break;
    case Opcode::GetElementPtr: {
      for (std::size_t i = 1; i < instr.operands.size(); ++i)
        add_operand_ref(idx, fn, instr.operands[i], out);
      if (!instr.operands.empty() && instr.operands[0].is_name() &&
          !is_cell_root(idx, fn, instr.operands[0].text))
        out.insert(instr.operands[0].text);
      break;
    }
    case Opcode::Cast:
      if (!instr.operands.empty() && instr.operands[0].is_name() &&
          !is_cell_root(idx, fn, instr.operands[0].text))
        out.insert(instr.operands[0].text);
      break;
  }
  return out;
}

std::set<std::string> def_set(const ModuleIndex& idx, const Instruction& instr) {
  const std::string& fn = idx.function_of(instr.id).name;
  std::set<std::string> out;
  if (!instr.result.empty()) out.insert(instr.result);
  switch (instr.op) {
    case Opcode::Store:
      if (instr.operands.size() > 1 && instr.operands[1].is_name())
        out.insert(idx.root(fn, instr.operands[1].text));
      break;
    case Opcode::Call:
      for (const auto& v : instr.operands)
        if (v.is_name() && v.is_pointer_type()) out.insert(idx.root(fn, v.text));
      break;
    default:
      break;
  }
  return out;
}

std::map<InstrId, const Instruction*> number_instructions(const Module& m) {
  std::map<InstrId, const Instruction*> out;
  for (const auto& fn : m.functions)
    for (const auto& b : fn.blocks)
      for (const auto& ins : b.instructions) out[ins.id] = &ins;
  return out;
}

namespace {

void validate_function(const Module& m, const Function& fn, std::vector<Diagnostic>& diags) {
  if (fn.blocks.empty()) {
    diags.push_back({0, fn.name + ": function has no blocks"});
    return;
  }
  std::set<std::string> labels;
  for (const auto& b : fn.blocks) {
    if (!labels.insert(b.label).second)
      diags.push_back({0, fn.name + ": duplicate block label " + b.label});
    if (b.instructions.empty()) {
      diags.push_back({0, fn.name + ": block " + b.label + " is empty"});
      continue;
    }
    for (std::size_t i = 0; i < b.instructions.size(); ++i) {
      const auto& ins = b.instructions[i];
      bool last = i + 1 == b.instructions.size();
      if (last && !ins.is_terminator())
        diags.push_back({ins.id, fn.name + ": block " + b.label + " lacks a terminator"});
      if (!last && ins.is_terminator())
        diags.push_back({ins.id, fn.name + ": terminator in the middle of block " + b.label});
    }
  }
  // branch targets
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions)
      for (const auto& l : ins.labels)
        if (!labels.count(l))
          diags.push_back({ins.id, fn.name + ": branch to unknown label " + l});

  // SSA: every register defined exactly once; formals are not redefinable
  std::set<std::string> defined(fn.formals.begin(), fn.formals.end());
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions)
      if (!ins.result.empty() && !defined.insert(ins.result).second)
        diags.push_back({ins.id, fn.name + ": multiple definitions of " + ins.result});

  // every referenced local name must be defined somewhere in the function
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions) {
      auto check = [&](const Value& v) {
        if (!v.is_name()) return;
        if (v.text[0] == '@') {
          if (!m.has_global(v.text) && !m.function(v.text) && !m.external(v.text))
            diags.push_back({ins.id, fn.name + ": unknown global " + v.text});
          return;
        }
        if (!defined.count(v.text))
          diags.push_back({ins.id, fn.name + ": use of undefined value " + v.text});
      };
      for (const auto& v : ins.operands) check(v);
      for (const auto& in : ins.incomings) check(in.value);
    }

  // phi incoming pairs match CFG predecessors
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& b : fn.blocks) {
    const auto& term = b.instructions.back();
    for (const auto& l : term.labels) preds[l].insert(b.label);
  }
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions) {
      if (ins.op != Opcode::Phi) continue;
      const auto& p = preds[b.label];
      std::set<std::string> in_labels;
      for (const auto& in : ins.incomings) in_labels.insert(in.pred_label);
      if (in_labels != p)
        diags.push_back({ins.id, fn.name + ": phi incoming labels do not match predecessors of " +
                                      b.label});
    }

  // calls resolve and match arity
  for (const auto& b : fn.blocks)
    for (const auto& ins : b.instructions) {
      if (ins.op != Opcode::Call) continue;
      if (const Function* callee = m.function(ins.callee)) {
        if (ins.operands.size() < callee->formals.size())
          diags.push_back({ins.id, fn.name + ": call to " + ins.callee + " with too few arguments"});
      } else if (const ExternalDecl* ext = m.external(ins.callee)) {
        if (!ext->variadic && !ins.ellipsis_args && ins.operands.size() != ext->param_types.size())
          diags.push_back({ins.id, fn.name + ": call to " + ins.callee + " arity mismatch"});
      } else {
        diags.push_back({ins.id, fn.name + ": call to unknown procedure " + ins.callee});
      }
    }
}

} // namespace

std::vector<Diagnostic> validate_module(const Module& m) {
  std::vector<Diagnostic> diags;
  if (m.functions.empty()) diags.push_back({0, "module has no functions"});
  std::set<std::string> names;
  for (const auto& g : m.globals)
    if (!names.insert(g.name).second) diags.push_back({0, "duplicate global " + g.name});
  for (const auto& f : m.functions)
    if (!names.insert(f.name).second) diags.push_back({0, "duplicate function " + f.name});
  for (const auto& e : m.externals)
    if (!names.insert(e.name).second) diags.push_back({0, "duplicate declaration " + e.name});
  for (const auto& f : m.functions) validate_function(m, f, diags);
  return diags;
}

} // namespace symslice
