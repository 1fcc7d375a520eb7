// Mini-IR program representation: modules, functions, blocks, instructions,
// REF/DEF extraction and structural validation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace symslice {

using InstrId = std::uint32_t; // 1-based, dense over the module in textual order

struct SourceSpan {
  int line = 0;
  int column = 0;
};

enum class Opcode {
  Alloca,
  Load,
  Store,
  BinOp,
  ICmp,
  Phi,
  Select,
  BrCond,
  BrUncond,
  Switch,
  Call,
  Ret,
  GetElementPtr,
  Cast,
  Unreachable,
};

struct Value {
  enum Kind { Constant, Name } kind = Constant;
  std::string text; // literal text for constants, name (with % or @ sigil) otherwise
  std::string type; // type annotation as written; may be empty

  bool is_name() const { return kind == Name; }
  bool is_pointer_type() const { return !type.empty() && type.back() == '*'; }
  static Value name(std::string n, std::string ty = "") { return Value{Name, std::move(n), std::move(ty)}; }
  static Value constant(std::string c, std::string ty = "") { return Value{Constant, std::move(c), std::move(ty)}; }
};

struct PhiIncoming {
  Value value;
  std::string pred_label;
};

struct SwitchCase {
  std::string value; // constant text
  std::string label;
};

struct Instruction {
  InstrId id = 0;
  Opcode op = Opcode::Unreachable;
  std::string result;  // defined register, empty if none
  std::string type;    // result/operation type as written
  std::string detail;  // binop kind, icmp predicate, cast kind
  std::vector<Value> operands;
  std::vector<PhiIncoming> incomings; // phi only
  std::vector<SwitchCase> cases;      // switch only
  std::vector<std::string> labels;    // branch targets; switch default first
  std::string callee;                 // call only
  bool ellipsis_args = false;         // call written with elided "..." arguments
  SourceSpan span;

  bool is_terminator() const {
    return op == Opcode::BrCond || op == Opcode::BrUncond || op == Opcode::Switch ||
           op == Opcode::Ret || op == Opcode::Unreachable;
  }
  bool is_multi_valued() const { return op == Opcode::Phi || op == Opcode::Select; }
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instructions;
};

struct Function {
  std::string name; // '@'-prefixed
  std::string ret_type;
  std::vector<std::string> formals;      // '%'-prefixed, in order
  std::vector<std::string> formal_types; // parallel to formals
  std::vector<BasicBlock> blocks;

  bool is_void() const { return ret_type == "void"; }
  const BasicBlock* block(const std::string& label) const;
  bool formal_is_pointer(std::size_t i) const {
    return i < formal_types.size() && !formal_types[i].empty() && formal_types[i].back() == '*';
  }
};

struct GlobalDef {
  std::string name; // '@'-prefixed
  std::string type;
  std::string init;
};

struct ExternalDecl {
  std::string name; // '@'-prefixed
  std::vector<std::string> param_types;
  std::string ret_type;
  bool variadic = false;
};

struct Module {
  std::string name;
  std::vector<GlobalDef> globals;
  std::vector<ExternalDecl> externals;
  std::vector<Function> functions;

  const Function* function(const std::string& name) const;
  const ExternalDecl* external(const std::string& name) const;
  bool has_global(const std::string& name) const;
};

struct Diagnostic {
  InstrId instr = 0; // 0 when not tied to an instruction
  std::string message;
};

// Declared read/write behaviour of an external procedure.
struct ExternalEffect {
  std::string function;
  std::set<int> read_args;
  std::set<int> write_args;
  bool reads_all = false;          // printf-like
  bool writes_pointer_args = false; // scanf-like: every pointer argument is written
};

// Precomputed per-module lookup structures shared by all analyses.
class ModuleIndex {
public:
  explicit ModuleIndex(const Module& m);

  const Module& module() const { return *mod_; }
  std::size_t instr_count() const { return by_id_.size(); }
  const Instruction& instr(InstrId id) const { return *by_id_.at(id - 1); }
  const Function& function_of(InstrId id) const { return *fn_of_.at(id - 1); }
  const std::string& block_of(InstrId id) const { return block_of_.at(id - 1); }

  // Alias model: getelementptr/pointer-cast results name the same memory
  // object as their base; everything else is its own root.
  const std::string& root(const std::string& fn, const std::string& name) const;
  // True for gep/cast result registers, whose value is derived address
  // arithmetic rather than a memory object of its own.
  bool is_derived_address(const std::string& fn, const std::string& name) const;
  bool is_pointer_value(const std::string& fn, const std::string& name) const;
  bool defines_register(const std::string& fn, const std::string& name) const;

private:
  const Module* mod_;
  std::vector<const Instruction*> by_id_;
  std::vector<const Function*> fn_of_;
  std::vector<std::string> block_of_;
  std::map<std::string, std::map<std::string, std::string>> roots_;
  std::map<std::string, std::set<std::string>> derived_;
  std::map<std::string, std::set<std::string>> pointers_;
  std::map<std::string, std::set<std::string>> registers_;
};

// REF(i): non-constant value names read by i, under the alias model.
// Call instructions contribute every non-constant argument.
std::set<std::string> ref_set(const ModuleIndex& idx, const Instruction& instr);

// DEF(i): value names defined or modified by i. For calls these are the
// syntactic candidates (result register plus pointer-typed argument roots);
// the slicer refines them through callee summaries or external effects.
std::set<std::string> def_set(const ModuleIndex& idx, const Instruction& instr);

// Dense 1..n numbering in textual order.
std::map<InstrId, const Instruction*> number_instructions(const Module& m);

// Structural validation; empty result means the module is analysable.
std::vector<Diagnostic> validate_module(const Module& m);

} // namespace symslice
