// Text format (".sir"): a simplified LLVM-IR-like syntax.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "symslice/ir.hpp"

namespace symslice {

struct ParseError {
  int line = 0;
  int column = 0;
  std::string message;
};

struct ParseResult {
  Module module;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

ParseResult parse_module(const std::string& text);

// Canonical text: one instruction per line, blocks introduced by "label:",
// deterministic whitespace. parse(print(m)) is structurally equal to m.
std::string print_module(const Module& m);

std::string print_instruction(const Instruction& ins);

} // namespace symslice
