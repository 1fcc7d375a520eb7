// Deterministic random module generator for differential testing.
#pragma once

#include <cstdint>
#include <string>

#include "symslice/ir.hpp"

namespace symslice {

struct GenOptions {
  std::uint64_t seed = 1;
  int max_procs = 6;
  int max_instrs = 200; // soft cap on total instructions
  bool allow_recursion = true;
  bool allow_loops = true;
  bool allow_globals = true;
  bool allow_externals = true;
  bool loop_heavy = false; // chains of while loops, for timing comparisons
};

// Always produces a module that passes validate_module; identical options
// give byte-identical text.
Module generate_module(const GenOptions& opts);
std::string generate_module_text(const GenOptions& opts);

} // namespace symslice
