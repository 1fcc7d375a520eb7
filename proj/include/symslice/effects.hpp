// Read/write models for external procedures, with built-in defaults and a
// JSON config override.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "symslice/ir.hpp"

namespace symslice {

class EffectsTable {
public:
  // scanf-like, printf-like and memcpy-like defaults are always present.
  static EffectsTable defaults();
  // JSON: {"functions": {"@name": {"reads": [0,1]|"all", "writes": [0]|"pointers"}}}
  static EffectsTable from_json(const std::string& json_text, std::string* error);

  const ExternalEffect* lookup(const std::string& fn) const;
  void set(ExternalEffect e) { table_[e.function] = std::move(e); }

  // Fallback for externals with no entry: read everything, write nothing.
  ExternalEffect effect_for(const std::string& fn) const;

private:
  std::map<std::string, ExternalEffect> table_;
};

} // namespace symslice
