#include "symslice/effects.hpp"

#include <nlohmann/json.hpp>

namespace symslice {

namespace {

ExternalEffect scanf_like(std::string name) {
  ExternalEffect e;
  e.function = std::move(name);
  e.writes_pointer_args = true;
  return e;
}

ExternalEffect printf_like(std::string name) {
  ExternalEffect e;
  e.function = std::move(name);
  e.reads_all = true;
  return e;
}

ExternalEffect memcpy_like(std::string name, bool reads_third = false) {
  ExternalEffect e;
  e.function = std::move(name);
  e.write_args = {0};
  e.read_args = {1};
  if (reads_third) e.read_args.insert(2);
  return e;
}

} // namespace

EffectsTable EffectsTable::defaults() {
  EffectsTable t;
  t.set(scanf_like("@scanf"));
  t.set(scanf_like("@fscanf"));
  t.set(scanf_like("@sscanf"));
  t.set(printf_like("@printf"));
  t.set(printf_like("@fprintf"));
  t.set(printf_like("@puts"));
  t.set(printf_like("@putchar"));
  t.set(memcpy_like("@memcpy"));
  t.set(memcpy_like("@llvm.memcpy"));
  t.set(memcpy_like("@memmove"));
  t.set(memcpy_like("@llvm.memmove"));
  t.set(memcpy_like("@memset"));
  t.set(memcpy_like("@strcpy"));
  return t;
}

EffectsTable EffectsTable::from_json(const std::string& json_text, std::string* error) {
  EffectsTable t = defaults();
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) {
    if (error) *error = "malformed effects config";
    return t;
  }
  if (!j.contains("functions")) return t;
  for (auto& [name, spec] : j.at("functions").items()) {
    ExternalEffect e;
    e.function = name.size() && name[0] == '@' ? name : "@" + name;
    if (spec.contains("reads")) {
      if (spec["reads"].is_string() && spec["reads"] == "all")
        e.reads_all = true;
      else if (spec["reads"].is_array())
        for (auto& v : spec["reads"]) e.read_args.insert(v.get<int>());
    }
    if (spec.contains("writes")) {
      if (spec["writes"].is_string() && spec["writes"] == "pointers")
        e.writes_pointer_args = true;
      else if (spec["writes"].is_array())
        for (auto& v : spec["writes"]) e.write_args.insert(v.get<int>());
    }
    t.set(std::move(e));
  }
  return t;
}

const ExternalEffect* EffectsTable::lookup(const std::string& fn) const {
  auto it = table_.find(fn);
  return it == table_.end() ? nullptr : &it->second;
}

ExternalEffect EffectsTable::effect_for(const std::string& fn) const {
  if (const ExternalEffect* e = lookup(fn)) return *e;
  ExternalEffect e;
  e.function = fn;
  e.reads_all = true;
  return e;
}

} // namespace symslice
