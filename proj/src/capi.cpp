#include "symslice.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "symslice/generator.hpp"
#include "symslice/oracle.hpp"
#include "symslice/parser.hpp"
#include "symslice/report.hpp"
#include "symslice/slicer.hpp"

using namespace symslice;

struct symslice_module {
  Module mod;
};

struct symslice_analysis {
  Analysis* analysis = nullptr;
  ~symslice_analysis() { delete analysis; }
};

namespace {

void put_error(char* err, size_t err_len, const std::string& msg) {
  if (!err || !err_len) return;
  std::strncpy(err, msg.c_str(), err_len - 1);
  err[err_len - 1] = '\0';
}

char* dup_text(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

symslice_status slice_to_ids(const std::vector<InstrId>& slice, uint32_t** ids, size_t* count) {
  *count = slice.size();
  *ids = static_cast<uint32_t*>(std::malloc(sizeof(uint32_t) * std::max<size_t>(1, slice.size())));
  if (!*ids) return SYMSLICE_ERR_USAGE;
  for (size_t i = 0; i < slice.size(); ++i) (*ids)[i] = slice[i];
  return SYMSLICE_OK;
}

} // namespace

extern "C" {

const char* symslice_version(void) { return "symslice 0.1.0"; }

symslice_status symslice_parse(const char* text, symslice_module** out, char* err,
                               size_t err_len) {
  if (!text || !out) return SYMSLICE_ERR_USAGE;
  ParseResult res = parse_module(text);
  if (!res.ok()) {
    std::ostringstream os;
    for (const auto& e : res.errors)
      os << "line " << e.line << ":" << e.column << ": " << e.message << "\n";
    put_error(err, err_len, os.str());
    return SYMSLICE_ERR_PARSE;
  }
  *out = new symslice_module{std::move(res.module)};
  return SYMSLICE_OK;
}

symslice_status symslice_load_file(const char* path, symslice_module** out, char* err,
                                   size_t err_len) {
  if (!path || !out) return SYMSLICE_ERR_USAGE;
  std::ifstream in(path);
  if (!in) {
    put_error(err, err_len, std::string("cannot open ") + path);
    return SYMSLICE_ERR_USAGE;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return symslice_parse(buf.str().c_str(), out, err, err_len);
}

void symslice_module_free(symslice_module* m) { delete m; }

symslice_status symslice_validate(const symslice_module* m, char** out_text) {
  if (!m || !out_text) return SYMSLICE_ERR_USAGE;
  std::ostringstream os;
  for (const auto& d : validate_module(m->mod)) {
    if (d.instr) os << "#" << d.instr << ": ";
    os << d.message << "\n";
  }
  *out_text = dup_text(os.str());
  return SYMSLICE_OK;
}

symslice_status symslice_print(const symslice_module* m, char** out_text) {
  if (!m || !out_text) return SYMSLICE_ERR_USAGE;
  *out_text = dup_text(print_module(m->mod));
  return SYMSLICE_OK;
}

size_t symslice_instr_count(const symslice_module* m) {
  if (!m) return 0;
  size_t n = 0;
  for (const auto& fn : m->mod.functions)
    for (const auto& b : fn.blocks) n += b.instructions.size();
  return n;
}

symslice_status symslice_analyze(const symslice_module* m, symslice_mode mode,
                                 const char* effects_json, symslice_analysis** out, char* err,
                                 size_t err_len) {
  if (!m || !out) return SYMSLICE_ERR_USAGE;
  try {
    AnalysisOptions opts;
    opts.mode = mode == SYMSLICE_MODE_FAST ? SliceMode::BackwardFast : SliceMode::FullIdt;
    if (effects_json && *effects_json) {
      std::string cfg_err;
      opts.effects = EffectsTable::from_json(effects_json, &cfg_err);
      if (!cfg_err.empty()) {
        put_error(err, err_len, cfg_err);
        return SYMSLICE_ERR_USAGE;
      }
    }
    auto* a = new symslice_analysis;
    a->analysis = new Analysis(m->mod, std::move(opts));
    *out = a;
    return SYMSLICE_OK;
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

void symslice_analysis_free(symslice_analysis* a) { delete a; }

symslice_status symslice_backward_slice(const symslice_analysis* a, const char* func,
                                        const char* var, uint32_t** ids, size_t* count, char* err,
                                        size_t err_len) {
  if (!a || !func || !var || !ids || !count) return SYMSLICE_ERR_USAGE;
  try {
    return slice_to_ids(a->analysis->backward_slice(func, var), ids, count);
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

symslice_status symslice_forward_slice(const symslice_analysis* a, const char* func,
                                       const char* var, uint32_t** ids, size_t* count, char* err,
                                       size_t err_len) {
  if (!a || !func || !var || !ids || !count) return SYMSLICE_ERR_USAGE;
  try {
    return slice_to_ids(a->analysis->forward_slice(func, var), ids, count);
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

void symslice_ids_free(uint32_t* ids) { std::free(ids); }

symslice_status symslice_oracle_slice(const symslice_module* m, symslice_oracle kind,
                                      const char* func, const char* var, uint32_t** ids,
                                      size_t* count, char* err, size_t err_len) {
  if (!m || !func || !var || !ids || !count) return SYMSLICE_ERR_USAGE;
  try {
    ModuleIndex idx(m->mod);
    Sdg sdg = build_sdg(m->mod, idx);
    std::set<InstrId> s = kind == SYMSLICE_ORACLE_SDG ? sdg_backward_slice(sdg, func, var)
                                                      : weiser_slice(sdg, func, var);
    std::vector<InstrId> v(s.begin(), s.end());
    return slice_to_ids(v, ids, count);
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

symslice_status symslice_idt_csv(const symslice_analysis* a, char** out_text, char* err,
                                 size_t err_len) {
  if (!a || !out_text) return SYMSLICE_ERR_USAGE;
  try {
    *out_text = dup_text(emit_idt(*a->analysis, IdtFormat::Csv));
    return SYMSLICE_OK;
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

symslice_status symslice_summaries(const symslice_analysis* a, char** out_text) {
  if (!a || !out_text) return SYMSLICE_ERR_USAGE;
  *out_text = dup_text(summaries_text(*a->analysis));
  return SYMSLICE_OK;
}

symslice_status symslice_render(const symslice_module* m, const uint32_t* ids, size_t count,
                                int keep_style, char** out_text) {
  if (!m || !out_text) return SYMSLICE_ERR_USAGE;
  std::set<InstrId> slice;
  for (size_t i = 0; i < count; ++i) slice.insert(ids[i]);
  *out_text = dup_text(
      render_slice(m->mod, slice, keep_style ? RenderStyle::Keep : RenderStyle::Strike));
  return SYMSLICE_OK;
}

symslice_status symslice_dot(const symslice_module* m, const char* what, char** out_text,
                             char* err, size_t err_len) {
  if (!m || !what || !out_text) return SYMSLICE_ERR_USAGE;
  try {
    std::string w = what;
    ModuleIndex idx(m->mod);
    if (w == "callgraph") {
      *out_text = dup_text(export_dot(build_callgraph(m->mod)));
    } else if (w == "sdg") {
      *out_text = dup_text(export_dot(build_sdg(m->mod, idx)));
    } else if (w.rfind("cfg:", 0) == 0 || w.rfind("pdg:", 0) == 0) {
      std::string fname = w.substr(4);
      const Function* fn = m->mod.function(fname);
      if (!fn) {
        put_error(err, err_len, "unknown function " + fname);
        return SYMSLICE_ERR_USAGE;
      }
      Cfg cfg = build_cfg(idx, *fn);
      if (w.rfind("cfg:", 0) == 0) {
        *out_text = dup_text(export_dot(cfg));
      } else {
        ControlDeps cd = control_deps(cfg, idx);
        *out_text = dup_text(export_dot(build_pdg(idx, *fn, cfg, cd)));
      }
    } else {
      put_error(err, err_len, "unknown graph kind " + w);
      return SYMSLICE_ERR_USAGE;
    }
    return SYMSLICE_OK;
  } catch (const std::exception& e) {
    put_error(err, err_len, e.what());
    return SYMSLICE_ERR_ANALYSIS;
  }
}

void symslice_text_free(char* text) { std::free(text); }

symslice_status symslice_criteria(const symslice_module* m, char** out_text) {
  if (!m || !out_text) return SYMSLICE_ERR_USAGE;
  try {
    AnalysisOptions opts;
    opts.mode = SliceMode::BackwardFast;
    opts.record_instantiations = false;
    Analysis a(m->mod, opts);
    std::ostringstream os;
    for (const auto& [fn, var] : a.auto_criteria()) os << fn << " " << var << "\n";
    *out_text = dup_text(os.str());
    return SYMSLICE_OK;
  } catch (const std::exception&) {
    return SYMSLICE_ERR_ANALYSIS;
  }
}

symslice_status symslice_generate(uint64_t seed, int max_procs, int max_instrs,
                                  int allow_recursion, int loop_heavy, char** out_text) {
  if (!out_text) return SYMSLICE_ERR_USAGE;
  GenOptions opts;
  opts.seed = seed;
  if (max_procs > 0) opts.max_procs = max_procs;
  if (max_instrs > 0) opts.max_instrs = max_instrs;
  opts.allow_recursion = allow_recursion != 0;
  opts.loop_heavy = loop_heavy != 0;
  *out_text = dup_text(generate_module_text(opts));
  return SYMSLICE_OK;
}

} // extern "C"
