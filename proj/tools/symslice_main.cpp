// symslice command-line front end. Talks to the core exclusively through the
// C API in symslice.h.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symslice.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitUsage = 2;

struct Text {
  char* p = nullptr;
  ~Text() { symslice_text_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Ids {
  uint32_t* p = nullptr;
  size_t n = 0;
  ~Ids() { symslice_ids_free(p); }
  std::vector<uint32_t> vec() const { return {p, p + n}; }
};

struct ModuleHandle {
  symslice_module* m = nullptr;
  ~ModuleHandle() { symslice_module_free(m); }
};

struct AnalysisHandle {
  symslice_analysis* a = nullptr;
  ~AnalysisHandle() { symslice_analysis_free(a); }
};

char err_buf[4096];

int load(const std::string& path, ModuleHandle& mod) {
  symslice_status st = symslice_load_file(path.c_str(), &mod.m, err_buf, sizeof err_buf);
  if (st != SYMSLICE_OK) {
    std::cerr << "error: " << err_buf;
    if (err_buf[0] && err_buf[std::strlen(err_buf) - 1] != '\n') std::cerr << '\n';
    return st == SYMSLICE_ERR_PARSE ? kExitAnalysis : kExitUsage;
  }
  Text diags;
  symslice_validate(mod.m, &diags.p);
  if (!diags.str().empty()) {
    std::cerr << "validation failed:\n" << diags.str();
    return kExitAnalysis;
  }
  return kExitOk;
}

std::string read_effects(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    const char* env = std::getenv("SYMSLICE_EFFECTS");
    if (env) path = env;
  }
  if (path.empty()) return "";
  std::ifstream in(path);
  if (!in) {
    std::cerr << "warning: cannot open effects config " << path << "\n";
    return "";
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// "func:var", "@func %var" or plain "var"
bool split_criterion(const std::string& crit, std::string& func, std::string& var) {
  auto colon = crit.find(':');
  if (colon != std::string::npos) {
    func = crit.substr(0, colon);
    var = crit.substr(colon + 1);
  } else {
    auto space = crit.find(' ');
    if (space != std::string::npos) {
      func = crit.substr(0, space);
      var = crit.substr(space + 1);
    } else {
      func = "";
      var = crit;
    }
  }
  if (!func.empty() && func[0] != '@') func = "@" + func;
  return !var.empty();
}

std::vector<std::pair<std::string, std::string>> parse_criteria_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string fn, var;
  while (in >> fn >> var) out.emplace_back(fn, var);
  return out;
}

void print_ids(std::ostream& os, const std::vector<uint32_t>& ids, const std::string& format) {
  if (format == "json") {
    os << "[";
    for (size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
    os << "]\n";
    return;
  }
  if (format == "csv") {
    for (size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
    os << "\n";
    return;
  }
  for (size_t i = 0; i < ids.size(); ++i) os << (i ? " " : "") << ids[i];
  os << "\n";
}

std::ostream& out_stream(const std::string& out_path, std::ofstream& file) {
  if (out_path.empty()) return std::cout;
  file.open(out_path);
  return file;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"symslice: symbolic program slicer for .sir modules"};
  app.require_subcommand(1);

  std::string input, criterion, direction = "backward", mode = "fast", oracle = "sdg";
  std::string format = "text", out_path, effects_path, graph = "callgraph";
  std::uint64_t seed = 1;
  int max_procs = 6, max_instrs = 200;
  bool annotate = false, keep = false, no_recursion = false, loop_heavy = false;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", input, "input .sir file")->required();
    cmd->add_option("--effects", effects_path, "external-effects config (JSON)");
    cmd->add_option("--out", out_path, "write output to a file");
    cmd->add_option("--format", format, "output format: text, csv, json, dot");
  };

  CLI::App* slice = app.add_subcommand("slice", "compute a slice for one criterion");
  add_input(slice);
  slice->add_option("--criterion", criterion, "criterion func:var")->required();
  slice->add_option("--direction", direction, "backward or forward");
  slice->add_option("--mode", mode, "fast or full");
  slice->add_flag("--annotate", annotate, "print the annotated module");
  slice->add_flag("--keep", keep, "annotated output keeps only slice lines");

  CLI::App* idt = app.add_subcommand("idt", "dump the instruction dependency table (CSV)");
  add_input(idt);

  CLI::App* summaries = app.add_subcommand("summaries", "dump procedure symbolic slices");
  add_input(summaries);

  CLI::App* compare = app.add_subcommand("compare", "differential run against a reference slicer");
  add_input(compare);
  compare->add_option("--oracle", oracle, "sdg or weiser");
  compare->add_option("--criterion", criterion, "restrict to one criterion");

  CLI::App* stats = app.add_subcommand("stats", "slice-size statistics over auto criteria");
  add_input(stats);

  CLI::App* gen = app.add_subcommand("gen", "generate a random valid module");
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--max-procs", max_procs, "procedure budget");
  gen->add_option("--max-instrs", max_instrs, "instruction budget");
  gen->add_flag("--no-recursion", no_recursion, "disable recursive call plans");
  gen->add_flag("--loop-heavy", loop_heavy, "loop-chain stress shape");
  gen->add_option("--out", out_path, "write output to a file");

  CLI::App* dot = app.add_subcommand("dot", "export a graph in DOT form");
  add_input(dot);
  dot->add_option("--graph", graph, "cfg:@fn, pdg:@fn, callgraph, sdg");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a module");
  add_input(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream out_file;

  if (gen->parsed()) {
    Text text;
    symslice_generate(seed, max_procs, max_instrs, no_recursion ? 0 : 1, loop_heavy ? 1 : 0,
                      &text.p);
    out_stream(out_path, out_file) << text.str();
    return kExitOk;
  }

  ModuleHandle mod;
  if (int rc = load(input, mod); rc != kExitOk) return validate->parsed() ? rc : rc;
  if (validate->parsed()) {
    std::cout << "ok\n";
    return kExitOk;
  }

  std::string effects = read_effects(effects_path);

  if (slice->parsed()) {
    std::string func, var;
    if (!split_criterion(criterion, func, var)) {
      std::cerr << "error: malformed criterion\n";
      return kExitUsage;
    }
    bool forward = direction == "forward";
    symslice_mode m = (forward || mode == "full") ? SYMSLICE_MODE_FULL_IDT : SYMSLICE_MODE_FAST;
    AnalysisHandle a;
    if (symslice_analyze(mod.m, m, effects.empty() ? nullptr : effects.c_str(), &a.a, err_buf,
                         sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    if (func.empty()) {
      // default: the function defining var, when unique
      Text crit_text;
      symslice_criteria(mod.m, &crit_text.p);
      std::string found;
      for (auto& [f, v] : parse_criteria_text(crit_text.str()))
        if (v == var) {
          if (!found.empty() && found != f) {
            std::cerr << "error: " << var << " is ambiguous, name the function\n";
            return kExitUsage;
          }
          found = f;
        }
      if (found.empty()) {
        std::cerr << "error: no function defines " << var << "\n";
        return kExitUsage;
      }
      func = found;
    }
    Ids ids;
    symslice_status st =
        forward ? symslice_forward_slice(a.a, func.c_str(), var.c_str(), &ids.p, &ids.n, err_buf,
                                         sizeof err_buf)
                : symslice_backward_slice(a.a, func.c_str(), var.c_str(), &ids.p, &ids.n, err_buf,
                                          sizeof err_buf);
    if (st != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    auto& os = out_stream(out_path, out_file);
    print_ids(os, ids.vec(), format);
    if (annotate) {
      Text listing;
      symslice_render(mod.m, ids.p, ids.n, keep ? 1 : 0, &listing.p);
      os << listing.str();
    }
    return kExitOk;
  }

  if (idt->parsed()) {
    AnalysisHandle a;
    if (symslice_analyze(mod.m, SYMSLICE_MODE_FULL_IDT, effects.empty() ? nullptr : effects.c_str(),
                         &a.a, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    Text csv;
    if (symslice_idt_csv(a.a, &csv.p, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    out_stream(out_path, out_file) << csv.str();
    return kExitOk;
  }

  if (summaries->parsed()) {
    AnalysisHandle a;
    if (symslice_analyze(mod.m, SYMSLICE_MODE_FULL_IDT, effects.empty() ? nullptr : effects.c_str(),
                         &a.a, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    Text text;
    symslice_summaries(a.a, &text.p);
    out_stream(out_path, out_file) << text.str();
    return kExitOk;
  }

  if (compare->parsed()) {
    AnalysisHandle a;
    if (symslice_analyze(mod.m, SYMSLICE_MODE_FAST, effects.empty() ? nullptr : effects.c_str(),
                         &a.a, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    std::vector<std::pair<std::string, std::string>> criteria;
    if (!criterion.empty()) {
      std::string func, var;
      if (!split_criterion(criterion, func, var) || func.empty()) {
        std::cerr << "error: compare --criterion requires func:var\n";
        return kExitUsage;
      }
      criteria.emplace_back(func, var);
    } else {
      Text crit_text;
      symslice_criteria(mod.m, &crit_text.p);
      criteria = parse_criteria_text(crit_text.str());
    }
    symslice_oracle kind = oracle == "weiser" ? SYMSLICE_ORACLE_WEISER : SYMSLICE_ORACLE_SDG;
    auto& os = out_stream(out_path, out_file);
    bool all_equal = true;
    for (const auto& [func, var] : criteria) {
      Ids mine, theirs;
      if (symslice_backward_slice(a.a, func.c_str(), var.c_str(), &mine.p, &mine.n, err_buf,
                                  sizeof err_buf) != SYMSLICE_OK ||
          symslice_oracle_slice(mod.m, kind, func.c_str(), var.c_str(), &theirs.p, &theirs.n,
                                err_buf, sizeof err_buf) != SYMSLICE_OK) {
        std::cerr << "error: " << err_buf << "\n";
        return kExitAnalysis;
      }
      std::set<uint32_t> sym(mine.p, mine.p + mine.n), orc(theirs.p, theirs.p + theirs.n);
      std::string verdict;
      if (sym == orc) {
        verdict = "equal";
      } else if (std::includes(orc.begin(), orc.end(), sym.begin(), sym.end())) {
        verdict = "oracle-superset";
        all_equal = false;
      } else {
        verdict = "diff";
        all_equal = false;
      }
      os << func << " " << var << ": " << verdict << " (symslice " << sym.size() << ", "
         << (kind == SYMSLICE_ORACLE_SDG ? "sdg" : "weiser") << " " << orc.size() << ")\n";
      if (verdict == "diff" || (kind == SYMSLICE_ORACLE_SDG && verdict != "equal")) {
        os << "  symslice:";
        for (auto v : sym) os << " " << v;
        os << "\n  oracle:";
        for (auto v : orc) os << " " << v;
        os << "\n";
      }
    }
    if (kind == SYMSLICE_ORACLE_SDG) return all_equal ? kExitOk : kExitAnalysis;
    return kExitOk;
  }

  if (stats->parsed()) {
    AnalysisHandle a;
    if (symslice_analyze(mod.m, SYMSLICE_MODE_FAST, effects.empty() ? nullptr : effects.c_str(),
                         &a.a, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitAnalysis;
    }
    Text crit_text;
    symslice_criteria(mod.m, &crit_text.p);
    auto criteria = parse_criteria_text(crit_text.str());
    size_t n = symslice_instr_count(mod.m);
    auto& os = out_stream(out_path, out_file);
    std::vector<double> fractions;
    char buf[160];
    os << "instructions: " << n << "\n";
    for (const auto& [func, var] : criteria) {
      Ids ids;
      if (symslice_backward_slice(a.a, func.c_str(), var.c_str(), &ids.p, &ids.n, err_buf,
                                  sizeof err_buf) != SYMSLICE_OK) {
        std::cerr << "error: " << err_buf << "\n";
        return kExitAnalysis;
      }
      double frac = n ? static_cast<double>(ids.n) / static_cast<double>(n) : 0.0;
      fractions.push_back(frac);
      std::snprintf(buf, sizeof buf, "%s %s: %zu (%.4f%%)", func.c_str(), var.c_str(), ids.n,
                    frac * 100.0);
      os << buf << "\n";
    }
    double sum = 0;
    for (double f : fractions) sum += f;
    double mean = fractions.empty() ? 0.0 : sum / static_cast<double>(fractions.size());
    std::snprintf(buf, sizeof buf, "criteria: %zu\nmean: %.4f%%", fractions.size(), mean * 100.0);
    os << buf << "\n";
    return kExitOk;
  }

  if (dot->parsed()) {
    Text text;
    if (symslice_dot(mod.m, graph.c_str(), &text.p, err_buf, sizeof err_buf) != SYMSLICE_OK) {
      std::cerr << "error: " << err_buf << "\n";
      return kExitUsage;
    }
    out_stream(out_path, out_file) << text.str();
    return kExitOk;
  }

  return kExitUsage;
}
