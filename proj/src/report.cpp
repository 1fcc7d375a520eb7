#include "symslice/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "symslice/parser.hpp"

namespace symslice {

std::string emit_idt(const Analysis& analysis, IdtFormat format) {
  const SliceResult& res = analysis.result();
  if (res.mode != SliceMode::FullIdt)
    throw AnalysisError(AnalysisError::ModeError, "IDT output requires full-IDT mode");
  const Universe& u = *res.universe;
  std::size_t n = u.instr_count();
  std::ostringstream os;
  if (format == IdtFormat::Csv) {
    os << "i";
    for (std::size_t c = 1; c <= n; ++c) os << "," << c;
    os << "\n";
    for (std::size_t r = 1; r <= n; ++r) {
      os << r;
      auto it = res.L_full.find(static_cast<InstrId>(r));
      for (std::size_t c = 1; c <= n; ++c) {
        bool set = it != res.L_full.end() && it->second.contains(u.bit_of(static_cast<InstrId>(c)));
        os << "," << (set ? "1" : "0");
      }
      os << "\n";
    }
  } else {
    for (std::size_t r = 1; r <= n; ++r) {
      auto it = res.L_full.find(static_cast<InstrId>(r));
      os << std::setw(4) << r << " |";
      for (std::size_t c = 1; c <= n; ++c) {
        bool set = it != res.L_full.end() && it->second.contains(u.bit_of(static_cast<InstrId>(c)));
        os << (set ? " 1" : " 0");
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string render_slice(const Module& m, const std::set<InstrId>& slice, RenderStyle style) {
  std::ostringstream os;
  for (const auto& fn : m.functions) {
    bool any = style == RenderStyle::Strike;
    if (!any)
      for (const auto& b : fn.blocks)
        for (const auto& ins : b.instructions)
          if (slice.count(ins.id)) any = true;
    if (!any) continue;
    os << "define " << fn.ret_type << " " << fn.name << "(";
    for (std::size_t i = 0; i < fn.formals.size(); ++i) {
      if (i) os << ", ";
      os << fn.formal_types[i] << " " << fn.formals[i];
    }
    os << ") {\n";
    for (const auto& b : fn.blocks) {
      os << b.label << ":\n";
      for (const auto& ins : b.instructions) {
        bool in_slice = slice.count(ins.id) > 0;
        if (style == RenderStyle::Keep && !in_slice) continue;
        os << "  ";
        if (style == RenderStyle::Strike && !in_slice) os << "-- ";
        os << print_instruction(ins) << "  ; #" << ins.id;
        if (ins.span.line) os << " line " << ins.span.line;
        os << "\n";
      }
    }
    os << "}\n";
  }
  return os.str();
}

StatsReport slice_stats(const Module& m,
                        const std::vector<std::pair<std::string, std::string>>& criteria,
                        const std::vector<std::set<InstrId>>& slices) {
  StatsReport rep;
  std::size_t n = 0;
  for (const auto& fn : m.functions)
    for (const auto& b : fn.blocks) n += b.instructions.size();
  rep.instr_count = n;
  std::vector<double> fractions;
  for (std::size_t i = 0; i < criteria.size() && i < slices.size(); ++i) {
    StatsReport::Row row;
    row.func = criteria[i].first;
    row.var = criteria[i].second;
    row.size = slices[i].size();
    row.fraction = n ? static_cast<double>(row.size) / static_cast<double>(n) : 0.0;
    fractions.push_back(row.fraction);
    rep.rows.push_back(std::move(row));
  }
  if (!fractions.empty()) {
    double sum = 0;
    for (double f : fractions) sum += f;
    rep.mean = sum / static_cast<double>(fractions.size());
    std::vector<double> sorted = fractions;
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    rep.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
    rep.max = sorted.back();
  }
  return rep;
}

std::string StatsReport::text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "instructions: " << instr_count << "\n";
  for (const auto& r : rows)
    os << r.func << " " << r.var << ": " << r.size << " (" << r.fraction * 100.0 << "%)\n";
  os << "criteria: " << rows.size() << "\n";
  os << "mean: " << mean * 100.0 << "%\n";
  os << "median: " << median * 100.0 << "%\n";
  os << "max: " << max * 100.0 << "%\n";
  return os.str();
}

std::string StatsReport::csv() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "func,var,size,fraction\n";
  for (const auto& r : rows)
    os << r.func << "," << r.var << "," << r.size << "," << r.fraction << "\n";
  os << "mean,,," << mean << "\n";
  os << "median,,," << median << "\n";
  os << "max,,," << max << "\n";
  return os.str();
}

std::string summaries_text(const Analysis& analysis) {
  const SliceResult& res = analysis.result();
  const Universe& u = *res.universe;
  std::ostringstream os;

  // negative interned ids for symbolic parameters, with a legend
  std::map<ValueKey, int> interned;
  for (std::size_t i = 0; i < u.symbols().size(); ++i)
    interned[u.symbols()[i]] = -100 - static_cast<int>(i);

  auto set_str = [&](const SliceSet& s) {
    std::ostringstream ss;
    ss << "{";
    bool first = true;
    s.for_each([&](std::size_t bit) {
      if (!first) ss << ",";
      first = false;
      if (bit < u.instr_count())
        ss << (bit + 1);
      else
        ss << interned.at(u.symbols()[bit - u.instr_count()]);
    });
    ss << "}";
    return ss.str();
  };

  for (const auto& fn : analysis.module().functions) {
    auto sit = res.summaries.find(fn.name);
    if (sit == res.summaries.end()) continue;
    const ProcSummary& sum = sit->second;
    os << "procedure " << fn.name << "\n";
    for (const auto& [key, val] : sum.table) {
      if (key.func != fn.name) continue;
      os << "  T(" << key.name << ") = " << set_str(val) << "\n";
    }
    auto outs = out_params(u, sum);
    auto ins = in_params(u, sum);
    auto join = [](const std::set<std::string>& s) {
      std::string t = "{";
      bool first = true;
      for (const auto& x : s) {
        if (!first) t += ",";
        first = false;
        t += x;
      }
      return t + "}";
    };
    os << "  OUT = " << join(outs) << "\n";
    os << "  IN = " << join(ins) << "\n";
    for (const auto& p : sum.frame_params)
      os << "  SUMM(" << p << ") = " << join(summ(u, sum, p)) << "\n";
    auto [gmod, gref] = gmod_gref(u, sum);
    os << "  GMOD = " << join(gmod) << "\n";
    os << "  GREF = " << join(gref) << "\n";
  }
  os << "legend:\n";
  for (const auto& [key, id] : interned)
    os << "  " << id << " = " << sym_name(key) << " (" << key.func << ")\n";
  return os.str();
}

std::string export_dot(const Cfg& cfg) {
  std::ostringstream os;
  os << "digraph cfg {\n";
  os << "  label=\"" << cfg.function << "\";\n";
  os << "  exit [shape=doublecircle];\n";
  for (InstrId n : cfg.nodes) os << "  n" << n << " [label=\"" << n << "\"];\n";
  for (const auto& [from, tos] : cfg.succs)
    for (InstrId to : tos) {
      if (to == Cfg::kVirtualExit)
        os << "  n" << from << " -> exit;\n";
      else
        os << "  n" << from << " -> n" << to << ";\n";
    }
  os << "}\n";
  return os.str();
}

std::string export_dot(const CallGraph& cg) {
  std::ostringstream os;
  os << "digraph callgraph {\n";
  for (const auto& n : cg.nodes) os << "  \"" << n << "\";\n";
  for (const auto& e : cg.externals) os << "  \"" << e << "\" [shape=box,style=dashed];\n";
  for (const auto& e : cg.edges)
    os << "  \"" << e.caller << "\" -> \"" << e.callee << "\" [label=\"" << e.site << "\"];\n";
  for (const auto& e : cg.external_edges)
    os << "  \"" << e.caller << "\" -> \"" << e.callee << "\" [label=\"" << e.site
       << "\",style=dashed];\n";
  os << "}\n";
  return os.str();
}

namespace {

const char* vertex_label(SdgVertexKind k) {
  switch (k) {
    case SdgVertexKind::Instr: return "";
    case SdgVertexKind::Entry: return "entry";
    case SdgVertexKind::FormalIn: return "f_in";
    case SdgVertexKind::FormalOut: return "f_out";
    case SdgVertexKind::ActualIn: return "a_in";
    case SdgVertexKind::ActualOut: return "a_out";
  }
  return "";
}

const char* edge_style(SdgEdgeKind k) {
  switch (k) {
    case SdgEdgeKind::Control: return "";
    case SdgEdgeKind::Flow: return " [color=blue]";
    case SdgEdgeKind::Call: return " [style=dashed]";
    case SdgEdgeKind::ParamIn: return " [style=dashed,color=gray]";
    case SdgEdgeKind::ParamOut: return " [style=dotted]";
    case SdgEdgeKind::Summary: return " [style=bold,color=red]";
  }
  return "";
}

template <typename Graph>
std::string dot_of_graph(const Graph& g, const char* name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t i = 0; i < g.verts.size(); ++i) {
    const SdgVertex& v = g.verts[i];
    os << "  v" << i << " [label=\"";
    if (v.kind == SdgVertexKind::Instr)
      os << v.instr;
    else
      os << vertex_label(v.kind) << " " << v.func << (v.var.empty() ? "" : " ") << v.var;
    os << "\"];\n";
  }
  for (std::size_t to = 0; to < g.in_edges.size(); ++to)
    for (const auto& [from, kind] : g.in_edges[to])
      os << "  v" << from << " -> v" << to << edge_style(kind) << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace

std::string export_dot(const Pdg& pdg) { return dot_of_graph(pdg, "pdg"); }
std::string export_dot(const Sdg& sdg) { return dot_of_graph(sdg, "sdg"); }

} // namespace symslice
