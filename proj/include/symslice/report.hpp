// Output formats: IDT dumps, annotated slice listings, DOT graphs and
// slice-size statistics.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "symslice/callgraph.hpp"
#include "symslice/cfg.hpp"
#include "symslice/oracle.hpp"
#include "symslice/slicer.hpp"

namespace symslice {

enum class IdtFormat { Csv, Pretty };
enum class RenderStyle { Keep, Strike };

// Boolean dependency matrix; cell(r,c)=1 iff c is in the concretized row of r.
// Requires a full-IDT result.
std::string emit_idt(const Analysis& analysis, IdtFormat format);

// Printed module with non-slice instructions marked (Strike) or omitted
// (Keep); source line numbers appended.
std::string render_slice(const Module& m, const std::set<InstrId>& slice, RenderStyle style);

struct StatsReport {
  struct Row {
    std::string func;
    std::string var;
    std::size_t size = 0;
    double fraction = 0.0;
  };
  std::size_t instr_count = 0;
  std::vector<Row> rows;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;

  std::string text() const;
  std::string csv() const;
};

StatsReport slice_stats(const Module& m,
                        const std::vector<std::pair<std::string, std::string>>& criteria,
                        const std::vector<std::set<InstrId>>& slices);

// per-procedure summary dump: T_P, OUT/IN, SUMM, GMOD/GREF; symbolic
// parameters appear as negative interned ids with a legend
std::string summaries_text(const Analysis& analysis);

std::string export_dot(const Cfg& cfg);
std::string export_dot(const CallGraph& cg);
std::string export_dot(const Pdg& pdg);
std::string export_dot(const Sdg& sdg);

} // namespace symslice
