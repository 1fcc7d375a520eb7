#include <doctest.h>

#include <cstring>
#include <set>
#include <string>

#include "symslice.h"
#include "test_support.hpp"

namespace {

struct CModule {
  symslice_module* m = nullptr;
  ~CModule() { symslice_module_free(m); }
};

struct CAnalysis {
  symslice_analysis* a = nullptr;
  ~CAnalysis() { symslice_analysis_free(a); }
};

} // namespace

TEST_CASE("C API end to end on fig8") {
  std::string text = read_file(fixture_path("fig8.sir"));
  char err[512] = {0};
  CModule mod;
  REQUIRE(symslice_parse(text.c_str(), &mod.m, err, sizeof err) == SYMSLICE_OK);
  CHECK(symslice_instr_count(mod.m) == 32);

  char* diags = nullptr;
  REQUIRE(symslice_validate(mod.m, &diags) == SYMSLICE_OK);
  CHECK(std::strlen(diags) == 0);
  symslice_text_free(diags);

  CAnalysis a;
  REQUIRE(symslice_analyze(mod.m, SYMSLICE_MODE_FULL_IDT, nullptr, &a.a, err, sizeof err) ==
          SYMSLICE_OK);

  uint32_t* ids = nullptr;
  size_t n = 0;
  REQUIRE(symslice_backward_slice(a.a, "@main", "%n", &ids, &n, err, sizeof err) == SYMSLICE_OK);
  REQUIRE(n == 1);
  CHECK(ids[0] == 5);
  symslice_ids_free(ids);

  REQUIRE(symslice_backward_slice(a.a, "@inc", "%z", &ids, &n, err, sizeof err) == SYMSLICE_OK);
  std::set<uint32_t> z(ids, ids + n);
  CHECK(!z.count(6));
  CHECK(!z.count(21));
  symslice_ids_free(ids);

  // oracle agreement through the C surface
  uint32_t* oracle_ids = nullptr;
  size_t on = 0;
  REQUIRE(symslice_oracle_slice(mod.m, SYMSLICE_ORACLE_SDG, "@inc", "%z", &oracle_ids, &on, err,
                                sizeof err) == SYMSLICE_OK);
  std::set<uint32_t> oz(oracle_ids, oracle_ids + on);
  CHECK(oz == z);
  symslice_ids_free(oracle_ids);

  REQUIRE(symslice_forward_slice(a.a, "@main", "%n", &ids, &n, err, sizeof err) == SYMSLICE_OK);
  CHECK(n == 25);
  symslice_ids_free(ids);

  char* csv = nullptr;
  REQUIRE(symslice_idt_csv(a.a, &csv, err, sizeof err) == SYMSLICE_OK);
  CHECK(std::string(csv).rfind("i,1,2,", 0) == 0);
  symslice_text_free(csv);

  char* crit = nullptr;
  REQUIRE(symslice_criteria(mod.m, &crit) == SYMSLICE_OK);
  std::string crit_text = crit;
  symslice_text_free(crit);
  CHECK(crit_text.find("@main %n") != std::string::npos);
  CHECK(crit_text.find("@inc %tmp") != std::string::npos);
}

TEST_CASE("C API error paths") {
  char err[256] = {0};
  symslice_module* m = nullptr;
  CHECK(symslice_parse("nonsense", &m, err, sizeof err) == SYMSLICE_ERR_PARSE);
  CHECK(std::strlen(err) > 0);

  std::string text = read_file(fixture_path("fig8.sir"));
  CModule mod;
  REQUIRE(symslice_parse(text.c_str(), &mod.m, err, sizeof err) == SYMSLICE_OK);
  CAnalysis a;
  REQUIRE(symslice_analyze(mod.m, SYMSLICE_MODE_FAST, nullptr, &a.a, err, sizeof err) ==
          SYMSLICE_OK);
  uint32_t* ids = nullptr;
  size_t n = 0;
  CHECK(symslice_backward_slice(a.a, "@main", "%nope", &ids, &n, err, sizeof err) ==
        SYMSLICE_ERR_ANALYSIS);
  // fast mode cannot serve forward slices
  CHECK(symslice_forward_slice(a.a, "@main", "%n", &ids, &n, err, sizeof err) ==
        SYMSLICE_ERR_ANALYSIS);
  char* csv = nullptr;
  CHECK(symslice_idt_csv(a.a, &csv, err, sizeof err) == SYMSLICE_ERR_ANALYSIS);

  CHECK(symslice_load_file("/no/such/file.sir", &m, err, sizeof err) == SYMSLICE_ERR_USAGE);
}

TEST_CASE("C API generation is deterministic and valid") {
  char* t1 = nullptr;
  char* t2 = nullptr;
  REQUIRE(symslice_generate(99, 4, 120, 1, 0, &t1) == SYMSLICE_OK);
  REQUIRE(symslice_generate(99, 4, 120, 1, 0, &t2) == SYMSLICE_OK);
  CHECK(std::string(t1) == std::string(t2));
  char err[256];
  symslice_module* m = nullptr;
  REQUIRE(symslice_parse(t1, &m, err, sizeof err) == SYMSLICE_OK);
  char* diags = nullptr;
  symslice_validate(m, &diags);
  CHECK(std::strlen(diags) == 0);
  symslice_text_free(diags);
  symslice_module_free(m);
  symslice_text_free(t1);
  symslice_text_free(t2);
}
