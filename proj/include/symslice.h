/*
 * symslice C API: symbolic program slicing over the ".sir" mini-IR.
 *
 * All functions return SYMSLICE_OK on success. On failure a short message
 * is written to the caller-provided error buffer when one is given.
 * Objects are opaque; free them with the matching *_free function.
 */
#ifndef SYMSLICE_H
#define SYMSLICE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct symslice_module symslice_module;
typedef struct symslice_analysis symslice_analysis;

typedef enum symslice_status {
  SYMSLICE_OK = 0,
  SYMSLICE_ERR_PARSE = 1,
  SYMSLICE_ERR_VALIDATE = 2,
  SYMSLICE_ERR_ANALYSIS = 3,
  SYMSLICE_ERR_USAGE = 4,
} symslice_status;

typedef enum symslice_mode {
  SYMSLICE_MODE_FAST = 0,     /* backward slicing only */
  SYMSLICE_MODE_FULL_IDT = 1, /* full dependency table, enables forward slices */
} symslice_mode;

typedef enum symslice_oracle {
  SYMSLICE_ORACLE_SDG = 0,
  SYMSLICE_ORACLE_WEISER = 1,
} symslice_oracle;

const char* symslice_version(void);

/* --- modules --- */
symslice_status symslice_parse(const char* text, symslice_module** out,
                               char* err, size_t err_len);
symslice_status symslice_load_file(const char* path, symslice_module** out,
                                   char* err, size_t err_len);
void symslice_module_free(symslice_module* m);

/* diagnostics from structural validation; returns a newline-separated list,
 * empty string when the module is well-formed */
symslice_status symslice_validate(const symslice_module* m, char** out_text);

/* canonical printed form */
symslice_status symslice_print(const symslice_module* m, char** out_text);

size_t symslice_instr_count(const symslice_module* m);

/* --- analysis --- */
symslice_status symslice_analyze(const symslice_module* m, symslice_mode mode,
                                 const char* effects_json /* nullable */,
                                 symslice_analysis** out, char* err, size_t err_len);
void symslice_analysis_free(symslice_analysis* a);

/* slices: ids is malloc'd, release with symslice_ids_free */
symslice_status symslice_backward_slice(const symslice_analysis* a, const char* func,
                                        const char* var, uint32_t** ids, size_t* count,
                                        char* err, size_t err_len);
symslice_status symslice_forward_slice(const symslice_analysis* a, const char* func,
                                       const char* var, uint32_t** ids, size_t* count,
                                       char* err, size_t err_len);
void symslice_ids_free(uint32_t* ids);

/* reference slicers over the same module (independent implementations) */
symslice_status symslice_oracle_slice(const symslice_module* m, symslice_oracle kind,
                                      const char* func, const char* var, uint32_t** ids,
                                      size_t* count, char* err, size_t err_len);

/* text outputs: release with symslice_text_free */
symslice_status symslice_idt_csv(const symslice_analysis* a, char** out_text,
                                 char* err, size_t err_len);
symslice_status symslice_summaries(const symslice_analysis* a, char** out_text);
symslice_status symslice_render(const symslice_module* m, const uint32_t* ids, size_t count,
                                int keep_style, char** out_text);
/* what: "cfg:@fn" | "callgraph" | "pdg:@fn" | "sdg" */
symslice_status symslice_dot(const symslice_module* m, const char* what, char** out_text,
                             char* err, size_t err_len);
void symslice_text_free(char* text);

/* auto criteria, one per line: "func var" */
symslice_status symslice_criteria(const symslice_module* m, char** out_text);

/* deterministic module generation; returns ".sir" text */
symslice_status symslice_generate(uint64_t seed, int max_procs, int max_instrs,
                                  int allow_recursion, int loop_heavy, char** out_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SYMSLICE_H */
