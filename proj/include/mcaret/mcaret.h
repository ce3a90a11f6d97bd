/* mcaret.h -- C interface to the bounded Multi-CaRet model checker.
 *
 * The library decides, for a multi-pushdown system, an initial configuration,
 * a Multi-CaRet formula and a context bound k, whether a k-bounded infinite
 * run satisfying the formula exists. Three modes are exposed: the saturation
 * solver, an explicit-state oracle (exact up to a height cutoff), and a
 * cross-check running both.
 *
 * All objects are opaque handles; every function reporting failure fills
 * *err with a malloc'd message to be released with mcaret_string_free.
 */
#ifndef MCARET_H
#define MCARET_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  MCARET_OK = 0,
  MCARET_ERR_INVALID = 1,  /* bad arguments or malformed input */
  MCARET_ERR_LIMIT = 2,    /* resource budget exhausted */
  MCARET_ERR_INTERNAL = 3
} mcaret_status;

typedef enum {
  MCARET_ANSWER_YES = 0,
  MCARET_ANSWER_NO = 1,
  MCARET_ANSWER_INCONCLUSIVE = 2
} mcaret_answer;

typedef enum {
  MCARET_MODE_CHECK = 0,      /* saturation solver */
  MCARET_MODE_ORACLE = 1,     /* explicit-state oracle */
  MCARET_MODE_CROSS_CHECK = 2 /* both, with agreement */
} mcaret_mode;

typedef enum {
  MCARET_AGREEMENT_NONE = -1, /* not a cross-check run */
  MCARET_AGREEMENT_DISAGREE = 0,
  MCARET_AGREEMENT_AGREE = 1,
  MCARET_AGREEMENT_INCONCLUSIVE = 2
} mcaret_agreement;

typedef struct mcaret_system mcaret_system;
typedef struct mcaret_report mcaret_report;

typedef struct {
  unsigned k;                      /* context bound, >= 1 */
  unsigned height_cutoff;          /* oracle stack-height cutoff */
  unsigned long long vertex_budget;/* oracle vertex budget */
  unsigned jobs;                   /* worker threads; 0 = hardware default */
} mcaret_options;

/* Fills an options struct with the documented defaults (k=1, H=8,
 * budget=2e6, jobs=0). */
void mcaret_options_init(mcaret_options* opts);

/* Parses the system text format. */
mcaret_status mcaret_system_parse(const char* text, mcaret_system** out, char** err);
mcaret_status mcaret_system_parse_file(const char* path, mcaret_system** out, char** err);
void mcaret_system_free(mcaret_system* sys);

/* Renders the system back into its canonical text form. */
mcaret_status mcaret_system_render(const mcaret_system* sys, char** text_out, char** err);

/* Parses a formula against the system and returns its canonical rendering;
 * useful for validation and round-trip checks. */
mcaret_status mcaret_formula_render(const mcaret_system* sys, const char* formula,
                                    char** text_out, char** err);

/* Runs a job. The formula text may include automaton blocks. */
mcaret_status mcaret_run(const mcaret_system* sys, const char* formula, mcaret_mode mode,
                         const mcaret_options* opts, mcaret_report** out, char** err);

mcaret_answer mcaret_report_answer(const mcaret_report* rep);
mcaret_agreement mcaret_report_agreement(const mcaret_report* rep);
/* 0 yes, 1 no, 2 inconclusive, 4 disagreement (errors surface as statuses). */
int mcaret_report_exit_code(const mcaret_report* rep);
/* Owned by the report; valid until mcaret_report_free. */
const char* mcaret_report_json(const mcaret_report* rep);
const char* mcaret_report_summary(const mcaret_report* rep);
void mcaret_report_free(mcaret_report* rep);

void mcaret_string_free(char* s);
const char* mcaret_version(void);

#ifdef __cplusplus
}
#endif

#endif /* MCARET_H */
