// Exercises the shared-library surface end to end.
#include <cassert>
#include <cstdio>
#include <cstring>
#include <string>

#include "mcaret/mcaret.h"

static int failures = 0;
#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

static const char* kSys1 =
    "stacks 1\nalphabet a\nstates g0 g1\ninit g0 1\n"
    "rule 1: g0 bot -> g0 call(a)\n"
    "rule 1: g0 a -> g1 return(a)\n"
    "rule 1: g1 bot -> g0 internal(bot)\n";

int main() {
  char* err = nullptr;
  mcaret_system* sys = nullptr;
  CHECK(mcaret_system_parse(kSys1, &sys, &err) == MCARET_OK);
  CHECK(err == nullptr);

  char* rendered = nullptr;
  CHECK(mcaret_system_render(sys, &rendered, &err) == MCARET_OK);
  CHECK(rendered && std::strstr(rendered, "stacks 1"));
  mcaret_string_free(rendered);

  char* formula = nullptr;
  CHECK(mcaret_formula_render(sys, "g0@1 & X g0@1", &formula, &err) == MCARET_OK);
  CHECK(formula != nullptr);
  mcaret_string_free(formula);

  // Parse errors surface as statuses with messages.
  char* msg = nullptr;
  CHECK(mcaret_formula_render(sys, "g9@1", &formula, &msg) == MCARET_ERR_INVALID);
  CHECK(msg != nullptr);
  mcaret_string_free(msg);

  mcaret_options opts;
  mcaret_options_init(&opts);
  opts.k = 1;
  opts.jobs = 1;

  mcaret_report* rep = nullptr;
  CHECK(mcaret_run(sys, "g0@1", MCARET_MODE_CHECK, &opts, &rep, &err) == MCARET_OK);
  CHECK(mcaret_report_answer(rep) == MCARET_ANSWER_YES);
  CHECK(mcaret_report_exit_code(rep) == 0);
  CHECK(mcaret_report_agreement(rep) == MCARET_AGREEMENT_NONE);
  CHECK(std::strstr(mcaret_report_json(rep), "\"result\": \"yes\""));
  mcaret_report_free(rep);

  CHECK(mcaret_run(sys, "g1@1", MCARET_MODE_CHECK, &opts, &rep, &err) == MCARET_OK);
  CHECK(mcaret_report_answer(rep) == MCARET_ANSWER_NO);
  CHECK(mcaret_report_exit_code(rep) == 1);
  mcaret_report_free(rep);

  CHECK(mcaret_run(sys, "Xa[1] g1@1", MCARET_MODE_CROSS_CHECK, &opts, &rep, &err) ==
        MCARET_OK);
  CHECK(mcaret_report_answer(rep) == MCARET_ANSWER_YES);
  CHECK(mcaret_report_agreement(rep) == MCARET_AGREEMENT_AGREE);
  mcaret_report_free(rep);

  CHECK(mcaret_run(sys, "g0@1", MCARET_MODE_ORACLE, &opts, &rep, &err) == MCARET_OK);
  CHECK(mcaret_report_answer(rep) == MCARET_ANSWER_YES);
  CHECK(std::strstr(mcaret_report_json(rep), "\"lasso\""));
  mcaret_report_free(rep);

  mcaret_system_free(sys);

  // Malformed system.
  mcaret_system* bad = nullptr;
  CHECK(mcaret_system_parse("stacks 0\n", &bad, &msg) == MCARET_ERR_INVALID);
  CHECK(bad == nullptr);
  CHECK(msg != nullptr);
  mcaret_string_free(msg);

  if (failures) {
    std::fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  std::printf("capi: all checks passed\n");
  return 0;
}
