// capi.cc -- the extern-C surface over the C++ core.
#include "mcaret/mcaret.h"

#include <cstdlib>
#include <cstring>
#include <new>

#include "report.hh"
#include "solver.hh"
#include "sysio.hh"

using namespace mcaret;

struct mcaret_system {
  ParsedSystem parsed;
};

struct mcaret_report {
  JobResult result;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_err(char** err, const std::string& msg) {
  if (err) *err = dup_string(msg);
}

template <typename Fn>
mcaret_status guarded(char** err, Fn&& fn) {
  try {
    fn();
    return MCARET_OK;
  } catch (const McError& e) {
    set_err(err, e.what());
    std::string what = e.what();
    if (what.find("budget") != std::string::npos) return MCARET_ERR_LIMIT;
    return MCARET_ERR_INVALID;
  } catch (const std::bad_alloc&) {
    set_err(err, "out of memory");
    return MCARET_ERR_LIMIT;
  } catch (const std::exception& e) {
    set_err(err, e.what());
    return MCARET_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

void mcaret_options_init(mcaret_options* opts) {
  if (!opts) return;
  opts->k = 1;
  opts->height_cutoff = 8;
  opts->vertex_budget = 2'000'000;
  opts->jobs = 0;
}

mcaret_status mcaret_system_parse(const char* text, mcaret_system** out, char** err) {
  if (!text || !out) {
    set_err(err, "null argument");
    return MCARET_ERR_INVALID;
  }
  *out = nullptr;
  return guarded(err, [&] {
    auto sys = new mcaret_system{parse_system(text)};
    *out = sys;
  });
}

mcaret_status mcaret_system_parse_file(const char* path, mcaret_system** out, char** err) {
  if (!path || !out) {
    set_err(err, "null argument");
    return MCARET_ERR_INVALID;
  }
  *out = nullptr;
  return guarded(err, [&] {
    auto sys = new mcaret_system{parse_system(read_file(path))};
    *out = sys;
  });
}

void mcaret_system_free(mcaret_system* sys) { delete sys; }

mcaret_status mcaret_system_render(const mcaret_system* sys, char** text_out, char** err) {
  if (!sys || !text_out) {
    set_err(err, "null argument");
    return MCARET_ERR_INVALID;
  }
  return guarded(err, [&] { *text_out = dup_string(render_system(sys->parsed)); });
}

mcaret_status mcaret_formula_render(const mcaret_system* sys, const char* formula,
                                    char** text_out, char** err) {
  if (!sys || !formula || !text_out) {
    set_err(err, "null argument");
    return MCARET_ERR_INVALID;
  }
  return guarded(err, [&] {
    EnhancedMpds esys = sys->parsed.to_enhanced();
    std::vector<std::string> base_names;
    for (uint32_t g = 0; g < esys.base_state_count(); ++g)
      base_names.push_back(esys.base_state_name(g));
    FormulaTable table(base_names, esys.stack_count(), esys.alphabet());
    FormulaId f = parse_formula(table, formula);
    *text_out = dup_string(table.render(f));
  });
}

mcaret_status mcaret_run(const mcaret_system* sys, const char* formula, mcaret_mode mode,
                         const mcaret_options* opts, mcaret_report** out, char** err) {
  if (!sys || !formula || !out) {
    set_err(err, "null argument");
    return MCARET_ERR_INVALID;
  }
  *out = nullptr;
  return guarded(err, [&] {
    JobOptions jo;
    if (opts) {
      jo.k = opts->k;
      jo.height_cutoff = opts->height_cutoff;
      jo.vertex_budget = opts->vertex_budget;
      jo.jobs = opts->jobs;
    }
    Mode m = mode == MCARET_MODE_CHECK
                 ? Mode::Check
                 : (mode == MCARET_MODE_ORACLE ? Mode::Oracle : Mode::CrossCheck);
    auto rep = new mcaret_report{run_job(sys->parsed, formula, m, jo)};
    *out = rep;
  });
}

mcaret_answer mcaret_report_answer(const mcaret_report* rep) {
  if (!rep) return MCARET_ANSWER_INCONCLUSIVE;
  if (rep->result.result == "yes") return MCARET_ANSWER_YES;
  if (rep->result.result == "no") return MCARET_ANSWER_NO;
  return MCARET_ANSWER_INCONCLUSIVE;
}

mcaret_agreement mcaret_report_agreement(const mcaret_report* rep) {
  if (!rep || rep->result.agreement.empty()) return MCARET_AGREEMENT_NONE;
  if (rep->result.agreement == "agree") return MCARET_AGREEMENT_AGREE;
  if (rep->result.agreement == "disagree") return MCARET_AGREEMENT_DISAGREE;
  return MCARET_AGREEMENT_INCONCLUSIVE;
}

int mcaret_report_exit_code(const mcaret_report* rep) {
  return rep ? rep->result.exit_code : 3;
}

const char* mcaret_report_json(const mcaret_report* rep) {
  return rep ? rep->result.json.c_str() : "";
}

const char* mcaret_report_summary(const mcaret_report* rep) {
  return rep ? rep->result.summary.c_str() : "";
}

void mcaret_report_free(mcaret_report* rep) { delete rep; }

void mcaret_string_free(char* s) { std::free(s); }

const char* mcaret_version(void) { return "1.0.0"; }

}  // extern "C"
