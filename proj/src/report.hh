// report.hh -- job orchestration and machine-readable reports.
#pragma once

#include <cstdint>
#include <string>

#include "sysio.hh"

namespace mcaret {

enum class Mode { Check, Oracle, CrossCheck };

struct JobOptions {
  uint32_t k = 1;
  uint32_t height_cutoff = 8;
  uint64_t vertex_budget = 2'000'000;
  uint32_t jobs = 0;  // 0 = hardware concurrency
};

// Exit codes: 0 yes, 1 no, 2 inconclusive, 3 usage or input error, 4 oracle
// and solver disagree.
struct JobResult {
  int exit_code = 3;
  std::string result;     // yes | no | inconclusive
  std::string agreement;  // agree | disagree | inconclusive | "" (not run)
  std::string summary;
  std::string json;
};

JobResult run_job(const ParsedSystem& sys, const std::string& formula_text, Mode mode,
                  const JobOptions& opts);

}  // namespace mcaret
