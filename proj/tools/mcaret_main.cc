// mcaret -- command-line front end over the shared-library C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/stat.h>

#include <CLI11.hpp>

#include "mcaret/mcaret.h"

namespace {

struct CommonArgs {
  std::string system_path;
  std::string formula;
  unsigned k = 1;
  unsigned height = 8;
  unsigned long long budget = 2'000'000;
  unsigned jobs = 0;
  bool json = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_k) {
  cmd->add_option("-s,--system", args.system_path, "system file (.mpds)")->required();
  cmd->add_option("-f,--formula", args.formula,
                  "formula: literal text, a file path, or '-' for stdin")
      ->required();
  if (with_k) cmd->add_option("-k,--bound", args.k, "context bound (>= 1)")->required();
  cmd->add_option("-H,--height", args.height, "oracle stack-height cutoff (default 8)");
  cmd->add_option("--budget", args.budget, "oracle vertex budget (default 2e6)");
  cmd->add_option("-j,--jobs", args.jobs, "worker threads (default: all cores)");
  cmd->add_flag("--json", args.json, "emit the JSON report on stdout");
}

bool file_exists(const std::string& path) {
  struct stat st;
  return stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode);
}

std::string load_formula(const std::string& arg) {
  if (arg == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  if (file_exists(arg)) {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

int run(mcaret_mode mode, const CommonArgs& args) {
  char* err = nullptr;
  mcaret_system* sys = nullptr;
  if (mcaret_system_parse_file(args.system_path.c_str(), &sys, &err) != MCARET_OK) {
    std::cerr << "error: " << (err ? err : "unknown") << "\n";
    mcaret_string_free(err);
    return 3;
  }
  mcaret_options opts;
  mcaret_options_init(&opts);
  opts.k = args.k;
  opts.height_cutoff = args.height;
  opts.vertex_budget = args.budget;
  opts.jobs = args.jobs;

  std::string formula = load_formula(args.formula);
  mcaret_report* rep = nullptr;
  mcaret_status st = mcaret_run(sys, formula.c_str(), mode, &opts, &rep, &err);
  if (st != MCARET_OK) {
    std::cerr << "error: " << (err ? err : "unknown") << "\n";
    mcaret_string_free(err);
    mcaret_system_free(sys);
    return 3;
  }
  if (args.json)
    std::cout << mcaret_report_json(rep) << "\n";
  else
    std::cout << mcaret_report_summary(rep);
  int code = mcaret_report_exit_code(rep);
  mcaret_report_free(rep);
  mcaret_system_free(sys);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcaret: bounded Multi-CaRet model checking of multi-pushdown systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mcaret_version()));

  CommonArgs check_args, oracle_args, cross_args;
  CLI::App* check = app.add_subcommand(
      "check", "decide with the saturation solver (exit 0 yes, 1 no)");
  add_common(check, check_args, true);
  CLI::App* oracle = app.add_subcommand(
      "oracle", "decide with the explicit-state oracle (exit 2 when inconclusive)");
  add_common(oracle, oracle_args, true);
  CLI::App* cross = app.add_subcommand(
      "cross-check", "run solver and oracle and compare (exit 4 on disagreement)");
  add_common(cross, cross_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  if (check->parsed()) return run(MCARET_MODE_CHECK, check_args);
  if (oracle->parsed()) return run(MCARET_MODE_ORACLE, oracle_args);
  return run(MCARET_MODE_CROSS_CHECK, cross_args);
}
