#include "report.hh"

#include <chrono>
#include <thread>

#include <json.hpp>

#include "oracle.hh"
#include "solver.hh"

namespace mcaret {

namespace {

using nlohmann::json;

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Check: return "check";
    case Mode::Oracle: return "oracle";
    case Mode::CrossCheck: return "cross-check";
  }
  return "?";
}

json stats_json(const SolverStats& st) {
  return json{{"post_star_calls", st.sat.post_star_calls},
              {"fsa_calls", st.sat.fsa_calls},
              {"pa_calls", st.sat.pa_calls},
              {"repeated_head_calls", st.sat.repeated_head_calls},
              {"states_added", st.sat.states_added},
              {"skeletons_explored", st.skeletons_explored},
              {"tail_checks", st.tail_checks},
              {"initial_states", st.initial_states},
              {"interned_aug_states", st.interned_states},
              {"interned_aug_letters", st.interned_letters},
              {"audit_ok", st.audit_ok},
              {"audit_max_op_growth", st.audit_max_op_growth},
              {"audit_max_path_growth", st.audit_max_path_growth},
              {"state_space_bound", st.state_space_bound},
              {"wall_ms", st.wall_ms}};
}

json witness_json(const Witness& w) {
  json skel = json::array();
  for (const auto& e : w.skeleton) skel.push_back(json{{"state", e.state}, {"stack", e.stack}});
  return json{{"skeleton", skel},
              {"repeated_head", json{{"state", w.head_state}, {"letter", w.head_letter}}}};
}

json lasso_json(Product& prod, const AugLasso& aug) {
  LassoRun base = prod.project(aug);
  const EnhancedMpds& sys = *base.sys;
  json configs = json::array();
  for (const Config& c : base.configs) {
    json stacks = json::array();
    for (const auto& w : c.stacks) {
      json letters = json::array();
      for (LetterId a : w) letters.push_back(sys.letter_name(a));
      stacks.push_back(letters);
    }
    configs.push_back(json{{"state", sys.state_name(c.state)}, {"stacks", stacks}});
  }
  json rules = json::array();
  for (uint32_t id : base.rule_ids) rules.push_back(id);
  return json{{"configs", configs},
              {"cycle_start", base.cycle_start},
              {"rule_ids", rules}};
}

const char* answer_name(OracleAnswer a) {
  switch (a) {
    case OracleAnswer::Yes: return "yes";
    case OracleAnswer::No: return "no";
    case OracleAnswer::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace

JobResult run_job(const ParsedSystem& sys, const std::string& formula_text, Mode mode,
                  const JobOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  JobResult res;
  require(opts.k >= 1, "k must be at least 1");

  EnhancedMpds esys = sys.to_enhanced();
  std::vector<std::string> base_names;
  for (uint32_t g = 0; g < esys.base_state_count(); ++g)
    base_names.push_back(esys.base_state_name(g));
  FormulaTable table(base_names, esys.stack_count(), esys.alphabet());
  FormulaId f = parse_formula(table, formula_text);

  Prepared prep = prepare(esys, table, f);
  Product product(*prep.sys, *prep.table, prep.root);

  json j;
  j["tool"] = "mcaret";
  j["mode"] = mode_name(mode);
  j["k"] = opts.k;
  j["formula"] = table.render(f);
  for (const auto& w : sys.warnings) j["warnings"].push_back(w);

  BmcOptions bmc_opts;
  bmc_opts.jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  ExploreLimits limits{opts.height_cutoff, opts.vertex_budget};

  std::string result;
  std::string agreement;
  if (mode == Mode::Check) {
    Verdict v = bmc(product, opts.k, bmc_opts);
    result = v.yes ? "yes" : "no";
    j["stats"] = stats_json(v.stats);
    if (v.witness) j["witness"] = witness_json(*v.witness);
    res.exit_code = v.yes ? 0 : 1;
  } else if (mode == Mode::Oracle) {
    ProductOracleResult o = oracle_bmc(product, opts.k, limits);
    result = answer_name(o.answer);
    j["stats"] = json{{"vertices", o.vertices}, {"truncated", o.truncated}};
    if (o.witness) j["lasso"] = lasso_json(product, *o.witness);
    res.exit_code = o.answer == OracleAnswer::Yes ? 0 : (o.answer == OracleAnswer::No ? 1 : 2);
  } else {
    Verdict v = bmc(product, opts.k, bmc_opts);
    ProductOracleResult o = oracle_bmc(product, opts.k, limits);
    Agreement a = cross_check(o.answer, v.yes);
    agreement = a == Agreement::Agree ? "agree"
                                      : (a == Agreement::Disagree ? "disagree" : "inconclusive");
    result = v.yes ? "yes" : "no";
    j["stats"] = stats_json(v.stats);
    j["stats"]["oracle_vertices"] = o.vertices;
    j["stats"]["oracle_truncated"] = o.truncated;
    j["oracle_result"] = answer_name(o.answer);
    if (v.witness) j["witness"] = witness_json(*v.witness);
    switch (a) {
      case Agreement::Agree: res.exit_code = v.yes ? 0 : 1; break;
      case Agreement::Inconclusive: res.exit_code = 2; break;
      case Agreement::Disagree: res.exit_code = 4; break;
    }
  }
  j["result"] = result;
  if (!agreement.empty()) j["agreement"] = agreement;
  double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  j["wall_ms"] = wall;

  res.result = result;
  res.agreement = agreement;
  res.json = j.dump(2);
  std::ostringstream sum;
  sum << "mode=" << mode_name(mode) << " k=" << opts.k << " result=" << result;
  if (!agreement.empty()) sum << " (" << agreement << ")";
  sum << "\n";
  res.summary = sum.str();
  return res;
}

}  // namespace mcaret
