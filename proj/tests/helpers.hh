// helpers.hh -- shared fixtures for the test suites.
#pragma once

#include <string>

#include "lasso.hh"
#include "mpds.hh"
#include "sysio.hh"

namespace mcaret::testing {

// Single stack; an infinite run exists: (g0,[bot]) -call-> (g0,[bot a])
// -return-> (g1,[bot]) -internal-> (g0,[bot]) and around again. The last rule
// is unreachable from the initial configuration.
inline const char* kSys1 = R"(stacks 1
alphabet a
states g0 g1
init g0 1
rule 1: g0 bot -> g0 call(a)
rule 1: g0 a -> g1 return(a)
rule 1: g1 bot -> g0 internal(bot)
rule 1: g1 a -> g0 return(a)
)";

// Two stacks, already enhanced; every rule switches stacks, so no k-bounded
// infinite run exists for any k.
inline const char* kSys2 = R"(stacks 2
alphabet a
states g0
init g0 1
enhanced
rule 1: g0 bot -> g0 [2] call(a)
rule 2: g0 bot -> g0 [1] call(a)
)";

inline EnhancedMpds sys1() { return parse_system(kSys1).to_enhanced(); }
inline EnhancedMpds sys2() { return parse_system(kSys2).to_enhanced(); }

// The canonical SYS1 lasso: cycle of length 3 from the initial configuration.
inline LassoRun sys1_lasso(const EnhancedMpds& sys) {
  LassoRun run;
  run.sys = &sys;
  run.cycle_start = 0;
  Config c = sys.initial_config();
  run.configs.push_back(c);
  for (uint32_t rid : {0u, 1u, 2u}) {
    c = step(c, sys.rule(rid), sys.stack_count());
    run.rule_ids.push_back(rid);
    run.configs.push_back(c);
  }
  run.validate();
  return run;
}

}  // namespace mcaret::testing
