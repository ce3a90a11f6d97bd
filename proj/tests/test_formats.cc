#include <doctest.h>

#include "helpers.hh"
#include "sysio.hh"

using namespace mcaret;
using namespace mcaret::testing;

TEST_CASE("minimal system file") {
  ParsedSystem sys = parse_system(
      "stacks 1\nalphabet a\nstates g0\ninit g0 1\nrule 1: g0 bot -> g0 internal(bot)\n");
  CHECK(sys.rules.size() == 1);
  Mpds m = sys.to_mpds();
  CHECK(m.rules().size() == 1);
  CHECK(m.state_names() == std::vector<std::string>{"g0"});
}

TEST_CASE("bottom discipline is rejected at parse/build time") {
  CHECK_THROWS_AS(parse_system("stacks 1\nstates g0\ninit g0 1\n"
                               "rule 1: g0 bot -> g0 return(bot)\n")
                      .to_mpds(),
                  McError);
  CHECK_THROWS_AS(parse_system("stacks 1\nalphabet a\nstates g0\ninit g0 1\n"
                               "rule 1: g0 bot -> g0 call(bot)\n")
                      .to_mpds(),
                  McError);
}

TEST_CASE("SYS1 round-trips through the renderer") {
  ParsedSystem sys = parse_system(kSys1);
  std::string rendered = render_system(sys);
  ParsedSystem again = parse_system(rendered);
  CHECK(render_system(again) == rendered);
  CHECK(again.rules.size() == 4);
  CHECK(again.states == sys.states);
  // The golden rendering.
  CHECK(rendered ==
        "stacks 1\n"
        "alphabet a\n"
        "states g0 g1\n"
        "init g0 1\n"
        "rule 1: g0 bot -> g0 call(a)\n"
        "rule 1: g0 a -> g1 return(a)\n"
        "rule 1: g1 bot -> g0 internal(bot)\n"
        "rule 1: g1 a -> g0 return(a)\n");
}

TEST_CASE("enhanced systems need [s'] targets; plain systems reject them") {
  ParsedSystem sys = parse_system(kSys2);
  CHECK(sys.enhanced);
  EnhancedMpds e = sys.to_enhanced();
  CHECK(e.rules().size() == 2);
  CHECK_THROWS_AS(parse_system("stacks 2\nalphabet a\nstates g0\ninit g0 1\nenhanced\n"
                               "rule 1: g0 bot -> g0 call(a)\n"),
                  McError);
}

TEST_CASE("diagnostics carry line numbers; duplicates warn") {
  try {
    parse_system("stacks 1\nstates g0\ninit g0 1\nrule 1: g0 bot ->\n");
    FAIL("expected a parse error");
  } catch (const McError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  ParsedSystem sys = parse_system(
      "stacks 1\nalphabet a\nstates g0\ninit g0 1\n"
      "rule 1: g0 bot -> g0 internal(bot)\nrule 1: g0 bot -> g0 internal(bot)\n");
  REQUIRE(sys.warnings.size() == 1);
  CHECK(sys.warnings[0].find("duplicate") != std::string::npos);
}

TEST_CASE("unknown names are reported") {
  CHECK_THROWS_WITH_AS(parse_system("stacks 1\nstates g0\ninit g9 1\n"),
                       doctest::Contains("unknown initial state"), McError);
  CHECK_THROWS_WITH_AS(parse_system("stacks 1\nstates g0\ninit g0 1\n"
                                    "rule 1: g0 zz -> g0 internal(zz)\n"),
                       doctest::Contains("unknown letter"), McError);
}
