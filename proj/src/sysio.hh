// sysio.hh -- the line-based system format and its renderer.
#pragma once

#include <string>
#include <vector>

#include "mpds.hh"

namespace mcaret {

// A parsed system file, kept close to the concrete syntax for round-tripping.
struct ParsedSystem {
  uint32_t stacks = 1;
  std::vector<std::string> alphabet;  // without the implicit bot
  std::vector<std::string> states;
  std::string init_state;
  uint32_t init_stack = 1;  // 1-based as written
  bool enhanced = false;
  struct RuleLine {
    uint32_t stack = 1;  // 1-based
    std::string from, top, to, arg;
    uint32_t to_stack = 1;  // 1-based; meaningful iff enhanced
    ActionKind kind = ActionKind::Internal;
  };
  std::vector<RuleLine> rules;
  std::vector<std::string> warnings;

  Mpds to_mpds() const;            // plain systems only
  EnhancedMpds to_enhanced() const;  // enhances plain systems on the fly
  std::vector<std::string> full_alphabet() const;  // "bot" first
};

ParsedSystem parse_system(const std::string& text);
std::string render_system(const ParsedSystem& sys);

std::string read_file(const std::string& path);

}  // namespace mcaret
