#include "sysio.hh"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mcaret {

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  fail("system: line ", line_no, ": ", msg);
}

// action(letter), e.g. call(a), return(a), internal(bot)
std::pair<ActionKind, std::string> parse_action(std::size_t line_no, const std::string& tok) {
  auto open = tok.find('(');
  if (open == std::string::npos || tok.back() != ')')
    fail_line(line_no, cat("malformed action '", tok, "'"));
  std::string name = tok.substr(0, open);
  std::string arg = tok.substr(open + 1, tok.size() - open - 2);
  ActionKind kind;
  if (name == "call")
    kind = ActionKind::Call;
  else if (name == "return")
    kind = ActionKind::Return;
  else if (name == "internal")
    kind = ActionKind::Internal;
  else
    fail_line(line_no, cat("unknown action '", name, "'"));
  if (arg.empty()) fail_line(line_no, "action needs a letter");
  return {kind, arg};
}

}  // namespace

ParsedSystem parse_system(const std::string& text) {
  ParsedSystem sys;
  bool saw_stacks = false, saw_states = false, saw_init = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> seen_rules;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "stacks") {
      if (toks.size() != 2) fail_line(line_no, "expected: stacks N");
      sys.stacks = static_cast<uint32_t>(std::stoul(toks[1]));
      if (sys.stacks < 1) fail_line(line_no, "stack count must be positive");
      saw_stacks = true;
    } else if (head == "alphabet") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i] == "bot") fail_line(line_no, "bot is implicit in the alphabet");
        sys.alphabet.push_back(toks[i]);
      }
    } else if (head == "states") {
      for (std::size_t i = 1; i < toks.size(); ++i) sys.states.push_back(toks[i]);
      saw_states = true;
    } else if (head == "init") {
      if (toks.size() != 3) fail_line(line_no, "expected: init g i");
      sys.init_state = toks[1];
      sys.init_stack = static_cast<uint32_t>(std::stoul(toks[2]));
      saw_init = true;
    } else if (head == "enhanced") {
      sys.enhanced = true;
    } else if (head == "rule") {
      // rule s: g a -> g' [s'] action(b)
      if (toks.size() < 6) fail_line(line_no, "truncated rule");
      std::string stack_tok = toks[1];
      if (stack_tok.empty() || stack_tok.back() != ':')
        fail_line(line_no, "expected 'rule s:'");
      ParsedSystem::RuleLine r;
      r.stack = static_cast<uint32_t>(std::stoul(stack_tok.substr(0, stack_tok.size() - 1)));
      r.from = toks[2];
      r.top = toks[3];
      if (toks[4] != "->") fail_line(line_no, "expected '->'");
      r.to = toks[5];
      std::size_t next = 6;
      if (sys.enhanced) {
        if (toks.size() <= next || toks[next].front() != '[')
          fail_line(line_no, "enhanced systems require a [s'] target stack");
        std::string t = toks[next];
        if (t.back() != ']') fail_line(line_no, "malformed [s']");
        r.to_stack = static_cast<uint32_t>(std::stoul(t.substr(1, t.size() - 2)));
        ++next;
      } else {
        r.to_stack = r.stack;
      }
      if (toks.size() != next + 1) fail_line(line_no, "expected exactly one action");
      auto [kind, arg] = parse_action(line_no, toks[next]);
      r.kind = kind;
      r.arg = arg;
      std::string sig = cat(r.stack, "|", r.from, "|", r.top, "|", r.to, "|", r.to_stack,
                            "|", action_name(r.kind), "|", r.arg);
      if (std::find(seen_rules.begin(), seen_rules.end(), sig) != seen_rules.end())
        sys.warnings.push_back(cat("line ", line_no, ": duplicate rule"));
      seen_rules.push_back(sig);
      sys.rules.push_back(std::move(r));
    } else {
      fail_line(line_no, cat("unknown directive '", head, "'"));
    }
  }
  if (!saw_stacks) fail("system: missing 'stacks' line");
  if (!saw_states) fail("system: missing 'states' line");
  if (!saw_init) fail("system: missing 'init' line");
  // Validate names and indices eagerly for good diagnostics.
  auto state_ok = [&](const std::string& g) {
    return std::find(sys.states.begin(), sys.states.end(), g) != sys.states.end();
  };
  auto letter_ok = [&](const std::string& a) {
    return a == "bot" ||
           std::find(sys.alphabet.begin(), sys.alphabet.end(), a) != sys.alphabet.end();
  };
  require(state_ok(sys.init_state), cat("system: unknown initial state '", sys.init_state, "'"));
  require(sys.init_stack >= 1 && sys.init_stack <= sys.stacks,
          "system: initial stack out of range");
  for (const auto& r : sys.rules) {
    require(r.stack >= 1 && r.stack <= sys.stacks, "system: rule stack out of range");
    require(r.to_stack >= 1 && r.to_stack <= sys.stacks,
            "system: rule target stack out of range");
    require(state_ok(r.from) && state_ok(r.to),
            cat("system: rule references unknown state '", r.from, "' or '", r.to, "'"));
    require(letter_ok(r.top) && letter_ok(r.arg),
            cat("system: rule references unknown letter '", r.top, "' or '", r.arg, "'"));
  }
  return sys;
}

std::vector<std::string> ParsedSystem::full_alphabet() const {
  std::vector<std::string> out{"bot"};
  out.insert(out.end(), alphabet.begin(), alphabet.end());
  return out;
}

namespace {

uint32_t index_of(const std::vector<std::string>& xs, const std::string& x) {
  for (uint32_t i = 0; i < xs.size(); ++i)
    if (xs[i] == x) return i;
  fail("unknown name '", x, "'");
}

std::vector<Rule> build_rules(const ParsedSystem& sys) {
  auto letters = sys.full_alphabet();
  std::vector<Rule> rules;
  for (const auto& r : sys.rules) {
    Rule nr;
    nr.from = index_of(sys.states, r.from);
    nr.top = index_of(letters, r.top);
    nr.to = index_of(sys.states, r.to);
    nr.stack = r.stack - 1;
    nr.to_stack = r.to_stack - 1;
    nr.kind = r.kind;
    nr.arg = index_of(letters, r.arg);
    rules.push_back(nr);
  }
  return rules;
}

}  // namespace

Mpds ParsedSystem::to_mpds() const {
  require(!enhanced, "system is declared enhanced");
  return Mpds(states, stacks, full_alphabet(), build_rules(*this),
              index_of(states, init_state), init_stack - 1);
}

EnhancedMpds ParsedSystem::to_enhanced() const {
  if (enhanced) {
    return EnhancedMpds::from_enhanced_rules(states, stacks, full_alphabet(),
                                             build_rules(*this),
                                             index_of(states, init_state), init_stack - 1);
  }
  return EnhancedMpds::enhance(to_mpds(), init_stack - 1);
}

std::string render_system(const ParsedSystem& sys) {
  std::ostringstream os;
  os << "stacks " << sys.stacks << "\n";
  os << "alphabet";
  for (const auto& a : sys.alphabet) os << " " << a;
  os << "\n";
  os << "states";
  for (const auto& g : sys.states) os << " " << g;
  os << "\n";
  os << "init " << sys.init_state << " " << sys.init_stack << "\n";
  if (sys.enhanced) os << "enhanced\n";
  for (const auto& r : sys.rules) {
    os << "rule " << r.stack << ": " << r.from << " " << r.top << " -> " << r.to;
    if (sys.enhanced) os << " [" << r.to_stack << "]";
    os << " " << action_name(r.kind) << "(" << r.arg << ")\n";
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), cat("cannot open '", path, "'"));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mcaret
