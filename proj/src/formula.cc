#include "formula.hh"

#include <algorithm>
#include <cctype>

namespace mcaret {

FormulaTable::FormulaTable(std::vector<std::string> state_names, uint32_t stack_count,
                           std::vector<std::string> alphabet)
    : state_names_(std::move(state_names)),
      stack_count_(stack_count),
      alphabet_(std::move(alphabet)) {
  require(stack_count_ >= 1, "formula table needs at least one stack");
  require(!state_names_.empty(), "formula table needs at least one state");
  require(!alphabet_.empty() && alphabet_[0] == "bot", "alphabet[0] must be bot");
}

std::optional<LetterId> FormulaTable::letter_index(const std::string& name) const {
  for (uint32_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i] == name) return i;
  return std::nullopt;
}

uint32_t FormulaTable::add_automaton(const std::string& name, Nfa a) {
  require(!automaton_index(name).has_value(), cat("duplicate automaton '", name, "'"));
  automata_.emplace_back(name, std::move(a));
  return static_cast<uint32_t>(automata_.size()) - 1;
}

std::optional<uint32_t> FormulaTable::automaton_index(const std::string& name) const {
  for (uint32_t i = 0; i < automata_.size(); ++i)
    if (automata_[i].first == name) return i;
  return std::nullopt;
}

FormulaId FormulaTable::intern(FNode n) {
  auto it = index_.find(n);
  if (it != index_.end()) return it->second;
  FormulaId id = static_cast<FormulaId>(nodes_.size());
  nodes_.push_back(n);
  uint32_t sz = 1;
  switch (n.kind) {
    case FKind::Not:
    case FKind::Next:
    case FKind::AbsNext:
    case FKind::CallerNext:
    case FKind::StackNext:
    case FKind::AbsNextAny:
      sz += sizes_[n.a];
      break;
    case FKind::Or:
    case FKind::Until:
    case FKind::AbsUntil:
    case FKind::CallerUntil:
    case FKind::AbsUntilAny:
      sz += sizes_[n.a] + sizes_[n.b];
      break;
    default:
      break;
  }
  sizes_.push_back(sz);
  index_.emplace(n, id);
  return id;
}

FormulaId FormulaTable::state_atom(StateId g, StackIndex s) {
  require(g < state_names_.size(), "state atom out of range");
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::StateAtom, g, 0, s});
}

FormulaId FormulaTable::action_atom(ActionKind a) {
  return intern({FKind::ActionAtom, static_cast<uint32_t>(a), 0, 0});
}

FormulaId FormulaTable::stack_atom(StackIndex s) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::StackAtom, 0, 0, s});
}

FormulaId FormulaTable::reg_atom(StackIndex s, uint32_t automaton_idx) {
  require(s < stack_count_, "stack index out of range");
  require(automaton_idx < automata_.size(), "automaton index out of range");
  return intern({FKind::RegAtom, automaton_idx, 0, s});
}

FormulaId FormulaTable::mk_not(FormulaId f) { return intern({FKind::Not, f, 0, 0}); }
FormulaId FormulaTable::mk_or(FormulaId l, FormulaId r) { return intern({FKind::Or, l, r, 0}); }
FormulaId FormulaTable::mk_and(FormulaId l, FormulaId r) {
  return mk_not(mk_or(mk_not(l), mk_not(r)));
}
FormulaId FormulaTable::mk_implies(FormulaId l, FormulaId r) { return mk_or(mk_not(l), r); }
FormulaId FormulaTable::mk_true() {
  FormulaId p = state_atom(0, 0);
  return mk_or(mk_not(p), p);
}
FormulaId FormulaTable::mk_false() { return mk_not(mk_true()); }
FormulaId FormulaTable::mk_next(FormulaId f) { return intern({FKind::Next, f, 0, 0}); }
FormulaId FormulaTable::mk_until(FormulaId l, FormulaId r) {
  return intern({FKind::Until, l, r, 0});
}
FormulaId FormulaTable::mk_eventually(FormulaId f) { return mk_until(mk_true(), f); }
FormulaId FormulaTable::mk_globally(FormulaId f) {
  return mk_not(mk_eventually(mk_not(f)));
}
FormulaId FormulaTable::mk_abs_next(StackIndex s, FormulaId f) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::AbsNext, f, 0, s});
}
FormulaId FormulaTable::mk_abs_until(StackIndex s, FormulaId l, FormulaId r) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::AbsUntil, l, r, s});
}
FormulaId FormulaTable::mk_caller_next(StackIndex s, FormulaId f) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::CallerNext, f, 0, s});
}
FormulaId FormulaTable::mk_caller_until(StackIndex s, FormulaId l, FormulaId r) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::CallerUntil, l, r, s});
}
FormulaId FormulaTable::mk_stack_next(StackIndex s, FormulaId f) {
  require(s < stack_count_, "stack index out of range");
  return intern({FKind::StackNext, f, 0, s});
}
FormulaId FormulaTable::mk_abs_next_any(FormulaId f) {
  return intern({FKind::AbsNextAny, f, 0, 0});
}
FormulaId FormulaTable::mk_abs_until_any(FormulaId l, FormulaId r) {
  return intern({FKind::AbsUntilAny, l, r, 0});
}

FormulaId FormulaTable::rewrite_derived(FormulaId f) {
  const FNode n = node(f);
  switch (n.kind) {
    case FKind::StateAtom:
    case FKind::ActionAtom:
    case FKind::StackAtom:
    case FKind::RegAtom:
      return f;
    case FKind::Not:
      return mk_not(rewrite_derived(n.a));
    case FKind::Or:
      return mk_or(rewrite_derived(n.a), rewrite_derived(n.b));
    case FKind::Next:
      return mk_next(rewrite_derived(n.a));
    case FKind::Until:
      return mk_until(rewrite_derived(n.a), rewrite_derived(n.b));
    case FKind::AbsNext:
      return mk_abs_next(n.stack, rewrite_derived(n.a));
    case FKind::AbsUntil:
      return mk_abs_until(n.stack, rewrite_derived(n.a), rewrite_derived(n.b));
    case FKind::CallerNext:
      return mk_caller_next(n.stack, rewrite_derived(n.a));
    case FKind::CallerUntil:
      return mk_caller_until(n.stack, rewrite_derived(n.a), rewrite_derived(n.b));
    case FKind::StackNext: {
      // Xs[s] f == !s U (s & f)
      FormulaId body = rewrite_derived(n.a);
      FormulaId s = stack_atom(n.stack);
      return mk_until(mk_not(s), mk_and(s, body));
    }
    case FKind::AbsNextAny: {
      // Xa f == AND_s (s -> Xa[s] f)
      FormulaId body = rewrite_derived(n.a);
      FormulaId out = 0;
      bool first = true;
      for (StackIndex s = 0; s < stack_count_; ++s) {
        FormulaId part = mk_implies(stack_atom(s), mk_abs_next(s, body));
        out = first ? part : mk_and(out, part);
        first = false;
      }
      return out;
    }
    case FKind::AbsUntilAny: {
      // l Ua r == AND_s (s -> l Ua[s] r)
      FormulaId l = rewrite_derived(n.a);
      FormulaId r = rewrite_derived(n.b);
      FormulaId out = 0;
      bool first = true;
      for (StackIndex s = 0; s < stack_count_; ++s) {
        FormulaId part = mk_implies(stack_atom(s), mk_abs_until(s, l, r));
        out = first ? part : mk_and(out, part);
        first = false;
      }
      return out;
    }
  }
  fail("unreachable formula kind");
}

FormulaId FormulaTable::expand_stack_atoms(FormulaId f) {
  const FNode n = node(f);
  switch (n.kind) {
    case FKind::StackAtom: {
      FormulaId out = 0;
      bool first = true;
      for (StateId g = 0; g < state_names_.size(); ++g) {
        FormulaId part = state_atom(g, n.stack);
        out = first ? part : mk_or(out, part);
        first = false;
      }
      return out;
    }
    case FKind::StateAtom:
    case FKind::ActionAtom:
    case FKind::RegAtom:
      return f;
    case FKind::Not:
      return mk_not(expand_stack_atoms(n.a));
    case FKind::Or:
      return mk_or(expand_stack_atoms(n.a), expand_stack_atoms(n.b));
    case FKind::Next:
      return mk_next(expand_stack_atoms(n.a));
    case FKind::Until:
      return mk_until(expand_stack_atoms(n.a), expand_stack_atoms(n.b));
    case FKind::AbsNext:
      return mk_abs_next(n.stack, expand_stack_atoms(n.a));
    case FKind::AbsUntil:
      return mk_abs_until(n.stack, expand_stack_atoms(n.a), expand_stack_atoms(n.b));
    case FKind::CallerNext:
      return mk_caller_next(n.stack, expand_stack_atoms(n.a));
    case FKind::CallerUntil:
      return mk_caller_until(n.stack, expand_stack_atoms(n.a), expand_stack_atoms(n.b));
    case FKind::StackNext:
      return mk_stack_next(n.stack, expand_stack_atoms(n.a));
    case FKind::AbsNextAny:
      return mk_abs_next_any(expand_stack_atoms(n.a));
    case FKind::AbsUntilAny:
      return mk_abs_until_any(expand_stack_atoms(n.a), expand_stack_atoms(n.b));
  }
  fail("unreachable formula kind");
}

bool FormulaTable::uses_action_atoms(FormulaId f) const {
  const FNode& n = node(f);
  switch (n.kind) {
    case FKind::ActionAtom:
      return true;
    case FKind::StateAtom:
    case FKind::StackAtom:
    case FKind::RegAtom:
      return false;
    case FKind::Or:
    case FKind::Until:
    case FKind::AbsUntil:
    case FKind::CallerUntil:
    case FKind::AbsUntilAny:
      return uses_action_atoms(n.a) || uses_action_atoms(n.b);
    default:
      return uses_action_atoms(n.a);
  }
}

bool FormulaTable::uses_reg_atoms(FormulaId f) const {
  const FNode& n = node(f);
  switch (n.kind) {
    case FKind::RegAtom:
      return true;
    case FKind::StateAtom:
    case FKind::StackAtom:
    case FKind::ActionAtom:
      return false;
    case FKind::Or:
    case FKind::Until:
    case FKind::AbsUntil:
    case FKind::CallerUntil:
    case FKind::AbsUntilAny:
      return uses_reg_atoms(n.a) || uses_reg_atoms(n.b);
    default:
      return uses_reg_atoms(n.a);
  }
}

bool FormulaTable::is_simplified(FormulaId f) const {
  const FNode& n = node(f);
  switch (n.kind) {
    case FKind::StateAtom:
    case FKind::RegAtom:
      return true;
    case FKind::ActionAtom:
    case FKind::StackAtom:
    case FKind::StackNext:
    case FKind::AbsNextAny:
    case FKind::AbsUntilAny:
      return false;
    case FKind::Not:
    case FKind::Next:
    case FKind::AbsNext:
    case FKind::CallerNext:
      return is_simplified(n.a);
    case FKind::Or:
    case FKind::Until:
    case FKind::AbsUntil:
    case FKind::CallerUntil:
      return is_simplified(n.a) && is_simplified(n.b);
  }
  return false;
}

namespace {

int precedence(FKind k) {
  switch (k) {
    case FKind::Or: return 1;
    case FKind::Until:
    case FKind::AbsUntil:
    case FKind::CallerUntil:
    case FKind::AbsUntilAny: return 2;
    default: return 3;  // atoms and unary prefixes
  }
}

}  // namespace

std::string FormulaTable::render(FormulaId f) const {
  const FNode& n = node(f);
  auto wrap = [&](FormulaId sub) {
    std::string s = render(sub);
    if (precedence(node(sub).kind) <= precedence(n.kind) &&
        precedence(node(sub).kind) < 3)
      return cat("(", s, ")");
    return s;
  };
  auto sub_atomic = [&](FormulaId sub) {
    std::string s = render(sub);
    if (precedence(node(sub).kind) < 3) return cat("(", s, ")");
    return s;
  };
  switch (n.kind) {
    case FKind::StateAtom:
      return cat(state_names_[n.a], "@", n.stack + 1);
    case FKind::ActionAtom:
      switch (static_cast<ActionKind>(n.a)) {
        case ActionKind::Call: return "call";
        case ActionKind::Return: return "ret";
        case ActionKind::Internal: return "int";
      }
      return "?";
    case FKind::StackAtom:
      return cat("stack(", n.stack + 1, ")");
    case FKind::RegAtom:
      return cat("in(", n.stack + 1, ", ", automata_[n.a].first, ")");
    case FKind::Not:
      return cat("!", sub_atomic(n.a));
    case FKind::Or:
      return cat(wrap(n.a), " | ", wrap(n.b));
    case FKind::Next:
      return cat("X ", sub_atomic(n.a));
    case FKind::Until:
      return cat(wrap(n.a), " U ", wrap(n.b));
    case FKind::AbsNext:
      return cat("Xa[", n.stack + 1, "] ", sub_atomic(n.a));
    case FKind::AbsUntil:
      return cat(wrap(n.a), " Ua[", n.stack + 1, "] ", wrap(n.b));
    case FKind::CallerNext:
      return cat("Xc[", n.stack + 1, "] ", sub_atomic(n.a));
    case FKind::CallerUntil:
      return cat(wrap(n.a), " Uc[", n.stack + 1, "] ", wrap(n.b));
    case FKind::StackNext:
      return cat("Xs[", n.stack + 1, "] ", sub_atomic(n.a));
    case FKind::AbsNextAny:
      return cat("Xa ", sub_atomic(n.a));
    case FKind::AbsUntilAny:
      return cat(wrap(n.a), " Ua ", wrap(n.b));
  }
  fail("unreachable formula kind");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool try_consume(const std::string& s) {
    skip_ws();
    if (text.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!try_consume(c)) fail_here(cat("expected '", c, "'"));
  }

  [[noreturn]] void fail_here(const std::string& msg) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail("formula: ", msg, " at line ", line, ", column ", col);
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    if (pos == start) fail_here("expected identifier");
    return text.substr(start, pos - start);
  }

  // Peeks the next identifier without consuming it.
  std::string peek_ident() {
    skip_ws();
    std::size_t p = pos;
    while (p < text.size() && ident_char(text[p])) ++p;
    return text.substr(pos, p - pos);
  }

  uint32_t number() {
    std::string id = ident();
    for (char c : id)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail_here("expected number");
    return static_cast<uint32_t>(std::stoul(id));
  }
};

class FormulaParser {
public:
  FormulaParser(FormulaTable& table, const std::string& text) : table_(table), lex_(text) {}

  FormulaId parse() {
    while (lex_.peek_ident() == "automaton") parse_automaton_block();
    FormulaId f = parse_or();
    if (!lex_.eof()) lex_.fail_here("unexpected trailing input");
    return f;
  }

private:
  StackIndex parse_stack_index() {
    uint32_t s = lex_.number();
    if (s < 1 || s > table_.stack_count())
      lex_.fail_here(cat("stack index ", s, " out of range (N = ", table_.stack_count(), ")"));
    return s - 1;
  }

  StackIndex parse_bracket_stack() {
    lex_.expect('[');
    StackIndex s = parse_stack_index();
    lex_.expect(']');
    return s;
  }

  // automaton name { states q...; initial q...; accepting q...; trans q a q'; ... }
  void parse_automaton_block() {
    lex_.ident();  // "automaton"
    std::string name = lex_.ident();
    lex_.expect('{');
    std::vector<std::string> states;
    std::vector<uint32_t> initial, accepting;
    std::vector<std::tuple<std::string, std::string, std::string>> trans;
    auto state_index = [&](const std::string& q) -> uint32_t {
      for (uint32_t i = 0; i < states.size(); ++i)
        if (states[i] == q) return i;
      lex_.fail_here(cat("unknown automaton state '", q, "'"));
    };
    while (!lex_.try_consume('}')) {
      std::string kw = lex_.ident();
      if (kw == "states") {
        while (lex_.peek() != ';') states.push_back(lex_.ident());
      } else if (kw == "initial") {
        while (lex_.peek() != ';') initial.push_back(state_index(lex_.ident()));
      } else if (kw == "accepting") {
        while (lex_.peek() != ';') accepting.push_back(state_index(lex_.ident()));
      } else if (kw == "trans") {
        std::string q = lex_.ident(), a = lex_.ident(), r = lex_.ident();
        trans.emplace_back(q, a, r);
      } else {
        lex_.fail_here(cat("unknown automaton clause '", kw, "'"));
      }
      lex_.expect(';');
    }
    std::vector<NfaTrans> nfa_trans;
    for (const auto& [q, a, r] : trans) {
      auto letter = letter_index(a);
      if (!letter) lex_.fail_here(cat("unknown stack letter '", a, "'"));
      nfa_trans.push_back({state_index(q), *letter, state_index(r)});
    }
    table_.add_automaton(name,
                         Nfa(static_cast<uint32_t>(states.size()), std::move(initial),
                             std::move(accepting), std::move(nfa_trans)));
  }

  std::optional<LetterId> letter_index(const std::string& name) {
    return table_.letter_index(name);
  }

  FormulaId parse_or() {
    FormulaId l = parse_until();
    while (true) {
      if (lex_.try_consume("->")) {
        // right-associative, lowest precedence
        FormulaId r = parse_or();
        return table_.mk_implies(l, r);
      }
      if (lex_.peek() == '|') {
        lex_.expect('|');
        l = table_.mk_or(l, parse_until());
      } else if (lex_.peek() == '&') {
        lex_.expect('&');
        l = table_.mk_and(l, parse_until());
      } else {
        return l;
      }
    }
  }

  FormulaId parse_until() {
    FormulaId l = parse_unary();
    std::string id = lex_.peek_ident();
    if (id == "U") {
      lex_.ident();
      return table_.mk_until(l, parse_until());
    }
    if (id == "Ua") {
      lex_.ident();
      if (lex_.peek() == '[') {
        StackIndex s = parse_bracket_stack();
        return table_.mk_abs_until(s, l, parse_until());
      }
      return table_.mk_abs_until_any(l, parse_until());
    }
    if (id == "Uc") {
      lex_.ident();
      StackIndex s = parse_bracket_stack();
      return table_.mk_caller_until(s, l, parse_until());
    }
    return l;
  }

  FormulaId parse_unary() {
    if (lex_.try_consume('!')) return table_.mk_not(parse_unary());
    std::string id = lex_.peek_ident();
    if (id == "X") {
      lex_.ident();
      return table_.mk_next(parse_unary());
    }
    if (id == "Xa") {
      lex_.ident();
      if (lex_.peek() == '[') {
        StackIndex s = parse_bracket_stack();
        return table_.mk_abs_next(s, parse_unary());
      }
      return table_.mk_abs_next_any(parse_unary());
    }
    if (id == "Xc") {
      lex_.ident();
      StackIndex s = parse_bracket_stack();
      return table_.mk_caller_next(s, parse_unary());
    }
    if (id == "Xs") {
      lex_.ident();
      StackIndex s = parse_bracket_stack();
      return table_.mk_stack_next(s, parse_unary());
    }
    if (id == "F") {
      lex_.ident();
      return table_.mk_eventually(parse_unary());
    }
    if (id == "G") {
      lex_.ident();
      return table_.mk_globally(parse_unary());
    }
    return parse_atom();
  }

  FormulaId parse_atom() {
    if (lex_.try_consume('(')) {
      FormulaId f = parse_or();
      lex_.expect(')');
      return f;
    }
    std::string id = lex_.peek_ident();
    if (id.empty()) lex_.fail_here("expected formula");
    if (id == "true") {
      lex_.ident();
      return table_.mk_true();
    }
    if (id == "false") {
      lex_.ident();
      return table_.mk_false();
    }
    if (id == "call") {
      lex_.ident();
      return table_.action_atom(ActionKind::Call);
    }
    if (id == "ret") {
      lex_.ident();
      return table_.action_atom(ActionKind::Return);
    }
    if (id == "int") {
      lex_.ident();
      return table_.action_atom(ActionKind::Internal);
    }
    if (id == "stack") {
      lex_.ident();
      lex_.expect('(');
      StackIndex s = parse_stack_index();
      lex_.expect(')');
      return table_.stack_atom(s);
    }
    if (id == "in") {
      lex_.ident();
      lex_.expect('(');
      StackIndex s = parse_stack_index();
      lex_.expect(',');
      std::string name = lex_.ident();
      auto idx = table_.automaton_index(name);
      if (!idx) lex_.fail_here(cat("unknown automaton name '", name, "'"));
      lex_.expect(')');
      return table_.reg_atom(s, *idx);
    }
    // state atom g@s
    lex_.ident();
    lex_.expect('@');
    StackIndex s = parse_stack_index();
    const auto& names = table_.state_names();
    for (StateId g = 0; g < names.size(); ++g)
      if (names[g] == id) return table_.state_atom(g, s);
    lex_.fail_here(cat("unknown state '", id, "'"));
  }

  FormulaTable& table_;
  Lexer lex_;
};

}  // namespace

FormulaId parse_formula(FormulaTable& table, const std::string& text) {
  FormulaParser p(table, text);
  return p.parse();
}

}  // namespace mcaret
