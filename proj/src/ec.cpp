#include "ppsim/ec.hpp"

#include <algorithm>
#include <set>

namespace ppsim {

namespace {

bool is_quoting_functor(const Term& t) {
  return t.is_compound() && t.arity() == 2 &&
         (t.name() == "exp_rule" || t.name() == "viol" || t.name() == "fulf");
}

void term_vars(const Term& t, std::set<std::string>& out, bool skip_quoted) {
  if (t.is_var()) {
    if (!t.is_anon()) out.insert(t.name());
    return;
  }
  if (!t.is_compound()) return;
  if (skip_quoted && is_quoting_functor(t)) return;
  for (const Term& a : t.args()) term_vars(a, out, skip_quoted);
}

}  // namespace

bool ground_except_quoted(const Term& t) {
  std::set<std::string> vars;
  term_vars(t, vars, /*skip_quoted=*/true);
  if (!vars.empty()) return false;
  // Anonymous variables are only tolerated inside quoted structures too.
  struct Walk {
    static bool ok(const Term& t) {
      if (t.is_var()) return false;
      if (!t.is_compound()) return true;
      if (is_quoting_functor(t)) return true;
      for (const Term& a : t.args())
        if (!ok(a)) return false;
      return true;
    }
  };
  return Walk::ok(t);
}

bool State::holds(const Term& fluent) const {
  return std::binary_search(fluents.begin(), fluents.end(), fluent);
}

// ---------------------------------------------------------------------------
// Rule parsing

static BodyAtom parse_body_atom(const Term& t, const std::string& stmt) {
  auto bad = [&](const std::string& why) {
    return rule_error("bad body atom in rule '" + stmt + "': " + why);
  };
  if (!t.is_compound()) throw bad(t.str());
  BodyAtom atom;
  if (t.name() == "holds_at" && t.arity() == 1) {
    atom.kind = BodyAtom::Kind::HoldsAt;
    atom.first = t.args()[0];
  } else if (t.name() == "not_holds" && t.arity() == 1) {
    atom.kind = BodyAtom::Kind::NotHolds;
    atom.first = t.args()[0];
  } else if (t.name() == "is" && t.arity() == 2) {
    if (!t.args()[0].is_var() || t.args()[0].is_anon())
      throw bad("is/2 target must be a named variable");
    atom.kind = BodyAtom::Kind::Is;
    atom.first = t.args()[0];
    atom.second = t.args()[1];
  } else if (t.name() == "const" && t.arity() == 2) {
    if (!t.args()[0].is_atom()) throw bad("const/2 name must be an atom");
    if (!t.args()[1].is_var() || t.args()[1].is_anon())
      throw bad("const/2 target must be a named variable");
    atom.kind = BodyAtom::Kind::Const;
    atom.const_name = t.args()[0].name();
    atom.first = t.args()[1];
  } else {
    throw bad(t.str());
  }
  return atom;
}

std::vector<EffectRule> parse_effect_rules(std::string_view text) {
  std::vector<EffectRule> rules;
  TermReader reader(text);
  while (!reader.at_end()) {
    std::size_t start = reader.pos();
    Term head = reader.read_term();
    if (!head.is_compound() || head.arity() != 2 ||
        (head.name() != "initiates" && head.name() != "terminates"))
      throw parse_error("expected initiates/2 or terminates/2 head", start);

    EffectRule rule;
    rule.initiates = head.name() == "initiates";
    rule.event_pattern = head.args()[0];
    rule.fluent_pattern = head.args()[1];

    std::vector<Term> body_terms;
    if (reader.try_consume(":-")) {
      do {
        body_terms.push_back(reader.read_term());
      } while (reader.try_consume(","));
    }
    reader.expect(".");
    rule.text = head.str();
    for (const Term& bt : body_terms)
      rule.body.push_back(parse_body_atom(bt, rule.text));
    rules.push_back(std::move(rule));
  }
  return rules;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine() {
  states_.push_back(State{0, "init", {}});
}

void Engine::add_rule(EffectRule rule) {
  // Safety: every variable of an initiated fluent (outside quoted parts)
  // must be bound by the event pattern or the body.
  std::set<std::string> bound;
  term_vars(rule.event_pattern, bound, /*skip_quoted=*/false);
  for (const BodyAtom& atom : rule.body) {
    switch (atom.kind) {
      case BodyAtom::Kind::HoldsAt:
        term_vars(atom.first, bound, /*skip_quoted=*/false);
        break;
      case BodyAtom::Kind::Is:
      case BodyAtom::Kind::Const:
        bound.insert(atom.first.name());
        break;
      case BodyAtom::Kind::NotHolds:
        break;  // negation-as-failure binds nothing
    }
  }
  if (rule.initiates) {
    std::set<std::string> needed;
    term_vars(rule.fluent_pattern, needed, /*skip_quoted=*/true);
    for (const std::string& v : needed)
      if (!bound.count(v))
        throw rule_error("unsafe rule (unbound variable " + v + "): " + rule.text);
  }
  rules_.push_back(std::move(rule));
}

void Engine::load_rules(std::string_view text) {
  for (EffectRule& r : parse_effect_rules(text)) add_rule(std::move(r));
}

void Engine::set_constant(const std::string& name, long long value) {
  consts_[name] = value;
}

void Engine::initially(const std::vector<Term>& fluents, const std::string& label) {
  if (stepped_ || current_time() != 0)
    throw error("initially() is only valid before the first step");
  for (const Term& f : fluents)
    if (!ground_except_quoted(f))
      throw rule_error("initial fluent is not ground: " + f.str());
  State s;
  s.time = 0;
  s.label = label;
  s.fluents = fluents;
  std::sort(s.fluents.begin(), s.fluents.end());
  s.fluents.erase(std::unique(s.fluents.begin(), s.fluents.end()), s.fluents.end());
  states_[0] = std::move(s);
}

static std::vector<Substitution> eval_body(const std::vector<BodyAtom>& body,
                                           const State& st,
                                           const std::map<std::string, long long>& consts,
                                           Substitution seed,
                                           const std::string& rule_text) {
  std::vector<Substitution> frontier{std::move(seed)};
  for (const BodyAtom& atom : body) {
    std::vector<Substitution> next;
    for (const Substitution& s : frontier) {
      switch (atom.kind) {
        case BodyAtom::Kind::HoldsAt: {
          for (const Term& g : st.fluents) {
            Substitution s2 = s;
            if (match_into(atom.first, g, s2)) next.push_back(std::move(s2));
          }
          break;
        }
        case BodyAtom::Kind::NotHolds: {
          bool found = false;
          for (const Term& g : st.fluents) {
            Substitution s2 = s;
            if (match_into(atom.first, g, s2)) {
              found = true;
              break;
            }
          }
          if (!found) next.push_back(s);
          break;
        }
        case BodyAtom::Kind::Is: {
          long long v = eval_arith(atom.second, s);
          Substitution s2 = s;
          if (s2.bind(atom.first.name(), Term::number(v))) next.push_back(std::move(s2));
          break;
        }
        case BodyAtom::Kind::Const: {
          auto it = consts.find(atom.const_name);
          if (it == consts.end())
            throw rule_error("unknown constant '" + atom.const_name + "' in rule: " +
                             rule_text);
          Substitution s2 = s;
          if (s2.bind(atom.first.name(), Term::number(it->second)))
            next.push_back(std::move(s2));
          break;
        }
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

void Engine::step(const std::vector<Term>& events, const std::string& next_label) {
  for (const Term& e : events)
    if (!ground_except_quoted(e))
      throw rule_error("event is not ground: " + e.str());

  const State& cur = states_.back();
  StepDelta delta;
  std::vector<Term> terminate_patterns;

  for (const Term& event : events) {
    for (const EffectRule& rule : rules_) {
      Substitution seed;
      if (!match_into(rule.event_pattern, event, seed)) continue;
      for (const Substitution& s :
           eval_body(rule.body, cur, consts_, seed, rule.text)) {
        Term fl = s.apply(rule.fluent_pattern);
        if (rule.initiates) {
          if (!ground_except_quoted(fl))
            throw rule_error("rule produced a non-ground fluent '" + fl.str() +
                             "': " + rule.text);
          delta.initiated.push_back(std::move(fl));
        } else {
          terminate_patterns.push_back(std::move(fl));
        }
      }
    }
  }

  // Expand terminate patterns against the pre-step state.
  for (const Term& f : cur.fluents) {
    for (const Term& pat : terminate_patterns) {
      Substitution s;
      if (match_into(pat, f, s)) {
        delta.terminated.push_back(f);
        break;
      }
    }
  }

  std::sort(delta.initiated.begin(), delta.initiated.end());
  delta.initiated.erase(std::unique(delta.initiated.begin(), delta.initiated.end()),
                        delta.initiated.end());
  std::sort(delta.terminated.begin(), delta.terminated.end());
  delta.terminated.erase(std::unique(delta.terminated.begin(), delta.terminated.end()),
                         delta.terminated.end());

  State next;
  next.time = cur.time + 1;
  next.label = next_label;
  for (const Term& f : cur.fluents) {
    if (!std::binary_search(delta.terminated.begin(), delta.terminated.end(), f))
      next.fluents.push_back(f);
  }
  for (const Term& f : delta.initiated) next.fluents.push_back(f);
  std::sort(next.fluents.begin(), next.fluents.end());
  next.fluents.erase(std::unique(next.fluents.begin(), next.fluents.end()),
                     next.fluents.end());

  events_.push_back(events);
  deltas_.push_back(std::move(delta));
  states_.push_back(std::move(next));
  stepped_ = true;
}

void Engine::check_tick(int t) const {
  if (t < 0 || t > current_time())
    throw query_error("tick " + std::to_string(t) + " outside narrative [0, " +
                      std::to_string(current_time()) + "]");
}

const State& Engine::state(int t) const {
  check_tick(t);
  return states_[static_cast<std::size_t>(t)];
}

const std::vector<Term>& Engine::events_at(int t) const {
  check_tick(t);
  if (static_cast<std::size_t>(t) >= events_.size())
    throw query_error("no step recorded at tick " + std::to_string(t));
  return events_[static_cast<std::size_t>(t)];
}

const StepDelta& Engine::delta_at(int t) const {
  check_tick(t);
  if (static_cast<std::size_t>(t) >= deltas_.size())
    throw query_error("no step recorded at tick " + std::to_string(t));
  return deltas_[static_cast<std::size_t>(t)];
}

std::vector<Substitution> Engine::holds_at(const Term& pattern, int t) const {
  check_tick(t);
  std::vector<Substitution> out;
  for (const Term& f : states_[static_cast<std::size_t>(t)].fluents) {
    Substitution s;
    if (match_into(pattern, f, s)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Substitution> Engine::happened(const Term& pattern, int t) const {
  std::vector<Substitution> out;
  for (const Term& e : events_at(t)) {
    Substitution s;
    if (match_into(pattern, e, s)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ppsim
