#pragma once

// Discrete Event Calculus engine: a time-indexed narrative of events and the
// fluent state it induces through initiates/terminates rules under inertia.
//
// Rule text format, one statement per '.', '%' comments:
//   initiates(Event, Fluent) :- body1, ..., bodyN.
//   terminates(Event, Fluent).
// Body atoms: holds_at(F), not_holds(F), is(V, Expr), const(name, V).
//
// Fluents and events are ground terms, except that variables occurring
// inside exp_rule/viol/fulf structures are treated as quoted syntax (the
// stored expectation rules carry their own variables).

#include <map>
#include <string>
#include <vector>

#include "ppsim/term.hpp"

namespace ppsim {

struct BodyAtom {
  enum class Kind { HoldsAt, NotHolds, Is, Const };
  Kind kind;
  Term first;   // HoldsAt/NotHolds pattern; Is target variable; Const variable
  Term second;  // Is expression
  std::string const_name;
};

struct EffectRule {
  bool initiates = true;
  Term event_pattern;
  Term fluent_pattern;
  std::vector<BodyAtom> body;
  std::string text;  // original statement, used in error messages
};

struct State {
  int time = 0;
  std::string label;
  std::vector<Term> fluents;  // sorted, unique

  bool holds(const Term& fluent) const;
};

// Concrete fluents initiated/terminated while computing one step; terminate
// patterns are expanded against the pre-step state.
struct StepDelta {
  std::vector<Term> initiated;
  std::vector<Term> terminated;
};

// True iff t has no variables outside quoted exp_rule/viol/fulf subterms.
bool ground_except_quoted(const Term& t);

std::vector<EffectRule> parse_effect_rules(std::string_view text);

class Engine {
 public:
  Engine();

  void add_rule(EffectRule rule);          // throws rule_error if unsafe
  void load_rules(std::string_view text);  // parse_effect_rules + add_rule
  void set_constant(const std::string& name, long long value);

  // Installs the time-0 fluent set; only valid before any step.
  void initially(const std::vector<Term>& fluents, const std::string& label = "init");

  // Applies all effect rules for `events` against the current state and
  // appends the successor state carrying `next_label`. Initiation wins when
  // a fluent is both terminated and initiated.
  void step(const std::vector<Term>& events, const std::string& next_label);

  int current_time() const { return static_cast<int>(states_.size()) - 1; }
  const State& state(int t) const;
  const State& current_state() const { return states_.back(); }
  const std::vector<Term>& events_at(int t) const;
  const StepDelta& delta_at(int t) const;

  std::vector<Substitution> holds_at(const Term& pattern, int t) const;
  std::vector<Substitution> happened(const Term& pattern, int t) const;

  const std::vector<EffectRule>& rules() const { return rules_; }

 private:
  void check_tick(int t) const;

  std::vector<EffectRule> rules_;
  std::map<std::string, long long> consts_;
  std::vector<State> states_;
  std::vector<std::vector<Term>> events_;  // events_[t] drive state t -> t+1
  std::vector<StepDelta> deltas_;
  bool stepped_ = false;
};

}  // namespace ppsim
