#pragma once

// Expectation monitor: fires exp_rule fluents whose conditions hold against
// the current observation, progresses every active expectation, and reports
// fulfilments and violations. The engine owns rule storage (exp_rule
// fluents); the monitor only keeps the active-expectation set.
//
// A rule re-fires every tick its condition holds; duplicates are suppressed
// by the (rule, grounding, residual) triple, so an expectation that stays
// pending exists once while an immediately resolving one classifies once
// per tick.

#include <string>
#include <vector>

#include "ppsim/formula.hpp"
#include "ppsim/term.hpp"

namespace ppsim {

// A conditional rule of expectation, normally decoded from an
// exp_rule(Cond, Exp) fluent. Cond is restricted to non-temporal
// constructs; every named variable of Exp must occur in Cond.
struct ExpRule {
  Term source;      // the exp_rule fluent term this rule came from
  FormulaPtr cond;
  FormulaPtr exp;

  static ExpRule from_fluent(const Term& exp_rule_fluent);  // throws rule_error
};

struct ActiveExpectation {
  Term rule;                // source exp_rule term
  Substitution grounding;
  FormulaPtr cond;          // condition instantiated with the grounding
  FormulaPtr exp;           // original expectation, instantiated
  FormulaPtr residual;      // current progressed form
  int activated_at = 0;
};

// A terminal classification of one expectation instance.
struct Classification {
  Term rule;
  Substitution grounding;
  FormulaPtr cond;
  FormulaPtr exp;
  int activated_at = 0;

  // viol(Cond, Exp) / fulf(Cond, Exp) event term for the engine narrative.
  Term event_term(bool violated) const;
};

struct MonitorOutput {
  std::vector<ActiveExpectation> activated;
  std::vector<Classification> fulfilments;
  std::vector<Classification> violations;
  std::vector<ActiveExpectation> surviving;
};

// Enumerates all substitutions making a (non-temporal) condition true
// against the observation.
std::vector<Substitution> eval_condition(const FormulaPtr& cond,
                                         const StepObservation& obs);

// Decodes the (cond, exp) formula pair from a ground viol/fulf event term.
std::pair<FormulaPtr, FormulaPtr> violation_pair_from_event(const Term& event);

class Monitor {
 public:
  MonitorOutput tick(const StepObservation& obs, const std::vector<ExpRule>& rules);

  // Substitutions from matching `pattern` against the atoms of the
  // residuals of surviving and just-activated expectations. Atoms are
  // exposed as: fluent term, happ(Event), does(Actor, Action).
  std::vector<Substitution> expected_instances(const Term& pattern) const;

  const std::vector<ActiveExpectation>& active() const { return active_; }
  int now() const { return now_; }

 private:
  std::vector<ActiveExpectation> active_;
  std::vector<ActiveExpectation> last_activated_;
  int now_ = 0;
};

}  // namespace ppsim
