#pragma once

// The expectation language: fluent and event tests combined with Boolean
// connectives and the future-time operators next / eventually / always.
// never(F) is sugar for always(not(F)) and is normalised away on entry.
//
// A formula is evaluated incrementally by *progression*: one step's
// observation rewrites it into resolved-true, resolved-false, or a residual
// formula to carry into the next step. trace_eval gives the matching
// three-valued finite-trace semantics and serves as the testing oracle.
//
// Grammar (term syntax from term.hpp):
//   F ::= "next(" F ")" | "eventually(" F ")" | "always(" F ")"
//       | "never(" F ")" | "not(" F ")"
//       | "and([" F {"," F} "])" | "or([" F {"," F} "])"
//       | "happ(" Term ")" | "happ(" Term "," Term ")"
//       | "viol(" F "," F ")" | "@" atom | "true" | "false" | Term

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppsim/term.hpp"

namespace ppsim {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind {
    True,
    False,
    Fluent,      // fluent test: term pattern against the state
    Happ,        // event test: term pattern against the step's events
    HappBy,      // attributed event test: actor performs action
    Label,       // @label: the step carries this label
    Viol,        // a violation of (cond, exp) was recorded this step
    Not,
    And,
    Or,
    Next,
    Eventually,
    Always,
  };

  Kind kind() const { return kind_; }
  const Term& term() const { return term_; }            // Fluent, Happ
  const Term& actor() const { return actor_; }          // HappBy
  const Term& action() const { return term_; }          // HappBy
  const std::string& label() const { return label_; }   // Label
  const std::vector<FormulaPtr>& kids() const { return kids_; }
  const FormulaPtr& kid(std::size_t i = 0) const { return kids_[i]; }

  std::string str() const;

  // Factories; f_and / f_or simplify away boolean constants, flatten
  // nested conjunctions/disjunctions and drop duplicate operands, so a
  // pending residual never contains true/false subterms.
  static FormulaPtr t();
  static FormulaPtr f();
  static FormulaPtr boolean(bool b) { return b ? t() : f(); }
  static FormulaPtr fluent(Term t);
  static FormulaPtr happ(Term event);
  static FormulaPtr happ_by(Term actor, Term action);
  static FormulaPtr label(std::string l);
  static FormulaPtr viol(FormulaPtr cond, FormulaPtr exp);
  static FormulaPtr f_not(FormulaPtr f);
  static FormulaPtr f_and(std::vector<FormulaPtr> kids);
  static FormulaPtr f_or(std::vector<FormulaPtr> kids);
  static FormulaPtr next(FormulaPtr f);
  static FormulaPtr eventually(FormulaPtr f);
  static FormulaPtr always(FormulaPtr f);

 private:
  static FormulaPtr make_node(Kind kind, Term term, Term actor,
                              std::string label, std::vector<FormulaPtr> kids);
  static FormulaPtr nary(Kind kind, std::vector<FormulaPtr> kids);

  Kind kind_ = Kind::True;
  Term term_;
  Term actor_;
  std::string label_;
  std::vector<FormulaPtr> kids_;
};

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// One tick's evaluation context. `events` are the events recorded at the
// step leading into this state; `violations` are the (cond, exp) pairs
// delivered by viol events at this step.
struct StepObservation {
  std::vector<Term> fluents;
  std::vector<Term> events;
  std::string label;
  std::vector<std::pair<FormulaPtr, FormulaPtr>> violations;
};

struct Residual {
  enum class Kind { True, False, Pending };
  Kind kind;
  FormulaPtr formula;  // set iff Pending

  static Residual resolved(bool b) {
    return {b ? Kind::True : Kind::False, nullptr};
  }
  static Residual pending(FormulaPtr f) { return {Kind::Pending, std::move(f)}; }
  bool is_true() const { return kind == Kind::True; }
  bool is_false() const { return kind == Kind::False; }
  bool is_pending() const { return kind == Kind::Pending; }
};

enum class Outcome { True, False, Unknown };

FormulaPtr parse_formula(std::string_view text);
FormulaPtr formula_from_term(const Term& t);
Term formula_to_term(const FormulaPtr& f);

FormulaPtr substitute(const FormulaPtr& f, const Substitution& s);
bool formula_is_ground(const FormulaPtr& f);

// Structural match of a formula pattern against another formula, extending
// `subst` (term positions use one-way term matching).
bool match_formula(const FormulaPtr& pattern, const FormulaPtr& ground,
                   Substitution& subst);

// One-step progression of a variable-free formula (anonymous "_" allowed).
Residual progress(const FormulaPtr& f, const StepObservation& obs);

// Three-valued LTL-on-finite-trace evaluation starting at trace index 0.
Outcome trace_eval(const FormulaPtr& f, std::span<const StepObservation> trace);

// True iff f uses no temporal operator (legal as an expectation-rule
// condition).
bool is_condition_formula(const FormulaPtr& f);

// Variable names occurring in f (anonymous "_" excluded).
std::vector<std::string> formula_vars(const FormulaPtr& f);

}  // namespace ppsim
