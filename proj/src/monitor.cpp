#include "ppsim/monitor.hpp"

#include <algorithm>
#include <set>

namespace ppsim {

ExpRule ExpRule::from_fluent(const Term& t) {
  if (!t.is_compound() || t.name() != "exp_rule" || t.arity() != 2)
    throw rule_error("not an exp_rule/2 term: " + t.str());
  ExpRule r;
  r.source = t;
  r.cond = formula_from_term(t.args()[0]);
  r.exp = formula_from_term(t.args()[1]);
  if (!is_condition_formula(r.cond))
    throw rule_error("exp_rule condition may not use temporal operators: " + t.str());
  std::set<std::string> cond_vars;
  for (const auto& v : formula_vars(r.cond)) cond_vars.insert(v);
  for (const auto& v : formula_vars(r.exp))
    if (!cond_vars.count(v))
      throw rule_error("unsafe exp_rule (variable " + v +
                       " not bound by the condition): " + t.str());
  return r;
}

Term Classification::event_term(bool violated) const {
  return Term::compound(violated ? "viol" : "fulf",
                        {formula_to_term(cond), formula_to_term(exp)});
}

std::pair<FormulaPtr, FormulaPtr> violation_pair_from_event(const Term& event) {
  if (!event.is_compound() || event.arity() != 2 ||
      (event.name() != "viol" && event.name() != "fulf"))
    throw rule_error("not a viol/fulf event: " + event.str());
  return {formula_from_term(event.args()[0]), formula_from_term(event.args()[1])};
}

// ---------------------------------------------------------------------------
// Condition enumeration

static void eval_cond_rec(const FormulaPtr& f, const StepObservation& obs,
                          const Substitution& seed,
                          std::vector<Substitution>& out) {
  switch (f->kind()) {
    case Formula::Kind::True:
      out.push_back(seed);
      return;
    case Formula::Kind::False:
      return;
    case Formula::Kind::Fluent: {
      Term pat = seed.apply(f->term());
      for (const Term& g : obs.fluents) {
        Substitution s = seed;
        if (match_into(pat, g, s)) out.push_back(std::move(s));
      }
      return;
    }
    case Formula::Kind::Happ: {
      Term pat = seed.apply(f->term());
      for (const Term& g : obs.events) {
        Substitution s = seed;
        if (match_into(pat, g, s)) out.push_back(std::move(s));
      }
      return;
    }
    case Formula::Kind::HappBy: {
      Term actor = seed.apply(f->actor());
      Term action = seed.apply(f->action());
      for (const Term& g : obs.events) {
        if (!g.is_compound() || g.name() != "does" || g.arity() != 2) continue;
        Substitution s = seed;
        if (match_into(actor, g.args()[0], s) && match_into(action, g.args()[1], s))
          out.push_back(std::move(s));
      }
      return;
    }
    case Formula::Kind::Label:
      if (obs.label == f->label()) out.push_back(seed);
      return;
    case Formula::Kind::Viol: {
      FormulaPtr cp = substitute(f->kid(0), seed);
      FormulaPtr ep = substitute(f->kid(1), seed);
      for (const auto& [cond, exp] : obs.violations) {
        Substitution s = seed;
        if (match_formula(cp, cond, s) && match_formula(ep, exp, s))
          out.push_back(std::move(s));
      }
      return;
    }
    case Formula::Kind::Not: {
      std::vector<Substitution> inner;
      eval_cond_rec(f->kid(), obs, seed, inner);
      if (inner.empty()) out.push_back(seed);
      return;
    }
    case Formula::Kind::And: {
      std::vector<Substitution> frontier{seed};
      for (const auto& k : f->kids()) {
        std::vector<Substitution> next;
        for (const Substitution& s : frontier) eval_cond_rec(k, obs, s, next);
        frontier = std::move(next);
        if (frontier.empty()) return;
      }
      for (auto& s : frontier) out.push_back(std::move(s));
      return;
    }
    case Formula::Kind::Or: {
      for (const auto& k : f->kids()) eval_cond_rec(k, obs, seed, out);
      return;
    }
    default:
      throw rule_error("temporal operator in expectation-rule condition");
  }
}

std::vector<Substitution> eval_condition(const FormulaPtr& cond,
                                         const StepObservation& obs) {
  std::vector<Substitution> out;
  eval_cond_rec(cond, obs, Substitution(), out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Monitor

MonitorOutput Monitor::tick(const StepObservation& obs,
                            const std::vector<ExpRule>& rules) {
  MonitorOutput out;

  // (1) Activation: instantiate every rule whose condition holds, unless an
  // identical instance is already active.
  for (const ExpRule& rule : rules) {
    for (const Substitution& s : eval_condition(rule.cond, obs)) {
      ActiveExpectation ae;
      ae.rule = rule.source;
      ae.grounding = s;
      ae.cond = substitute(rule.cond, s);
      ae.exp = substitute(rule.exp, s);
      ae.residual = ae.exp;
      ae.activated_at = now_;
      bool duplicate = false;
      for (const ActiveExpectation& existing : active_) {
        if (existing.rule == ae.rule && existing.grounding == ae.grounding &&
            formula_equal(existing.residual, ae.residual)) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      active_.push_back(ae);
      out.activated.push_back(ae);
    }
  }

  // (2) Progression: classify every active instance exactly once.
  std::vector<ActiveExpectation> next_active;
  for (ActiveExpectation& ae : active_) {
    Residual r = progress(ae.residual, obs);
    if (r.is_pending()) {
      ae.residual = r.formula;
      next_active.push_back(ae);
      out.surviving.push_back(ae);
      continue;
    }
    Classification c{ae.rule, ae.grounding, ae.cond, ae.exp, ae.activated_at};
    (r.is_true() ? out.fulfilments : out.violations).push_back(std::move(c));
  }
  active_ = std::move(next_active);
  last_activated_ = out.activated;
  ++now_;
  return out;
}

static void residual_atoms(const FormulaPtr& f, std::vector<Term>& out) {
  switch (f->kind()) {
    case Formula::Kind::Fluent:
      out.push_back(f->term());
      return;
    case Formula::Kind::Happ:
      out.push_back(Term::compound("happ", {f->term()}));
      return;
    case Formula::Kind::HappBy:
      out.push_back(Term::compound("does", {f->actor(), f->action()}));
      return;
    default:
      for (const auto& k : f->kids()) residual_atoms(k, out);
  }
}

std::vector<Substitution> Monitor::expected_instances(const Term& pattern) const {
  std::vector<Substitution> out;
  auto scan = [&](const ActiveExpectation& ae) {
    std::vector<Term> atoms;
    residual_atoms(ae.residual, atoms);
    for (const Term& a : atoms) {
      Substitution s;
      if (match_into(pattern, a, s)) out.push_back(std::move(s));
    }
  };
  for (const ActiveExpectation& ae : active_) scan(ae);
  for (const ActiveExpectation& ae : last_activated_) {
    // Still-active just-activated instances were already scanned.
    bool in_active = false;
    for (const ActiveExpectation& cur : active_) {
      if (cur.rule == ae.rule && cur.grounding == ae.grounding &&
          cur.activated_at == ae.activated_at) {
        in_active = true;
        break;
      }
    }
    if (!in_active) scan(ae);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ppsim
