#include "ppsim/formula.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ppsim {

namespace {

std::shared_ptr<Formula> make() { return std::make_shared<Formula>(); }

bool any_term_match(const Term& pattern, const std::vector<Term>& grounds) {
  for (const Term& g : grounds) {
    Substitution s;
    if (match_into(pattern, g, s)) return true;
  }
  return false;
}

}  // namespace

FormulaPtr Formula::make_node(Kind kind, Term term, Term actor,
                              std::string label, std::vector<FormulaPtr> kids) {
  auto p = make();
  p->kind_ = kind;
  p->term_ = std::move(term);
  p->actor_ = std::move(actor);
  p->label_ = std::move(label);
  p->kids_ = std::move(kids);
  return p;
}

FormulaPtr Formula::t() {
  static FormulaPtr instance = [] {
    auto p = make();
    p->kind_ = Kind::True;
    return FormulaPtr(p);
  }();
  return instance;
}

FormulaPtr Formula::f() {
  static FormulaPtr instance = [] {
    auto p = make();
    p->kind_ = Kind::False;
    return FormulaPtr(p);
  }();
  return instance;
}

FormulaPtr Formula::fluent(Term t) {
  auto p = make();
  p->kind_ = Kind::Fluent;
  p->term_ = std::move(t);
  return p;
}

FormulaPtr Formula::happ(Term event) {
  auto p = make();
  p->kind_ = Kind::Happ;
  p->term_ = std::move(event);
  return p;
}

FormulaPtr Formula::happ_by(Term actor, Term action) {
  auto p = make();
  p->kind_ = Kind::HappBy;
  p->actor_ = std::move(actor);
  p->term_ = std::move(action);
  return p;
}

FormulaPtr Formula::label(std::string l) {
  auto p = make();
  p->kind_ = Kind::Label;
  p->label_ = std::move(l);
  return p;
}

FormulaPtr Formula::viol(FormulaPtr cond, FormulaPtr exp) {
  auto p = make();
  p->kind_ = Kind::Viol;
  p->kids_ = {std::move(cond), std::move(exp)};
  return p;
}

FormulaPtr Formula::f_not(FormulaPtr f) {
  if (f->kind() == Kind::True) return Formula::f();
  if (f->kind() == Kind::False) return Formula::t();
  if (f->kind() == Kind::Not) return f->kid();
  auto p = make();
  p->kind_ = Kind::Not;
  p->kids_ = {std::move(f)};
  return p;
}

FormulaPtr Formula::nary(Formula::Kind kind, std::vector<FormulaPtr> kids) {
  // Flatten, drop the neutral constant, short-circuit on the absorbing one,
  // and deduplicate structurally equal operands.
  const bool is_and = kind == Formula::Kind::And;
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (k->kind() == kind) {
      for (const auto& kk : k->kids()) flat.push_back(kk);
    } else {
      flat.push_back(std::move(k));
    }
  }
  std::vector<FormulaPtr> out;
  for (auto& k : flat) {
    if (k->kind() == Formula::Kind::True) {
      if (!is_and) return Formula::t();
      continue;
    }
    if (k->kind() == Formula::Kind::False) {
      if (is_and) return Formula::f();
      continue;
    }
    bool dup = false;
    for (const auto& seen : out)
      if (formula_equal(seen, k)) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(k));
  }
  if (out.empty()) return is_and ? Formula::t() : Formula::f();
  if (out.size() == 1) return out[0];
  return make_node(kind, Term(), Term(), "", std::move(out));
}

FormulaPtr Formula::f_and(std::vector<FormulaPtr> kids) {
  return nary(Kind::And, std::move(kids));
}

FormulaPtr Formula::f_or(std::vector<FormulaPtr> kids) {
  return nary(Kind::Or, std::move(kids));
}

FormulaPtr Formula::next(FormulaPtr f) {
  auto p = make();
  p->kind_ = Kind::Next;
  p->kids_ = {std::move(f)};
  return p;
}

FormulaPtr Formula::eventually(FormulaPtr f) {
  if (f->kind() == Kind::Eventually) return f;
  auto p = make();
  p->kind_ = Kind::Eventually;
  p->kids_ = {std::move(f)};
  return p;
}

FormulaPtr Formula::always(FormulaPtr f) {
  if (f->kind() == Kind::Always) return f;
  auto p = make();
  p->kind_ = Kind::Always;
  p->kids_ = {std::move(f)};
  return p;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Fluent:
    case Formula::Kind::Happ:
      return a->term() == b->term();
    case Formula::Kind::HappBy:
      return a->actor() == b->actor() && a->action() == b->action();
    case Formula::Kind::Label:
      return a->label() == b->label();
    default: {
      if (a->kids().size() != b->kids().size()) return false;
      for (std::size_t i = 0; i < a->kids().size(); ++i)
        if (!formula_equal(a->kids()[i], b->kids()[i])) return false;
      return true;
    }
  }
}

std::string Formula::str() const {
  std::ostringstream os;
  os << formula_to_term(make_node(kind_, term_, actor_, label_, kids_));
  return os.str();
}

// ---------------------------------------------------------------------------
// Term <-> Formula

FormulaPtr formula_from_term(const Term& t) {
  if (t.is_atom()) {
    if (t.name() == "true") return Formula::t();
    if (t.name() == "false") return Formula::f();
    return Formula::fluent(t);
  }
  if (!t.is_compound()) return Formula::fluent(t);

  const std::string& f = t.name();
  auto kids_from_list = [&](const Term& list) {
    if (!(list.is_list() || (list.is_atom() && list.name() == "[]")))
      throw parse_error(f + " expects a [..] list argument: " + t.str(), 0);
    if (list.is_atom() || list.args().empty())
      throw parse_error("empty " + f + "([]) is not allowed", 0);
    std::vector<FormulaPtr> kids;
    for (const Term& e : list.args()) kids.push_back(formula_from_term(e));
    return kids;
  };

  if (f == "not" && t.arity() == 1)
    return Formula::f_not(formula_from_term(t.args()[0]));
  if (f == "and" && t.arity() == 1)
    return Formula::f_and(kids_from_list(t.args()[0]));
  if (f == "or" && t.arity() == 1)
    return Formula::f_or(kids_from_list(t.args()[0]));
  if (f == "next" && t.arity() == 1)
    return Formula::next(formula_from_term(t.args()[0]));
  if (f == "eventually" && t.arity() == 1)
    return Formula::eventually(formula_from_term(t.args()[0]));
  if (f == "always" && t.arity() == 1)
    return Formula::always(formula_from_term(t.args()[0]));
  if (f == "never" && t.arity() == 1)
    return Formula::always(Formula::f_not(formula_from_term(t.args()[0])));
  if (f == "happ" && t.arity() == 1) return Formula::happ(t.args()[0]);
  if (f == "happ" && t.arity() == 2)
    return Formula::happ_by(t.args()[0], t.args()[1]);
  if (f == "viol" && t.arity() == 2)
    return Formula::viol(formula_from_term(t.args()[0]),
                         formula_from_term(t.args()[1]));
  if (f == "@" && t.arity() == 1 && t.args()[0].is_atom())
    return Formula::label(t.args()[0].name());
  return Formula::fluent(t);
}

Term formula_to_term(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::True:
      return Term::atom("true");
    case Formula::Kind::False:
      return Term::atom("false");
    case Formula::Kind::Fluent:
      return f->term();
    case Formula::Kind::Happ:
      return Term::compound("happ", {f->term()});
    case Formula::Kind::HappBy:
      return Term::compound("happ", {f->actor(), f->action()});
    case Formula::Kind::Label:
      return Term::compound("@", {Term::atom(f->label())});
    case Formula::Kind::Viol:
      return Term::compound("viol", {formula_to_term(f->kid(0)),
                                     formula_to_term(f->kid(1))});
    case Formula::Kind::Not:
      return Term::compound("not", {formula_to_term(f->kid())});
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Term> elems;
      for (const auto& k : f->kids()) elems.push_back(formula_to_term(k));
      return Term::compound(f->kind() == Formula::Kind::And ? "and" : "or",
                            {Term::list(std::move(elems))});
    }
    case Formula::Kind::Next:
      return Term::compound("next", {formula_to_term(f->kid())});
    case Formula::Kind::Eventually:
      return Term::compound("eventually", {formula_to_term(f->kid())});
    case Formula::Kind::Always:
      return Term::compound("always", {formula_to_term(f->kid())});
  }
  return Term::atom("true");
}

FormulaPtr parse_formula(std::string_view text) {
  return formula_from_term(Term::parse(text));
}

FormulaPtr substitute(const FormulaPtr& f, const Substitution& s) {
  switch (f->kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Label:
      return f;
    case Formula::Kind::Fluent:
      return Formula::fluent(s.apply(f->term()));
    case Formula::Kind::Happ:
      return Formula::happ(s.apply(f->term()));
    case Formula::Kind::HappBy:
      return Formula::happ_by(s.apply(f->actor()), s.apply(f->action()));
    case Formula::Kind::Viol:
      return Formula::viol(substitute(f->kid(0), s), substitute(f->kid(1), s));
    case Formula::Kind::Not:
      return Formula::f_not(substitute(f->kid(), s));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids()) kids.push_back(substitute(k, s));
      return f->kind() == Formula::Kind::And ? Formula::f_and(std::move(kids))
                                             : Formula::f_or(std::move(kids));
    }
    case Formula::Kind::Next:
      return Formula::next(substitute(f->kid(), s));
    case Formula::Kind::Eventually:
      return Formula::eventually(substitute(f->kid(), s));
    case Formula::Kind::Always:
      return Formula::always(substitute(f->kid(), s));
  }
  return f;
}

static void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    if (!t.is_anon()) out.insert(t.name());
  } else if (t.is_compound()) {
    for (const Term& a : t.args()) collect_vars(a, out);
  }
}

static void collect_vars(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind()) {
    case Formula::Kind::Fluent:
    case Formula::Kind::Happ:
      collect_vars(f->term(), out);
      break;
    case Formula::Kind::HappBy:
      collect_vars(f->actor(), out);
      collect_vars(f->action(), out);
      break;
    default:
      for (const auto& k : f->kids()) collect_vars(k, out);
  }
}

std::vector<std::string> formula_vars(const FormulaPtr& f) {
  std::set<std::string> s;
  collect_vars(f, s);
  return {s.begin(), s.end()};
}

bool formula_is_ground(const FormulaPtr& f) {
  return formula_vars(f).empty();
}

bool match_formula(const FormulaPtr& pattern, const FormulaPtr& ground,
                   Substitution& subst) {
  if (pattern->kind() != ground->kind()) return false;
  switch (pattern->kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Fluent:
    case Formula::Kind::Happ:
      return match_into(pattern->term(), ground->term(), subst);
    case Formula::Kind::HappBy:
      return match_into(pattern->actor(), ground->actor(), subst) &&
             match_into(pattern->action(), ground->action(), subst);
    case Formula::Kind::Label:
      return pattern->label() == ground->label();
    default: {
      if (pattern->kids().size() != ground->kids().size()) return false;
      for (std::size_t i = 0; i < pattern->kids().size(); ++i)
        if (!match_formula(pattern->kids()[i], ground->kids()[i], subst))
          return false;
      return true;
    }
  }
}

bool is_condition_formula(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Next:
    case Formula::Kind::Eventually:
    case Formula::Kind::Always:
      return false;
    case Formula::Kind::Viol:
      // The children are match patterns against recorded violations, not
      // live tests, so temporal operators are fine inside them.
      return true;
    default:
      for (const auto& k : f->kids())
        if (!is_condition_formula(k)) return false;
      return true;
  }
}

// ---------------------------------------------------------------------------
// Progression

static bool eval_now(const FormulaPtr& f, const StepObservation& obs) {
  switch (f->kind()) {
    case Formula::Kind::Fluent:
      return any_term_match(f->term(), obs.fluents);
    case Formula::Kind::Happ:
      return any_term_match(f->term(), obs.events);
    case Formula::Kind::HappBy: {
      for (const Term& e : obs.events) {
        if (!e.is_compound() || e.name() != "does" || e.arity() != 2) continue;
        Substitution s;
        if (match_into(f->actor(), e.args()[0], s) &&
            match_into(f->action(), e.args()[1], s))
          return true;
      }
      return false;
    }
    case Formula::Kind::Label:
      return obs.label == f->label();
    case Formula::Kind::Viol: {
      for (const auto& [cond, exp] : obs.violations) {
        Substitution s;
        if (match_formula(f->kid(0), cond, s) && match_formula(f->kid(1), exp, s))
          return true;
      }
      return false;
    }
    default:
      throw eval_error("eval_now on non-atomic formula");
  }
}

Residual progress(const FormulaPtr& f, const StepObservation& obs) {
  switch (f->kind()) {
    case Formula::Kind::True:
      return Residual::resolved(true);
    case Formula::Kind::False:
      return Residual::resolved(false);
    case Formula::Kind::Fluent:
    case Formula::Kind::Happ:
    case Formula::Kind::HappBy:
    case Formula::Kind::Label:
    case Formula::Kind::Viol:
      return Residual::resolved(eval_now(f, obs));
    case Formula::Kind::Not: {
      Residual r = progress(f->kid(), obs);
      if (r.is_true()) return Residual::resolved(false);
      if (r.is_false()) return Residual::resolved(true);
      return Residual::pending(Formula::f_not(r.formula));
    }
    case Formula::Kind::And: {
      std::vector<FormulaPtr> pend;
      for (const auto& k : f->kids()) {
        Residual r = progress(k, obs);
        if (r.is_false()) return Residual::resolved(false);
        if (r.is_pending()) pend.push_back(r.formula);
      }
      if (pend.empty()) return Residual::resolved(true);
      return Residual::pending(Formula::f_and(std::move(pend)));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> pend;
      for (const auto& k : f->kids()) {
        Residual r = progress(k, obs);
        if (r.is_true()) return Residual::resolved(true);
        if (r.is_pending()) pend.push_back(r.formula);
      }
      if (pend.empty()) return Residual::resolved(false);
      return Residual::pending(Formula::f_or(std::move(pend)));
    }
    case Formula::Kind::Next:
      return Residual::pending(f->kid());
    case Formula::Kind::Eventually: {
      Residual r = progress(f->kid(), obs);
      if (r.is_true()) return Residual::resolved(true);
      if (r.is_false()) return Residual::pending(f);
      return Residual::pending(Formula::f_or({r.formula, f}));
    }
    case Formula::Kind::Always: {
      Residual r = progress(f->kid(), obs);
      if (r.is_false()) return Residual::resolved(false);
      if (r.is_true()) return Residual::pending(f);
      return Residual::pending(Formula::f_and({r.formula, f}));
    }
  }
  return Residual::resolved(false);
}

// ---------------------------------------------------------------------------
// Finite-trace oracle

static Outcome k_not(Outcome a) {
  if (a == Outcome::True) return Outcome::False;
  if (a == Outcome::False) return Outcome::True;
  return Outcome::Unknown;
}

static Outcome eval_at(const FormulaPtr& f,
                       std::span<const StepObservation> trace, std::size_t i) {
  const std::size_t n = trace.size();
  switch (f->kind()) {
    case Formula::Kind::True:
      return Outcome::True;
    case Formula::Kind::False:
      return Outcome::False;
    case Formula::Kind::Fluent:
    case Formula::Kind::Happ:
    case Formula::Kind::HappBy:
    case Formula::Kind::Label:
    case Formula::Kind::Viol:
      if (i >= n) return Outcome::Unknown;
      return eval_now(f, trace[i]) ? Outcome::True : Outcome::False;
    case Formula::Kind::Not:
      return k_not(eval_at(f->kid(), trace, i));
    case Formula::Kind::And: {
      Outcome acc = Outcome::True;
      for (const auto& k : f->kids()) {
        Outcome r = eval_at(k, trace, i);
        if (r == Outcome::False) return Outcome::False;
        if (r == Outcome::Unknown) acc = Outcome::Unknown;
      }
      return acc;
    }
    case Formula::Kind::Or: {
      Outcome acc = Outcome::False;
      for (const auto& k : f->kids()) {
        Outcome r = eval_at(k, trace, i);
        if (r == Outcome::True) return Outcome::True;
        if (r == Outcome::Unknown) acc = Outcome::Unknown;
      }
      return acc;
    }
    case Formula::Kind::Next:
      if (i + 1 >= n) return Outcome::Unknown;
      return eval_at(f->kid(), trace, i + 1);
    case Formula::Kind::Eventually: {
      // The truncated trace can witness satisfaction but never refute it.
      for (std::size_t j = i; j < n; ++j)
        if (eval_at(f->kid(), trace, j) == Outcome::True) return Outcome::True;
      return Outcome::Unknown;
    }
    case Formula::Kind::Always: {
      for (std::size_t j = i; j < n; ++j)
        if (eval_at(f->kid(), trace, j) == Outcome::False) return Outcome::False;
      return Outcome::Unknown;
    }
  }
  return Outcome::Unknown;
}

Outcome trace_eval(const FormulaPtr& f, std::span<const StepObservation> trace) {
  if (trace.empty()) throw eval_error("trace_eval requires a non-empty trace");
  return eval_at(f, trace, 0);
}

}  // namespace ppsim
