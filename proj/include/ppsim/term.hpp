#pragma once

// First-order terms shared by every rule language in the system: fluents,
// events, arithmetic expressions and the expectation formulas are all terms.
//
// Concrete syntax:
//   atom        lowercase identifier          wealth, plain, c1
//   number      integer (optional minus)      400, -1
//   variable    uppercase identifier or "_"   A, NMoney, _
//   compound    functor(arg1,...,argn)        damage(A,_), min(plus(FD,CD),V)
//   list        [e1,...,en]                   sugar for the "[]" functor
//   label test  @atom                         sugar for the "@" functor
//
// Matching is one-way: a pattern with variables against a ground term.
// Terms quoted inside exp_rule/viol/fulf structures may themselves contain
// variables; such variables behave as inert constants on the ground side.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ppsim/errors.hpp"

namespace ppsim {

class Term {
 public:
  enum class Kind { Atom, Number, Var, Compound };

  Term() : kind_(Kind::Atom), name_("nil") {}

  static Term atom(std::string name);
  static Term number(long long value);
  static Term var(std::string name);
  static Term compound(std::string functor, std::vector<Term> args);
  static Term list(std::vector<Term> elems);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_number() const { return kind_ == Kind::Number; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_compound() const { return kind_ == Kind::Compound; }
  bool is_anon() const { return kind_ == Kind::Var && name_ == "_"; }
  bool is_list() const { return kind_ == Kind::Compound && name_ == "[]"; }

  // Atom/variable name or compound functor.
  const std::string& name() const { return name_; }
  long long value() const { return value_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }

  // True iff the term contains no variables at all.
  bool is_ground() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  bool operator<(const Term& other) const;

  std::string str() const;

  static Term parse(std::string_view text);

 private:
  Kind kind_;
  std::string name_;
  long long value_ = 0;
  std::vector<Term> args_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);

// Variable bindings produced by matching. Application is idempotent and
// leaves unbound variables untouched.
class Substitution {
 public:
  // Returns false if `name` is already bound to a different term.
  bool bind(const std::string& name, const Term& value);
  const Term* lookup(const std::string& name) const;

  Term apply(const Term& t) const;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<std::string, Term>& bindings() const { return map_; }

  bool operator==(const Substitution& other) const { return map_ == other.map_; }
  bool operator<(const Substitution& other) const { return map_ < other.map_; }

  std::string str() const;

 private:
  std::map<std::string, Term> map_;
};

// Extends `subst` so that subst(pattern) == ground; false on mismatch
// (subst may then be partially extended — callers work on a copy).
// "_" matches anything and binds nothing; a repeated named variable must
// bind consistently. A variable on the ground side matches only "_" or a
// pattern variable (which binds to it).
bool match_into(const Term& pattern, const Term& ground, Substitution& subst);

// Most-general substitution s with s(pattern) == ground, if any.
std::optional<Substitution> match(const Term& pattern, const Term& ground);

// Evaluates an expression built from numbers, bound variables and the
// functors plus/2, minus/2, min/2. Throws eval_error otherwise.
long long eval_arith(const Term& expr, const Substitution& bindings);

// Incremental reader used by the rule and formula parsers: reads terms and
// punctuation tokens from a statement stream. '%' starts a line comment.
class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  bool at_end();
  // Consumes `token` if it is next (after whitespace/comments).
  bool try_consume(std::string_view token);
  void expect(std::string_view token);
  Term read_term();
  std::size_t pos() const { return pos_; }

 private:
  void skip_ws();
  Term read_term_inner();

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace ppsim
