#include "ppsim/term.hpp"

#include <cctype>
#include <sstream>

namespace ppsim {

Term Term::atom(std::string name) {
  Term t;
  t.kind_ = Kind::Atom;
  t.name_ = std::move(name);
  return t;
}

Term Term::number(long long value) {
  Term t;
  t.kind_ = Kind::Number;
  t.name_.clear();
  t.value_ = value;
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind_ = Kind::Var;
  t.name_ = std::move(name);
  return t;
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty() && functor != "[]")
    throw error("compound term requires at least one argument: " + functor);
  Term t;
  t.kind_ = Kind::Compound;
  t.name_ = std::move(functor);
  t.args_ = std::move(args);
  return t;
}

Term Term::list(std::vector<Term> elems) {
  if (elems.empty()) return Term::atom("[]");
  Term t;
  t.kind_ = Kind::Compound;
  t.name_ = "[]";
  t.args_ = std::move(elems);
  return t;
}

bool Term::is_ground() const {
  switch (kind_) {
    case Kind::Var:
      return false;
    case Kind::Compound:
      for (const Term& a : args_)
        if (!a.is_ground()) return false;
      return true;
    default:
      return true;
  }
}

bool Term::operator==(const Term& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Number:
      return value_ == other.value_;
    case Kind::Atom:
    case Kind::Var:
      return name_ == other.name_;
    case Kind::Compound:
      return name_ == other.name_ && args_ == other.args_;
  }
  return false;
}

bool Term::operator<(const Term& other) const {
  if (kind_ != other.kind_) return kind_ < other.kind_;
  switch (kind_) {
    case Kind::Number:
      return value_ < other.value_;
    case Kind::Atom:
    case Kind::Var:
      return name_ < other.name_;
    case Kind::Compound:
      if (name_ != other.name_) return name_ < other.name_;
      return args_ < other.args_;
  }
  return false;
}

std::string Term::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      return os << t.name();
    case Term::Kind::Number:
      return os << t.value();
    case Term::Kind::Var:
      return os << t.name();
    case Term::Kind::Compound: {
      if (t.is_list()) {
        os << '[';
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          if (i) os << ',';
          os << t.args()[i];
        }
        return os << ']';
      }
      if (t.name() == "@" && t.arity() == 1) return os << '@' << t.args()[0];
      os << t.name() << '(';
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) os << ',';
        os << t.args()[i];
      }
      return os << ')';
    }
  }
  return os;
}

bool Substitution::bind(const std::string& name, const Term& value) {
  auto [it, inserted] = map_.emplace(name, value);
  return inserted || it->second == value;
}

const Term* Substitution::lookup(const std::string& name) const {
  auto it = map_.find(name);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  switch (t.kind()) {
    case Term::Kind::Var: {
      if (t.is_anon()) return t;
      const Term* bound = lookup(t.name());
      return bound ? *bound : t;
    }
    case Term::Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(apply(a));
      return Term::compound(t.name(), std::move(args));
    }
    default:
      return t;
  }
}

std::string Substitution::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [name, value] : map_) {
    if (!first) os << ", ";
    first = false;
    os << name << " -> " << value;
  }
  os << '}';
  return os.str();
}

bool match_into(const Term& pattern, const Term& ground, Substitution& subst) {
  if (pattern.is_var()) {
    if (pattern.is_anon()) return true;
    return subst.bind(pattern.name(), ground);
  }
  if (ground.is_var()) {
    // Quoted variable on the ground side: only "_" (handled above) or an
    // identically named variable pattern can stand for it.
    return false;
  }
  switch (pattern.kind()) {
    case Term::Kind::Atom:
      return ground.is_atom() && pattern.name() == ground.name();
    case Term::Kind::Number:
      return ground.is_number() && pattern.value() == ground.value();
    case Term::Kind::Compound: {
      if (!ground.is_compound() || pattern.name() != ground.name() ||
          pattern.arity() != ground.arity())
        return false;
      for (std::size_t i = 0; i < pattern.arity(); ++i)
        if (!match_into(pattern.args()[i], ground.args()[i], subst)) return false;
      return true;
    }
    default:
      return false;
  }
}

std::optional<Substitution> match(const Term& pattern, const Term& ground) {
  Substitution s;
  if (match_into(pattern, ground, s)) return s;
  return std::nullopt;
}

long long eval_arith(const Term& expr, const Substitution& bindings) {
  switch (expr.kind()) {
    case Term::Kind::Number:
      return expr.value();
    case Term::Kind::Var: {
      const Term* bound = bindings.lookup(expr.name());
      if (!bound) throw eval_error("unbound variable in arithmetic: " + expr.name());
      return eval_arith(*bound, bindings);
    }
    case Term::Kind::Compound: {
      if (expr.arity() == 2) {
        long long a = eval_arith(expr.args()[0], bindings);
        long long b = eval_arith(expr.args()[1], bindings);
        if (expr.name() == "plus") return a + b;
        if (expr.name() == "minus") return a - b;
        if (expr.name() == "min") return a < b ? a : b;
      }
      throw eval_error("unknown arithmetic functor: " + expr.name() + "/" +
                       std::to_string(expr.arity()));
    }
    default:
      throw eval_error("not an arithmetic term: " + expr.str());
  }
}

// ---------------------------------------------------------------------------
// TermReader

void TermReader::skip_ws() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '%') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else {
      break;
    }
  }
}

bool TermReader::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

bool TermReader::try_consume(std::string_view token) {
  skip_ws();
  if (text_.substr(pos_, token.size()) == token) {
    pos_ += token.size();
    return true;
  }
  return false;
}

void TermReader::expect(std::string_view token) {
  if (!try_consume(token))
    throw parse_error("expected '" + std::string(token) + "'", pos_);
}

static bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

Term TermReader::read_term() {
  skip_ws();
  return read_term_inner();
}

Term TermReader::read_term_inner() {
  skip_ws();
  if (pos_ >= text_.size()) throw parse_error("unexpected end of input", pos_);
  char c = text_[pos_];

  if (c == '[') {
    ++pos_;
    std::vector<Term> elems;
    if (try_consume("]")) return Term::list({});
    do {
      elems.push_back(read_term_inner());
    } while (try_consume(","));
    expect("]");
    return Term::list(std::move(elems));
  }

  if (c == '@') {
    ++pos_;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (start == pos_ || !std::islower(static_cast<unsigned char>(text_[start])))
      throw parse_error("expected label atom after '@'", pos_);
    return Term::compound("@", {Term::atom(std::string(text_.substr(start, pos_ - start)))});
  }

  if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t start = pos_;
    if (c == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw parse_error("expected digits", pos_);
    return Term::number(std::stoll(std::string(text_.substr(start, pos_ - start))));
  }

  if (ident_char(c)) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    bool is_variable = std::isupper(static_cast<unsigned char>(c)) || c == '_';
    if (pos_ < text_.size() && text_[pos_] == '(') {
      if (is_variable) throw parse_error("variable cannot be a functor: " + name, start);
      ++pos_;
      std::vector<Term> args;
      do {
        args.push_back(read_term_inner());
      } while (try_consume(","));
      expect(")");
      return Term::compound(std::move(name), std::move(args));
    }
    if (name == "_" ) return Term::var("_");
    if (is_variable) return Term::var(std::move(name));
    return Term::atom(std::move(name));
  }

  throw parse_error(std::string("unexpected character '") + c + "'", pos_);
}

Term Term::parse(std::string_view text) {
  TermReader reader(text);
  Term t = reader.read_term();
  if (!reader.at_end())
    throw parse_error("trailing input after term", reader.pos());
  return t;
}

}  // namespace ppsim
