#pragma once

// First-order language over {<P, <V, =}: AST, recursive-descent parser,
// canonical printer, quantifier rank, Tarskian evaluation on permutations,
// the built-in formula library and a seeded random-sentence generator.
//
// Grammar (one sentence per file, '#' comments):
//   formula := "A" var "." formula | "E" var "." formula
//            | formula binop formula | "!" formula | "(" formula ")" | atom
//   binop   := "&" | "|" | "->" | "<->"        (precedence ! > & > | > -> > <->)
//   atom    := var "<P" var | var "<V" var | var "=" var
//   var     := [a-z][a-z0-9_]*
// Quantifier bodies extend maximally to the right. "->" and "<->" are
// desugared at parse time, so quantifier-rank needs only the four base rules.

#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avperm/perm.hpp"
#include "avperm/rng.hpp"

namespace avperm {

enum class Rel { LtP, LtV, Eq };

inline std::string rel_name(Rel r) {
  switch (r) {
    case Rel::LtP: return "<P";
    case Rel::LtV: return "<V";
    default: return "=";
  }
}

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  enum Kind { Atom, Not, And, Or, Implies, Iff, Forall, Exists } kind;
  // Atom
  Rel rel = Rel::Eq;
  std::string lhs, rhs;
  // connectives / quantifiers
  Formula a, b;
  std::string var;
};

inline Formula mk_atom(std::string l, Rel r, std::string rr) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Atom;
  n->rel = r;
  n->lhs = std::move(l);
  n->rhs = std::move(rr);
  return n;
}
inline Formula mk_not(Formula x) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Not;
  n->a = std::move(x);
  return n;
}
inline Formula mk_bin(Node::Kind k, Formula x, Formula y) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(x);
  n->b = std::move(y);
  return n;
}
inline Formula mk_and(Formula x, Formula y) { return mk_bin(Node::And, std::move(x), std::move(y)); }
inline Formula mk_or(Formula x, Formula y) { return mk_bin(Node::Or, std::move(x), std::move(y)); }
inline Formula mk_quant(Node::Kind k, std::string v, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->var = std::move(v);
  n->a = std::move(body);
  return n;
}
inline Formula mk_forall(std::string v, Formula body) { return mk_quant(Node::Forall, std::move(v), std::move(body)); }
inline Formula mk_exists(std::string v, Formula body) { return mk_quant(Node::Exists, std::move(v), std::move(body)); }

inline bool formula_equal(const Formula& x, const Formula& y) {
  if (x == y) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case Node::Atom: return x->rel == y->rel && x->lhs == y->lhs && x->rhs == y->rhs;
    case Node::Not: return formula_equal(x->a, y->a);
    case Node::Forall:
    case Node::Exists: return x->var == y->var && formula_equal(x->a, y->a);
    default: return formula_equal(x->a, y->a) && formula_equal(x->b, y->b);
  }
}

inline void collect_free_variables(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (f->kind) {
    case Node::Atom:
      for (const auto* v : {&f->lhs, &f->rhs})
        if (std::find(bound.begin(), bound.end(), *v) == bound.end()) out.insert(*v);
      return;
    case Node::Not: collect_free_variables(f->a, bound, out); return;
    case Node::Forall:
    case Node::Exists:
      bound.push_back(f->var);
      collect_free_variables(f->a, bound, out);
      bound.pop_back();
      return;
    default:
      collect_free_variables(f->a, bound, out);
      collect_free_variables(f->b, bound, out);
      return;
  }
}

inline std::set<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free_variables(f, bound, out);
  return out;
}

inline int quantifier_rank(const Formula& f) {
  switch (f->kind) {
    case Node::Atom: return 0;
    case Node::Not: return quantifier_rank(f->a);
    case Node::Forall:
    case Node::Exists: return quantifier_rank(f->a) + 1;
    default: return std::max(quantifier_rank(f->a), quantifier_rank(f->b));
  }
}

// Canonical printing: binary operands always parenthesized, '!' operand
// parenthesized, quantifier bodies printed bare (they extend maximally).
inline std::string print_formula(const Formula& f) {
  switch (f->kind) {
    case Node::Atom: return f->lhs + " " + rel_name(f->rel) + " " + f->rhs;
    case Node::Not: return "!(" + print_formula(f->a) + ")";
    case Node::And: return "(" + print_formula(f->a) + ") & (" + print_formula(f->b) + ")";
    case Node::Or: return "(" + print_formula(f->a) + ") | (" + print_formula(f->b) + ")";
    case Node::Implies: return "(" + print_formula(f->a) + ") -> (" + print_formula(f->b) + ")";
    case Node::Iff: return "(" + print_formula(f->a) + ") <-> (" + print_formula(f->b) + ")";
    case Node::Forall: return "A " + f->var + ". " + print_formula(f->a);
    default: return "E " + f->var + ". " + print_formula(f->a);
  }
}

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos) : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

namespace detail {

struct Token {
  enum Type { ForallKw, ExistsKw, Dot, LParen, RParen, Bang, AndOp, OrOp, ImpOp, IffOp, RelP, RelV, RelEq, Var, End } type;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else {
        break;
      }
    }
    size_t start = i_;
    if (i_ >= s_.size()) {
      tok_ = {Token::End, "", start};
      return;
    }
    char c = s_[i_];
    auto one = [&](Token::Type t) {
      ++i_;
      tok_ = {t, s_.substr(start, 1), start};
    };
    switch (c) {
      case '.': one(Token::Dot); return;
      case '(': one(Token::LParen); return;
      case ')': one(Token::RParen); return;
      case '!': one(Token::Bang); return;
      case '&': one(Token::AndOp); return;
      case '|': one(Token::OrOp); return;
      case '=': one(Token::RelEq); return;
      case '-':
        if (i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
          i_ += 2;
          tok_ = {Token::ImpOp, "->", start};
          return;
        }
        throw ParseError("expected '->'", start);
      case '<':
        if (i_ + 2 < s_.size() + 1 && i_ + 1 < s_.size()) {
          char d = s_[i_ + 1];
          if (d == 'P') {
            i_ += 2;
            tok_ = {Token::RelP, "<P", start};
            return;
          }
          if (d == 'V') {
            i_ += 2;
            tok_ = {Token::RelV, "<V", start};
            return;
          }
          if (d == '-' && i_ + 2 < s_.size() && s_[i_ + 2] == '>') {
            i_ += 3;
            tok_ = {Token::IffOp, "<->", start};
            return;
          }
        }
        throw ParseError("expected '<P', '<V' or '<->'", start);
      case 'A':
        ++i_;
        tok_ = {Token::ForallKw, "A", start};
        return;
      case 'E':
        ++i_;
        tok_ = {Token::ExistsKw, "E", start};
        return;
      default:
        if (c >= 'a' && c <= 'z') {
          size_t j = i_ + 1;
          while (j < s_.size() && (std::islower(static_cast<unsigned char>(s_[j])) || std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
          tok_ = {Token::Var, s_.substr(i_, j - i_), start};
          i_ = j;
          return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  Token tok_{Token::End, "", 0};
};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  Formula parse_formula() {
    auto t = lex_.peek();
    if (t.type == Token::ForallKw || t.type == Token::ExistsKw) return parse_quant();
    return parse_iff();
  }

  void expect_end() {
    if (lex_.peek().type != Token::End) throw ParseError("expected end of input", lex_.peek().pos);
  }

 private:
  Formula parse_quant() {
    auto kw = lex_.take();
    auto v = lex_.take();
    if (v.type != Token::Var) throw ParseError("expected variable after quantifier", v.pos);
    auto dot = lex_.take();
    if (dot.type != Token::Dot) throw ParseError("expected '.' after quantified variable", dot.pos);
    Formula body = parse_formula();  // maximal right extent
    return mk_quant(kw.type == Token::ForallKw ? Node::Forall : Node::Exists, v.text, std::move(body));
  }

  Formula parse_iff() {
    Formula a = parse_imp();
    while (lex_.peek().type == Token::IffOp) {
      lex_.take();
      Formula b = parse_imp();
      // a <-> b  becomes (a & b) | (!a & !b)
      a = mk_or(mk_and(a, b), mk_and(mk_not(a), mk_not(b)));
    }
    return a;
  }

  Formula parse_imp() {
    Formula a = parse_or();
    if (lex_.peek().type == Token::ImpOp) {
      lex_.take();
      Formula b = parse_imp();  // right associative
      return mk_or(mk_not(std::move(a)), std::move(b));
    }
    return a;
  }

  Formula parse_or() {
    Formula a = parse_and();
    while (lex_.peek().type == Token::OrOp) {
      lex_.take();
      a = mk_or(std::move(a), parse_and());
    }
    return a;
  }

  Formula parse_and() {
    Formula a = parse_unary();
    while (lex_.peek().type == Token::AndOp) {
      lex_.take();
      a = mk_and(std::move(a), parse_unary());
    }
    return a;
  }

  Formula parse_unary() {
    auto t = lex_.peek();
    switch (t.type) {
      case Token::Bang:
        lex_.take();
        return mk_not(parse_unary());
      case Token::LParen: {
        lex_.take();
        Formula f = parse_formula();
        auto r = lex_.take();
        if (r.type != Token::RParen) throw ParseError("expected ')'", r.pos);
        return f;
      }
      case Token::ForallKw:
      case Token::ExistsKw:
        return parse_quant();
      case Token::Var:
        return parse_atom();
      default:
        throw ParseError("expected formula (one of '!', '(', 'A', 'E', variable)", t.pos);
    }
  }

  Formula parse_atom() {
    auto l = lex_.take();
    auto op = lex_.take();
    Rel rel;
    if (op.type == Token::RelP)
      rel = Rel::LtP;
    else if (op.type == Token::RelV)
      rel = Rel::LtV;
    else if (op.type == Token::RelEq)
      rel = Rel::Eq;
    else
      throw ParseError("expected '<P', '<V' or '=' in atom", op.pos);
    auto r = lex_.take();
    if (r.type != Token::Var) throw ParseError("expected variable on right side of atom", r.pos);
    return mk_atom(l.text, rel, r.text);
  }

  Lexer lex_;
};

}  // namespace detail

// Parses a formula; free variables allowed (builtins use them pointwise).
inline Formula parse_formula_text(const std::string& text) {
  detail::Parser p(text);
  Formula f = p.parse_formula();
  p.expect_end();
  return f;
}

// Parses a sentence; rejects free variables with a named diagnostic.
inline Formula parse_sentence(const std::string& text) {
  Formula f = parse_formula_text(text);
  auto fv = free_variables(f);
  if (!fv.empty()) {
    std::string names;
    for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
    throw std::invalid_argument("not a sentence: free variables " + names);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Evaluation on permutations: domain {1..n}, <P position order, <V value order.

namespace detail {

struct Env {
  std::vector<std::pair<std::string, int>> binding;
  int lookup(const std::string& v) const {
    for (auto it = binding.rbegin(); it != binding.rend(); ++it)
      if (it->first == v) return it->second;
    throw std::invalid_argument("unbound variable " + v);
  }
};

inline bool eval_node(const Formula& f, const Permutation& perm, Env& env) {
  switch (f->kind) {
    case Node::Atom: {
      int x = env.lookup(f->lhs), y = env.lookup(f->rhs);
      switch (f->rel) {
        case Rel::LtP: return x < y;
        case Rel::LtV: return perm.at(x) < perm.at(y);
        default: return x == y;
      }
    }
    case Node::Not: return !eval_node(f->a, perm, env);
    case Node::And: return eval_node(f->a, perm, env) && eval_node(f->b, perm, env);
    case Node::Or: return eval_node(f->a, perm, env) || eval_node(f->b, perm, env);
    case Node::Implies: return !eval_node(f->a, perm, env) || eval_node(f->b, perm, env);
    case Node::Iff: return eval_node(f->a, perm, env) == eval_node(f->b, perm, env);
    case Node::Forall:
    case Node::Exists: {
      bool want = f->kind == Node::Exists;
      env.binding.push_back({f->var, 0});
      for (int d = 1; d <= perm.size(); ++d) {
        env.binding.back().second = d;
        if (eval_node(f->a, perm, env) == want) {
          env.binding.pop_back();
          return want;
        }
      }
      env.binding.pop_back();
      return !want;
    }
  }
  throw std::logic_error("eval_node: bad node kind");
}

}  // namespace detail

inline bool evaluate(const Formula& sentence, const Permutation& perm) {
  detail::Env env;
  return detail::eval_node(sentence, perm, env);
}

// Pointwise evaluation of a one-free-variable formula: the set of positions
// satisfying it.
inline std::vector<int> satisfying_positions(const Formula& f, const std::string& var, const Permutation& perm) {
  detail::Env env;
  env.binding.push_back({var, 0});
  std::vector<int> out;
  for (int d = 1; d <= perm.size(); ++d) {
    env.binding.back().second = d;
    if (detail::eval_node(f, perm, env)) out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in formulas.

namespace builtins {

inline Formula gt_p(const std::string& x, const std::string& y) { return mk_atom(y, Rel::LtP, x); }
inline Formula gt_v(const std::string& x, const std::string& y) { return mk_atom(y, Rel::LtV, x); }

// no three entries in decreasing order
inline Formula phi1() {
  Formula body = mk_and(mk_and(mk_atom("x", Rel::LtP, "y"), mk_atom("y", Rel::LtP, "z")),
                        mk_and(mk_atom("y", Rel::LtV, "x"), mk_atom("z", Rel::LtV, "y")));
  return mk_not(mk_exists("x", mk_exists("y", mk_exists("z", body))));
}

// there exists an inversion
inline Formula phi2() {
  return mk_exists("x", mk_exists("y", mk_and(mk_atom("x", Rel::LtP, "y"), mk_atom("y", Rel::LtV, "x"))));
}

// x exceeds in value everything positioned before it
inline Formula left_max(const std::string& x, int& fresh) {
  std::string y = "v" + std::to_string(fresh++);
  return mk_forall(y, mk_or(mk_not(mk_atom(y, Rel::LtP, x)), mk_atom(y, Rel::LtV, x)));
}

// x is followed by a smaller value
inline Formula inverted_later(const std::string& x, int& fresh) {
  std::string y = "v" + std::to_string(fresh++);
  return mk_exists(y, mk_and(mk_atom(x, Rel::LtP, y), mk_atom(y, Rel::LtV, x)));
}

// The entry at the rightmost descent: a left maximum inverted by a later
// entry, with no such entry to its right.
inline Formula omega(const std::string& x, int& fresh) {
  Formula first = left_max(x, fresh);
  Formula second = inverted_later(x, fresh);
  std::string w = "v" + std::to_string(fresh++);
  Formula w_cand = mk_and(left_max(w, fresh), inverted_later(w, fresh));
  Formula third = mk_not(mk_exists(w, mk_and(w_cand, gt_p(w, x))));
  return mk_and(mk_and(first, second), third);
}

// psi_1(x): right of the rightmost descent, or everything when there is none.
inline Formula psi(int i, const std::string& x, int& fresh);

inline Formula psi1(const std::string& x, int& fresh) {
  std::string y = "v" + std::to_string(fresh++);
  Formula some = mk_exists(y, mk_and(omega(y, fresh), gt_p(x, y)));
  std::string y2 = "v" + std::to_string(fresh++);
  Formula none = mk_not(mk_exists(y2, omega(y2, fresh)));
  return mk_or(some, none);
}

inline Formula not_in_earlier_boxes(int upto, const std::string& x, int& fresh) {
  Formula acc = mk_not(psi(1, x, fresh));
  for (int j = 2; j <= upto; ++j) acc = mk_and(acc, mk_not(psi(j, x, fresh)));
  return acc;
}

// phi_{2i}(x): inverted by a later entry and outside psi_1..psi_{2i-2}
inline Formula phi_box(int two_i, const std::string& x, int& fresh) {
  if (two_i < 4 || two_i % 2 != 0) throw std::invalid_argument("phi_box: index must be even and >= 4");
  return mk_and(inverted_later(x, fresh), not_in_earlier_boxes(two_i - 2, x, fresh));
}

inline Formula psi(int i, const std::string& x, int& fresh) {
  if (i < 1) throw std::invalid_argument("psi: index must be >= 1");
  if (i == 1) return psi1(x, fresh);
  if (i == 2) {
    std::string y = "v" + std::to_string(fresh++);
    Formula above = mk_exists(y, mk_and(psi(1, y, fresh), gt_v(x, y)));
    return mk_and(above, mk_not(psi(1, x, fresh)));
  }
  if (i % 2 == 1) {
    // psi_{2j-1}: nonempty phi_{2j}, positioned after all of it, outside
    // earlier boxes. The nonemptiness guard keeps later boxes empty when no
    // inverted entry remains, matching the combinatorial extraction.
    std::string w = "v" + std::to_string(fresh++);
    Formula nonempty = mk_exists(w, phi_box(i + 1, w, fresh));
    std::string y = "v" + std::to_string(fresh++);
    Formula after_all = mk_forall(y, mk_or(mk_not(phi_box(i + 1, y, fresh)), gt_p(x, y)));
    return mk_and(mk_and(nonempty, after_all), not_in_earlier_boxes(i - 1, x, fresh));
  }
  // psi_{2j}: in phi_{2j}, above some psi_{2j-1} value
  std::string y = "v" + std::to_string(fresh++);
  Formula above = mk_exists(y, mk_and(psi(i - 1, y, fresh), gt_v(x, y)));
  return mk_and(phi_box(i, x, fresh), above);
}

}  // namespace builtins

// Named access: phi1/phi2 are closed; omega/psi(i)/box(i) carry the free
// variable "x"; "box i" closures (E x. psi_i(x)) feed the sentence batteries.
inline Formula builtin(const std::string& name, int i = 0) {
  int fresh = 0;
  if (name == "phi1") return builtins::phi1();
  if (name == "phi2") return builtins::phi2();
  if (name == "omega") return builtins::omega("x", fresh);
  if (name == "psi") return builtins::psi(i, "x", fresh);
  if (name == "box") return mk_exists("x", builtins::psi(i, "x", fresh));
  throw std::invalid_argument("unknown builtin '" + name + "'");
}

// ---------------------------------------------------------------------------
// Random sentences: deterministic for a given seed, quantifier rank bounded
// by qr_bound and node count by size_bound. The grammar has no nullary
// connectives, so qr_bound = 0 falls back to canonical constant-truth forms
// (one quantifier deep).
inline Formula random_sentence(int qr_bound, int size_bound, std::uint64_t seed) {
  if (qr_bound < 0) throw std::invalid_argument("random_sentence: qr_bound must be >= 0");
  Rng rng = Rng::stream(seed, "random-sentence");
  if (qr_bound == 0) {
    Formula triv = mk_forall("v0", mk_atom("v0", Rel::Eq, "v0"));
    return rng.below(2) == 0 ? triv : mk_not(triv);
  }
  std::function<Formula(int, int, int)> gen = [&](int qr_left, int size_left, int depth) -> Formula {
    auto var_of = [](int d) { return "v" + std::to_string(d); };
    bool can_atom = depth > 0;
    bool can_quant = qr_left > 0 && size_left >= 2;
    bool can_branch = size_left >= 3 && can_atom;
    if (!can_atom) {
      // nothing in scope yet: must quantify
      std::string v = var_of(depth);
      Formula body = gen(qr_left - 1, size_left - 1, depth + 1);
      return rng.below(2) == 0 ? mk_exists(v, std::move(body)) : mk_forall(v, std::move(body));
    }
    unsigned choice = static_cast<unsigned>(rng.below(100));
    if (can_quant && choice < 30) {
      std::string v = var_of(depth);
      Formula body = gen(qr_left - 1, size_left - 1, depth + 1);
      return choice < 15 ? mk_exists(v, std::move(body)) : mk_forall(v, std::move(body));
    }
    if (can_branch && choice < 60) {
      int lsize = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size_left - 2)));
      Formula a = gen(qr_left, lsize, depth);
      Formula b = gen(qr_left, size_left - 1 - lsize, depth);
      return choice < 45 ? mk_and(std::move(a), std::move(b)) : mk_or(std::move(a), std::move(b));
    }
    if (size_left >= 2 && choice < 75) return mk_not(gen(qr_left, size_left - 1, depth));
    // atom over in-scope variables
    auto pick = [&]() { return var_of(static_cast<int>(rng.below(static_cast<std::uint64_t>(depth)))); };
    Rel rels[3] = {Rel::LtP, Rel::LtV, Rel::Eq};
    return mk_atom(pick(), rels[rng.below(3)], pick());
  };
  return gen(qr_bound, std::max(size_bound, 2), 0);
}

}  // namespace avperm
