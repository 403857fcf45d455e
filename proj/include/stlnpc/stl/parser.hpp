// Copyright 2026 The stlnpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STLNPC_STL_PARSER_HPP_
#define STLNPC_STL_PARSER_HPP_

/**
 * @file
 * @brief Text syntax for formulas.
 *
 *   formula    := implies
 *   implies    := disj ( "->" implies )?
 *   disj       := conj ( "|" conj )*
 *   conj       := until ( "&" until )*
 *   until      := unary ( "U" interval unary )?
 *   unary      := "!" unary | ("G" | "F") interval unary | primary
 *   primary    := "true" | "(" formula ")" | expr cmp expr
 *   cmp        := ">=" | ">" | "<=" | "<"
 *   interval   := "[" int "," int "]"
 *   expr       := term (("+" | "-") term)*
 *   term       := factor ("*" factor | "%" number)*
 *   factor     := "-" factor | atom ("^2")*
 *   atom       := number | channel | "abs(" expr ")"
 *               | "norm2(" expr ("," expr)* ")" | "(" expr ")"
 *
 * Comparisons are normalised to predicates `mu >= 0`: `a >= b` and `a > b`
 * become `a - b`, `a <= b` and `a < b` become `b - a`, and a literal zero on
 * the far side is dropped. `#` starts a comment that runs to end of line.
 */

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"
#include "stlnpc/stl/formula.hpp"

namespace stlnpc::stl {

namespace detail {

struct Token {
  enum class Kind { kIdent, kNumber, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      tok.kind = Token::Kind::kIdent;
      tok.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) {
        ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      tok.kind = Token::Kind::kNumber;
      tok.text = text.substr(i, j - i);
      try {
        tok.number = parse_double(tok.text);
      } catch (const ConfigError&) {
        throw ParseError("malformed number '" + tok.text + "'", line, col);
      }
      advance(j - i);
    } else {
      static const char* kTwo[] = {"->", ">=", "<="};
      tok.kind = Token::Kind::kSymbol;
      for (const char* two : kTwo) {
        if (text.compare(i, 2, two) == 0) tok.text = two;
      }
      if (tok.text.empty()) {
        if (std::string("()[],&|!+-*^%<>").find(c) == std::string::npos) {
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        tok.text = std::string(1, c);
      }
      advance(tok.text.size());
    }
    out.push_back(tok);
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& schema)
      : toks_(tokenize(text)), schema_(schema) {}

  Formula parse() {
    Formula f = implies();
    if (peek().kind != Token::Kind::kEnd) fail("unexpected '" + peek().text + "'");
    return f;
  }

  Expr parse_expr_only() {
    Expr e = expr();
    if (peek().kind != Token::Kind::kEnd) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is_symbol(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::kSymbol && t.text == s;
  }
  bool is_ident(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::kIdent && t.text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.column);
  }
  void expect(const char* s) {
    if (!is_symbol(s)) {
      fail(std::string("expected '") + s + "'" +
           (peek().kind == Token::Kind::kEnd ? " before end of input"
                                              : ", found '" + peek().text + "'"));
    }
    ++pos_;
  }

  Formula implies() {
    Formula lhs = disj();
    if (is_symbol("->")) {
      ++pos_;
      return Implies(std::move(lhs), implies());
    }
    return lhs;
  }

  Formula disj() {
    std::vector<Formula> parts{conj()};
    while (is_symbol("|")) {
      ++pos_;
      parts.push_back(conj());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Or(std::move(parts));
  }

  Formula conj() {
    std::vector<Formula> parts{until()};
    while (is_symbol("&")) {
      ++pos_;
      parts.push_back(until());
    }
    return parts.size() == 1 ? std::move(parts[0]) : And(std::move(parts));
  }

  Formula until() {
    Formula lhs = unary();
    if (is_ident("U") && is_symbol("[", 1)) {
      ++pos_;
      Interval i = interval();
      return Until(i, std::move(lhs), unary());
    }
    return lhs;
  }

  Formula unary() {
    if (is_symbol("!")) {
      ++pos_;
      return Not(unary());
    }
    if ((is_ident("G") || is_ident("F")) && is_symbol("[", 1)) {
      const bool always = peek().text == "G";
      ++pos_;
      Interval i = interval();
      Formula child = unary();
      return always ? Always(i, std::move(child)) : Eventually(i, std::move(child));
    }
    return primary();
  }

  Interval interval() {
    const Token open = peek();
    expect("[");
    const int lo = integer();
    expect(",");
    const int hi = integer();
    expect("]");
    if (hi < lo) {
      throw ParseError("interval [" + std::to_string(lo) + "," + std::to_string(hi) +
                           "] has hi < lo",
                       open.line, open.column);
    }
    return {lo, hi};
  }

  int integer() {
    const Token& t = peek();
    if (t.kind != Token::Kind::kNumber || t.number != static_cast<int>(t.number) ||
        t.number < 0) {
      fail("expected a non-negative integer step count");
    }
    ++pos_;
    return static_cast<int>(t.number);
  }

  Formula primary() {
    if (is_ident("true")) {
      ++pos_;
      return True();
    }
    if (is_symbol("(")) {
      const std::size_t save = pos_;
      try {
        ++pos_;
        Formula f = implies();
        expect(")");
        return f;
      } catch (const ParseError& e) {
        const std::size_t reached = pos_;
        pos_ = save;
        try {
          return comparison();
        } catch (const ParseError&) {
          if (pos_ >= reached) throw;
          throw e;
        }
      }
    }
    return comparison();
  }

  Formula comparison() {
    Expr lhs = expr();
    const Token& t = peek();
    if (t.kind != Token::Kind::kSymbol ||
        (t.text != ">=" && t.text != ">" && t.text != "<=" && t.text != "<")) {
      fail("expected a comparison (>=, >, <=, <)" +
           (t.kind == Token::Kind::kEnd ? std::string(" before end of input")
                                        : ", found '" + t.text + "'"));
    }
    const bool greater = t.text[0] == '>';
    ++pos_;
    Expr rhs = expr();
    auto is_zero = [](const Expr& e) {
      return e.kind == Expr::Kind::kConst && e.value == 0.0;
    };
    if (greater) return Pred(is_zero(rhs) ? std::move(lhs) : std::move(lhs) - std::move(rhs));
    return Pred(is_zero(lhs) ? std::move(rhs) : std::move(rhs) - std::move(lhs));
  }

  Expr expr() {
    Expr e = term();
    while (is_symbol("+") || is_symbol("-")) {
      const bool plus = peek().text == "+";
      ++pos_;
      Expr r = term();
      e = plus ? std::move(e) + std::move(r) : std::move(e) - std::move(r);
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (is_symbol("*")) {
        ++pos_;
        e = std::move(e) * factor();
      } else if (is_symbol("%")) {
        ++pos_;
        const Token& t = peek();
        if (t.kind != Token::Kind::kNumber || !(t.number > 0.0)) {
          fail("modulus must be a positive number");
        }
        ++pos_;
        e = Mod(std::move(e), t.number);
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (is_symbol("-")) {
      ++pos_;
      if (peek().kind == Token::Kind::kNumber && !is_symbol("^", 1)) {
        const double v = peek().number;
        ++pos_;
        return Const(-v);
      }
      return -factor();
    }
    Expr e = atom();
    while (is_symbol("^")) {
      ++pos_;
      const Token& t = peek();
      if (t.kind != Token::Kind::kNumber || t.number != 2.0) fail("only ^2 is supported");
      ++pos_;
      e = Square(std::move(e));
    }
    return e;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kNumber) {
      ++pos_;
      return Const(t.number);
    }
    if (is_symbol("(")) {
      ++pos_;
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Token::Kind::kIdent) {
      if (t.text == "abs" && is_symbol("(", 1)) {
        pos_ += 2;
        Expr e = expr();
        expect(")");
        return Abs(std::move(e));
      }
      if (t.text == "norm2" && is_symbol("(", 1)) {
        pos_ += 2;
        std::vector<Expr> args{expr()};
        while (is_symbol(",")) {
          ++pos_;
          args.push_back(expr());
        }
        expect(")");
        return Norm2(std::move(args));
      }
      auto it = std::find(schema_.begin(), schema_.end(), t.text);
      if (it == schema_.end()) fail("unknown channel '" + t.text + "'");
      ++pos_;
      return Ch(t.text, static_cast<int>(it - schema_.begin()));
    }
    fail(t.kind == Token::Kind::kEnd ? "unexpected end of input"
                                     : "unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& schema_;
  std::size_t pos_ = 0;
};

inline int expr_prec(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kAdd:
    case K::kSub:
      return 1;
    case K::kMul:
    case K::kMod:
      return 2;
    case K::kNeg:
      return 3;
    case K::kSquare:
      return 4;
    case K::kConst:
      return e.value < 0.0 || std::signbit(e.value) ? 3 : 5;
    default:
      return 5;
  }
}

inline void print_expr(std::ostringstream& os, const Expr& e);

inline void print_wrapped(std::ostringstream& os, const Expr& e, bool wrap) {
  if (wrap) os << '(';
  print_expr(os, e);
  if (wrap) os << ')';
}

inline void print_expr(std::ostringstream& os, const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConst:
      os << format_double(e.value);
      break;
    case K::kChannel:
      os << e.name;
      break;
    case K::kNeg:
      os << '-';
      print_wrapped(os, e.args[0],
                    expr_prec(e.args[0]) < 3 || e.args[0].kind == K::kConst);
      break;
    case K::kAdd:
    case K::kSub:
      print_wrapped(os, e.args[0], false);
      os << (e.kind == K::kAdd ? " + " : " - ");
      print_wrapped(os, e.args[1], expr_prec(e.args[1]) <= 1);
      break;
    case K::kMul:
      print_wrapped(os, e.args[0], expr_prec(e.args[0]) < 2);
      os << " * ";
      print_wrapped(os, e.args[1], expr_prec(e.args[1]) <= 2);
      break;
    case K::kMod:
      print_wrapped(os, e.args[0], expr_prec(e.args[0]) < 2);
      os << " % " << format_double(e.value);
      break;
    case K::kSquare:
      print_wrapped(os, e.args[0], expr_prec(e.args[0]) < 4);
      os << "^2";
      break;
    case K::kAbs:
      os << "abs(";
      print_expr(os, e.args[0]);
      os << ')';
      break;
    case K::kNorm2:
      os << "norm2(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e.args[i]);
      }
      os << ')';
      break;
  }
}

inline int formula_prec(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::kImplies:
      return 1;
    case K::kOr:
      return 2;
    case K::kAnd:
      return 3;
    case K::kUntil:
      return 4;
    default:
      return 5;
  }
}

inline void print_formula(std::ostringstream& os, const Formula& f);

inline void print_child(std::ostringstream& os, const Formula& f, bool wrap) {
  if (wrap) os << '(';
  print_formula(os, f);
  if (wrap) os << ')';
}

inline void print_interval(std::ostringstream& os, const Interval& i) {
  os << '[' << i.lo << ',' << i.hi << ']';
}

inline void print_formula(std::ostringstream& os, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::kTrue:
      os << "true";
      break;
    case K::kPred:
      print_expr(os, f.pred);
      os << " >= 0";
      break;
    case K::kNot:
      os << '!';
      print_child(os, f.children[0], true);
      break;
    case K::kAnd:
    case K::kOr: {
      const int p = formula_prec(f);
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) os << (f.kind == K::kAnd ? " & " : " | ");
        print_child(os, f.children[i], formula_prec(f.children[i]) <= p);
      }
      break;
    }
    case K::kImplies:
      print_child(os, f.children[0], formula_prec(f.children[0]) <= 1);
      os << " -> ";
      print_child(os, f.children[1], false);
      break;
    case K::kUntil:
      print_child(os, f.children[0], true);
      os << " U";
      print_interval(os, f.interval);
      os << ' ';
      print_child(os, f.children[1], true);
      break;
    case K::kEventually:
    case K::kAlways:
      os << (f.kind == K::kAlways ? 'G' : 'F');
      print_interval(os, f.interval);
      os << ' ';
      print_child(os, f.children[0], true);
      break;
  }
}

}  // namespace detail

/// Parses `text`; every channel must appear in `schema`, and the result is
/// bound to it.
inline Formula parse_formula(const std::string& text,
                             const std::vector<std::string>& schema) {
  return detail::Parser(text, schema).parse();
}

inline Expr parse_expr(const std::string& text, const std::vector<std::string>& schema) {
  return detail::Parser(text, schema).parse_expr_only();
}

/// Canonical text; parse_formula(pretty_print(f)) == f.
inline std::string pretty_print(const Formula& f) {
  std::ostringstream os;
  detail::print_formula(os, f);
  return os.str();
}

inline std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  detail::print_expr(os, e);
  return os.str();
}

}  // namespace stlnpc::stl

#endif  // STLNPC_STL_PARSER_HPP_
