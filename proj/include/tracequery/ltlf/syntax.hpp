#pragma once

// Concrete text syntax for LTLf formulas.
//
//   formula  := or
//   or       := and ( '|' and )*            left-associative
//   and      := until ( '&' until )*        left-associative
//   until    := unary ( 'U' until )?        right-associative
//   unary    := ( '!' | 'X' | 'F' | 'G' ) unary | atom
//   atom     := 'true' | 'false' | ident | '(' formula ')'
//   ident    := [a-z0-9_-]+
//
// Operators are upper-case single characters, so "XX p" reads as X (X p).

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "tracequery/error.hpp"
#include "tracequery/ltlf/formula.hpp"

namespace tracequery::ltlf {

namespace detail {

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* vocab) : text_(text), vocab_(vocab) {}

  Formula run() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty formula", pos_);
    Formula f = parse_or();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return f;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept('|')) f = lor(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (accept('&')) f = land(f, parse_until());
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    if (accept('U')) return until(f, parse_until());
    return f;
  }

  Formula parse_unary() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("expected operand, found end of input", pos_);
    switch (text_[pos_]) {
      case '!':
        ++pos_;
        return lnot(parse_unary());
      case 'X':
        ++pos_;
        return next(parse_unary());
      case 'F':
        ++pos_;
        return eventually(parse_unary());
      case 'G':
        ++pos_;
        return always(parse_unary());
      default:
        return parse_atom();
    }
  }

  Formula parse_atom() {
    const std::size_t start = pos_;
    if (text_[pos_] == '(') {
      ++pos_;
      Formula f = parse_or();
      if (!accept(')')) {
        skip_space();
        throw ParseError(pos_ == text_.size() ? "expected ')', found end of input" : "expected ')'", pos_);
      }
      return f;
    }
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    if (pos_ == start) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    std::string ident(text_.substr(start, pos_ - start));
    if (ident == "true") return top();
    if (ident == "false") return bottom();
    if (vocab_ && !vocab_->contains(ident)) throw UnknownPredicate(ident);
    return pred(std::move(ident));
  }

  std::string_view text_;
  const std::set<std::string>* vocab_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; larger binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::Or:
      return 1;
    case Op::And:
      return 2;
    case Op::Until:
      return 3;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 4;
    default:
      return 5;
  }
}

inline void print_to(const Formula& f, std::string& out);

inline void print_wrapped(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print_to(f, out);
  if (parens) out += ')';
}

inline void print_to(const Formula& f, std::string& out) {
  const int level = precedence(f.op());
  switch (f.op()) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Pred:
      out += f.name();
      return;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: {
      out += f.op() == Op::Not ? "!" : f.op() == Op::Next ? "X " : f.op() == Op::Eventually ? "F " : "G ";
      print_wrapped(f.lhs(), precedence(f.lhs().op()) < level, out);
      return;
    }
    case Op::Until:
      print_wrapped(f.lhs(), precedence(f.lhs().op()) <= level, out);
      out += " U ";
      print_wrapped(f.rhs(), precedence(f.rhs().op()) < level, out);
      return;
    case Op::And:
    case Op::Or:
      print_wrapped(f.lhs(), precedence(f.lhs().op()) < level, out);
      out += f.op() == Op::And ? " & " : " | ";
      print_wrapped(f.rhs(), precedence(f.rhs().op()) <= level, out);
      return;
  }
}

}  // namespace detail

// Parses `text`. When `vocab` is given every identifier must belong to it.
inline Formula parse(std::string_view text, const std::set<std::string>* vocab = nullptr) {
  return detail::Parser(text, vocab).run();
}

inline Formula parse(std::string_view text, const std::set<std::string>& vocab) { return parse(text, &vocab); }

// Prints with the minimal parentheses needed for parse() to rebuild the same tree.
inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print_to(f, out);
  return out;
}

}  // namespace tracequery::ltlf
