#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadscene/error.hpp"
#include "roadscene/stl/formula.hpp"

namespace roadscene::stl {

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

enum class Tok {
  ident,
  number,
  kw_true,
  kw_eventually,
  kw_always,
  kw_until,
  lparen,
  rparen,
  lbracket,
  rbracket,
  comma,
  bang,
  amp,
  pipe,
  arrow,
  cmp,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
  double number = 0.0;
  Comparator comparator = Comparator::less;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void error(ErrorCode code, const std::string& what) const { throw ParseError(code, line_, col_, what); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  Token single(Tok kind, std::size_t len) {
    Token t{kind, std::string(src_.substr(pos_, len)), line_, col_};
    for (std::size_t i = 0; i < len; ++i) advance();
    return t;
  }

  Token next() {
    const char c = peek();
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') return word();
    if (std::isdigit(uc) || c == '.' || ((c == '-' || c == '+') && (std::isdigit(static_cast<unsigned char>(peek(1))) || peek(1) == '.'))) {
      return number();
    }
    switch (c) {
      case '(': return single(Tok::lparen, 1);
      case ')': return single(Tok::rparen, 1);
      case '[': return single(Tok::lbracket, 1);
      case ']': return single(Tok::rbracket, 1);
      case ',': return single(Tok::comma, 1);
      case '!': return single(Tok::bang, 1);
      case '&': return single(Tok::amp, 1);
      case '|': return single(Tok::pipe, 1);
      case '-':
        if (peek(1) == '>') return single(Tok::arrow, 2);
        break;
      case '<':
      case '>': {
        const bool eq = peek(1) == '=';
        Token t = single(Tok::cmp, eq ? 2 : 1);
        t.comparator = c == '<' ? (eq ? Comparator::less_equal : Comparator::less)
                                : (eq ? Comparator::greater_equal : Comparator::greater);
        return t;
      }
      case '=':
      case '~':
      case '^':
      case '%':
      case '*':
      case '/':
        error(ErrorCode::unknown_operator, "unknown operator '" + operator_text() + "'");
      default: break;
    }
    error(ErrorCode::syntax_error, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string operator_text() const {
    std::size_t end = pos_;
    while (end < src_.size() && std::ispunct(static_cast<unsigned char>(src_[end])) && src_[end] != '(' &&
           src_[end] != ')' && src_[end] != '[' && src_[end] != ']') {
      ++end;
    }
    return std::string(src_.substr(pos_, end - pos_));
  }

  Token word() {
    std::size_t end = pos_;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
    Token t = single(Tok::ident, end - pos_);
    if (t.text == "true") t.kind = Tok::kw_true;
    else if (t.text == "F") t.kind = Tok::kw_eventually;
    else if (t.text == "G") t.kind = Tok::kw_always;
    else if (t.text == "U") t.kind = Tok::kw_until;
    return t;
  }

  Token number() {
    std::size_t end = pos_;
    if (src_[end] == '+' || src_[end] == '-') ++end;
    while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.')) ++end;
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
      if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
        end = exp;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      }
    }
    const std::size_t line = line_;
    const std::size_t col = col_;
    std::string text(src_.substr(pos_, end - pos_));
    const char* first = text.data() + (text[0] == '+' ? 1 : 0);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      error(ErrorCode::syntax_error, "malformed number '" + text + "'");
    }
    Token t = single(Tok::number, end - pos_);
    t.line = line;
    t.column = col;
    t.number = value;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// implication := disjunction ("->" implication)?
// disjunction := conjunction ("|" conjunction)*
// conjunction := unary ("&" unary)*
// unary       := "!" unary | until
// until       := atom ("U" window? "(" implication ")")*
// atom        := "true" | ident cmp number | ("F"|"G") window? "(" implication ")" | "(" implication ")"
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = implication();
    if (cur().kind != Tok::end) unexpected("end of input");
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void unexpected(const std::string& wanted) const {
    const Token& t = cur();
    const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(ErrorCode::syntax_error, t.line, t.column, "expected " + wanted + ", found " + found);
  }

  void expect(Tok kind, const std::string& what) {
    if (cur().kind != kind) unexpected(what);
    ++pos_;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (cur().kind == Tok::arrow) {
      ++pos_;
      return Formula::implication(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (cur().kind == Tok::pipe) {
      ++pos_;
      f = Formula::disjunction(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (cur().kind == Tok::amp) {
      ++pos_;
      f = Formula::conjunction(std::move(f), unary());
    }
    return f;
  }

  Formula unary() {
    if (cur().kind == Tok::bang) {
      ++pos_;
      return Formula::negation(unary());
    }
    return until();
  }

  Formula until() {
    Formula f = atom();
    while (cur().kind == Tok::kw_until) {
      ++pos_;
      auto w = window();
      expect(Tok::lparen, "'(' after U");
      Formula rhs = implication();
      expect(Tok::rparen, "')'");
      f = Formula::until(std::move(f), std::move(rhs), w);
    }
    return f;
  }

  std::optional<Interval> window() {
    if (cur().kind != Tok::lbracket) return std::nullopt;
    const Token open = take();
    if (cur().kind != Tok::number) unexpected("interval lower bound");
    const double lo = take().number;
    expect(Tok::comma, "','");
    if (cur().kind != Tok::number) unexpected("interval upper bound");
    const double hi = take().number;
    expect(Tok::rbracket, "']'");
    try {
      return Interval(lo, hi);
    } catch (const Error& e) {
      throw ParseError(ErrorCode::malformed_interval, open.line, open.column, e.what());
    }
  }

  Formula atom() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::kw_true: ++pos_; return Formula::truth();
      case Tok::lparen: {
        ++pos_;
        Formula f = implication();
        expect(Tok::rparen, "')'");
        return f;
      }
      case Tok::kw_eventually:
      case Tok::kw_always: {
        const bool always = t.kind == Tok::kw_always;
        ++pos_;
        auto w = window();
        expect(Tok::lparen, std::string("'(' after ") + (always ? "G" : "F"));
        Formula inner = implication();
        expect(Tok::rparen, "')'");
        return always ? Formula::always(std::move(inner), w) : Formula::eventually(std::move(inner), w);
      }
      case Tok::ident: {
        const Token name = take();
        if (cur().kind == Tok::lparen || cur().kind == Tok::lbracket) {
          throw ParseError(ErrorCode::unknown_operator, name.line, name.column, "unknown operator '" + name.text + "'");
        }
        if (cur().kind != Tok::cmp) unexpected("comparison after '" + name.text + "'");
        const Comparator cmp = take().comparator;
        if (cur().kind != Tok::number) unexpected("numeric threshold");
        return Formula::predicate(name.text, cmp, take().number);
      }
      default: unexpected("formula");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the concrete STL syntax. Implication is desugared to !lhs | rhs.
inline Formula parse(std::string_view text) {
  return detail::Parser(detail::Lexer(text).run()).parse();
}

}  // namespace roadscene::stl
