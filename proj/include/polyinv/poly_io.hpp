// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "polyinv/polynomial.hpp"

namespace polyinv {

/// Syntax error with a 0-based byte offset into the parsed text.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t offset) : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

// expr    := [+|-] product { (+|-) product }
// product := power { * power }
// power   := atom [ ^ natural ]
// atom    := natural [ / natural ] | ident | ( expr )
class poly_parser {
 public:
  poly_parser(std::string_view text, const ring& r) : text_(text), ring_(r) {}

  polynomial parse_all() {
    polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

  // Parses one expression and leaves the cursor after it.
  polynomial parse_prefix() { return expr(); }
  std::size_t position() const noexcept { return pos_; }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  polynomial expr() {
    skip_ws();
    bool negate = false;
    if (peek('-') || peek('+')) negate = text_[pos_++] == '-';
    polynomial acc = product();
    if (negate) acc = -acc;
    for (;;) {
      if (peek('+')) {
        ++pos_;
        acc += product();
      } else if (peek('-')) {
        ++pos_;
        acc -= product();
      } else {
        return acc;
      }
    }
  }

  polynomial product() {
    polynomial acc = power();
    for (;;) {
      skip_ws();
      if (peek('*')) {
        ++pos_;
        acc *= power();
      } else if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                         text_[pos_] == '_' || text_[pos_] == '(')) {
        fail("implicit multiplication is not allowed; write '*'");
      } else {
        return acc;
      }
    }
  }

  polynomial power() {
    polynomial base = atom();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      std::string digits = natural();
      if (digits.size() > 6) {
        pos_ = start;
        fail("exponent too large");
      }
      base = base.pow(std::stoul(digits));
    }
    return base;
  }

  std::string natural() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a natural number");
    return std::string(text_.substr(start, pos_ - start));
  }

  polynomial atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of polynomial");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      polynomial inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = natural();
      std::string den = "1";
      if (peek('/')) {
        ++pos_;
        skip_ws();
        den = natural();
      }
      integer d(den);
      if (d == 0) fail("zero denominator");
      rational q(integer(num), d);
      q.canonicalize();
      return polynomial::constant(ring_, q);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      auto idx = ring_.index_of(name);
      if (!idx) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      return polynomial::variable(ring_, *idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const ring& ring_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the polynomial text syntax: rational constants, ring variables,
/// `+ - * ^` and parentheses. Implicit multiplication is rejected.
inline polynomial parse_polynomial(std::string_view text, const ring& r) {
  return detail::poly_parser(text, r).parse_all();
}

inline std::string to_string(const monomial& m, const ring& r) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += r.name(i);
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out;
}

/// Prints terms in index order, e.g. `-2 + x1^2 + x2^2 + x3^2 - 2*x1*x2*x3`.
inline std::string to_string(const polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    bool negative = sgn(t.coeff) < 0;
    rational mag = abs(t.coeff);
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    if (t.mono.is_one()) {
      out += to_string(mag);
      continue;
    }
    if (mag != 1) out += to_string(mag) + "*";
    out += to_string(t.mono, p.base_ring());
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const polynomial& p) { return os << to_string(p); }

}  // namespace polyinv
