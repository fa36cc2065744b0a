// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyinv {

using integer = mpz_class;

/// Exact rational number. mpq_class keeps values canonical (reduced, positive
/// denominator, zero as 0/1) after every arithmetic operation.
using rational = mpq_class;

using point = std::vector<rational>;

inline std::size_t bit_size(const integer& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); }

inline std::size_t bit_size(const rational& q) {
  return std::max(bit_size(integer(q.get_num())), bit_size(integer(q.get_den())));
}

inline std::string to_string(const integer& z) { return z.get_str(); }

inline std::string to_string(const rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses `-7/2`, `3`, `+5`. Throws std::invalid_argument on anything else.
inline rational parse_rational(std::string_view text) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!digits(num) || !digits(den)) throw std::invalid_argument("not a rational constant: '" + std::string(text) + "'");
  integer n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  rational q(n, d);
  q.canonicalize();
  return negative ? rational(-q) : q;
}

inline integer gcd(const integer& a, const integer& b) {
  integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline integer lcm(const integer& a, const integer& b) {
  integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

/// Scales a rational vector to a primitive integer vector (same direction, gcd 1,
/// sign untouched). The zero vector maps to zeros.
inline std::vector<integer> primitive_integer_vector(const std::vector<rational>& v) {
  integer den = 1;
  for (const auto& q : v) den = lcm(den, integer(q.get_den()));
  std::vector<integer> out;
  out.reserve(v.size());
  integer g = 0;
  for (const auto& q : v) {
    integer z = integer(q.get_num()) * (den / integer(q.get_den()));
    g = gcd(g, z);
    out.push_back(std::move(z));
  }
  if (g > 1)
    for (auto& z : out) mpz_divexact(z.get_mpz_t(), z.get_mpz_t(), g.get_mpz_t());
  return out;
}

}  // namespace polyinv
