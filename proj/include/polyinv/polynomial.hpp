// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/monomial.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

class ring_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered list of variable names. Copies share the name table.
class ring {
 public:
  ring() : vars_(std::make_shared<const std::vector<std::string>>()) {}
  explicit ring(std::vector<std::string> names)
      : vars_(std::make_shared<const std::vector<std::string>>(std::move(names))) {
    for (std::size_t i = 0; i < vars_->size(); ++i)
      for (std::size_t j = i + 1; j < vars_->size(); ++j)
        if ((*vars_)[i] == (*vars_)[j]) throw std::invalid_argument("duplicate variable '" + (*vars_)[i] + "'");
  }

  /// x1, ..., xn (or another prefix).
  static ring numbered(std::size_t n, const std::string& prefix = "x") {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
    return ring(std::move(names));
  }

  std::size_t size() const noexcept { return vars_->size(); }
  const std::string& name(std::size_t i) const { return vars_->at(i); }
  const std::vector<std::string>& names() const noexcept { return *vars_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_->size(); ++i)
      if ((*vars_)[i] == name) return i;
    return std::nullopt;
  }

  ring extended(const std::vector<std::string>& extra) const {
    std::vector<std::string> names = *vars_;
    names.insert(names.end(), extra.begin(), extra.end());
    return ring(std::move(names));
  }

  /// A name starting with `base` that is not yet a variable of this ring.
  std::string fresh_name(const std::string& base) const {
    if (!index_of(base)) return base;
    for (std::size_t k = 1;; ++k) {
      std::string candidate = base + std::to_string(k);
      if (!index_of(candidate)) return candidate;
    }
  }

  bool is_prefix_of(const ring& other) const {
    if (size() > other.size()) return false;
    return std::equal(vars_->begin(), vars_->end(), other.vars_->begin());
  }

  friend bool operator==(const ring& a, const ring& b) { return a.vars_ == b.vars_ || *a.vars_ == *b.vars_; }

 private:
  std::shared_ptr<const std::vector<std::string>> vars_;
};

struct term {
  rational coeff;
  monomial mono;

  friend bool operator==(const term&, const term&) = default;
};

/// Multivariate polynomial over Q. Terms are kept in index order (see
/// index_precedes) with no zero coefficients and no repeated monomials.
class polynomial {
 public:
  polynomial() = default;
  explicit polynomial(ring r) : ring_(std::move(r)) {}

  static polynomial constant(const ring& r, const rational& c) {
    polynomial p(r);
    if (c != 0) p.terms_.push_back({c, monomial(r.size())});
    return p;
  }

  static polynomial variable(const ring& r, std::size_t index) {
    if (index >= r.size()) throw std::out_of_range("variable index out of range");
    polynomial p(r);
    p.terms_.push_back({rational(1), monomial::variable(r.size(), index)});
    return p;
  }

  static polynomial variable(const ring& r, const std::string& name) {
    auto idx = r.index_of(name);
    if (!idx) throw std::invalid_argument("unknown variable '" + name + "'");
    return variable(r, *idx);
  }

  static polynomial from_term(const ring& r, const rational& c, monomial m) {
    if (m.size() != r.size()) throw ring_mismatch("monomial arity does not match ring");
    polynomial p(r);
    if (c != 0) p.terms_.push_back({c, std::move(m)});
    return p;
  }

  /// Builds a polynomial from arbitrary terms: sorts, merges duplicates, drops zeros.
  static polynomial from_terms(const ring& r, std::vector<term> terms) {
    for (const auto& t : terms)
      if (t.mono.size() != r.size()) throw ring_mismatch("monomial arity does not match ring");
    polynomial p(r);
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const ring& base_ring() const noexcept { return ring_; }
  const std::vector<term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

  rational constant_term() const {
    if (!terms_.empty() && terms_.front().mono.is_one()) return terms_.front().coeff;
    return 0;
  }

  std::uint64_t degree() const noexcept { return terms_.empty() ? 0 : terms_.back().mono.degree(); }

  /// Degree in the variables with index in [begin, end).
  std::uint64_t degree_in(std::size_t begin, std::size_t end) const {
    std::uint64_t best = 0;
    for (const auto& t : terms_) {
      std::uint64_t d = 0;
      for (std::size_t i = begin; i < end; ++i) d += t.mono[i];
      best = std::max(best, d);
    }
    return best;
  }

  rational coefficient(const monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const term& t, const monomial& key) { return index_precedes(t.mono, key); });
    if (it != terms_.end() && it->mono == m) return it->coeff;
    return 0;
  }

  /// Leading term under DegLex: highest degree, lexicographically largest.
  const term& deglex_leading() const {
    if (terms_.empty()) throw std::logic_error("zero polynomial has no leading term");
    std::size_t i = terms_.size() - 1;
    while (i > 0 && terms_[i - 1].mono.degree() == terms_.back().mono.degree()) --i;
    return terms_[i];
  }

  polynomial operator-() const {
    polynomial r(*this);
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  polynomial& operator+=(const polynomial& o) { return *this = combine(*this, o, false); }
  polynomial& operator-=(const polynomial& o) { return *this = combine(*this, o, true); }
  polynomial& operator*=(const polynomial& o) { return *this = *this * o; }

  friend polynomial operator+(const polynomial& a, const polynomial& b) { return combine(a, b, false); }
  friend polynomial operator-(const polynomial& a, const polynomial& b) { return combine(a, b, true); }

  friend polynomial operator*(const polynomial& a, const polynomial& b) {
    require_same_ring(a, b);
    if (a.is_zero() || b.is_zero()) return polynomial(a.ring_);
    std::vector<term> prod;
    prod.reserve(a.size() * b.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) prod.push_back({s.coeff * t.coeff, s.mono * t.mono});
    polynomial p(a.ring_);
    p.terms_ = std::move(prod);
    p.normalize();
    return p;
  }

  friend polynomial operator*(const rational& c, polynomial p) {
    if (c == 0) return polynomial(p.ring_);
    for (auto& t : p.terms_) t.coeff *= c;
    return p;
  }

  polynomial pow(std::size_t e) const {
    polynomial result = constant(ring_, 1), base = *this;
    while (e > 0) {
      if (e & 1u) result *= base;
      e >>= 1;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// Multiplies by the monomial `m`. Index order is multiplicative, so no re-sort.
  polynomial shifted(const monomial& m) const {
    polynomial r(*this);
    for (auto& t : r.terms_) t.mono *= m;
    return r;
  }

  rational eval(const point& x) const {
    if (x.size() != ring_.size())
      throw std::invalid_argument("eval: point has " + std::to_string(x.size()) + " coordinates, ring has " +
                                  std::to_string(ring_.size()));
    std::vector<std::vector<rational>> powers(x.size());
    rational sum = 0;
    for (const auto& t : terms_) {
      rational v = t.coeff;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto e = t.mono[i];
        if (e == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(1);
        while (pw.size() <= e) pw.push_back(pw.back() * x[i]);
        v *= pw[e];
      }
      sum += v;
    }
    return sum;
  }

  /// Re-expresses this polynomial in a ring whose leading variables are this ring's.
  polynomial embed(const ring& target) const {
    if (!ring_.is_prefix_of(target)) throw ring_mismatch("embed: source ring is not a prefix of the target ring");
    polynomial p(target);
    std::size_t extra = target.size() - ring_.size();
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_) p.terms_.push_back({t.coeff, t.mono.extended(extra)});
    return p;
  }

  /// Drops trailing variables that do not occur. Throws if one of them occurs.
  polynomial restrict_to(const ring& target) const {
    if (!target.is_prefix_of(ring_)) throw ring_mismatch("restrict_to: target ring is not a prefix");
    polynomial p(target);
    for (const auto& t : terms_) {
      std::vector<monomial::exponent> e(t.mono.exponents().begin(), t.mono.exponents().end());
      for (std::size_t i = target.size(); i < e.size(); ++i)
        if (e[i] != 0) throw std::invalid_argument("restrict_to: polynomial uses a dropped variable");
      e.resize(target.size());
      p.terms_.push_back({t.coeff, monomial(std::move(e))});
    }
    return p;
  }

  /// Substitutes constants for the variables in [begin, begin + values.size()).
  polynomial partial_eval(std::size_t begin, const point& values) const {
    std::vector<term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      rational c = t.coeff;
      monomial m = t.mono;
      for (std::size_t k = 0; k < values.size(); ++k) {
        auto e = m[begin + k];
        if (e == 0) continue;
        rational v;
        mpz_pow_ui(v.get_num_mpz_t(), values[k].get_num_mpz_t(), e);
        mpz_pow_ui(v.get_den_mpz_t(), values[k].get_den_mpz_t(), e);
        c *= v;
        m.set(begin + k, 0);
      }
      out.push_back({std::move(c), std::move(m)});
    }
    return from_terms(ring_, std::move(out));
  }

  std::size_t max_coeff_bits() const {
    std::size_t b = 0;
    for (const auto& t : terms_) b = std::max(b, bit_size(t.coeff));
    return b;
  }

  friend bool operator==(const polynomial& a, const polynomial& b) {
    return a.ring_ == b.ring_ && a.terms_ == b.terms_;
  }

 private:
  static void require_same_ring(const polynomial& a, const polynomial& b) {
    if (!(a.ring_ == b.ring_)) throw ring_mismatch("polynomials live in different rings");
  }

  static polynomial combine(const polynomial& a, const polynomial& b, bool subtract) {
    require_same_ring(a, b);
    polynomial r(a.ring_);
    r.terms_.reserve(a.size() + b.size());
    auto i = a.terms_.begin(), j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && index_precedes(i->mono, j->mono))) {
        r.terms_.push_back(*i++);
      } else if (i == a.terms_.end() || index_precedes(j->mono, i->mono)) {
        r.terms_.push_back({subtract ? rational(-j->coeff) : j->coeff, j->mono});
        ++j;
      } else {
        rational c = subtract ? rational(i->coeff - j->coeff) : rational(i->coeff + j->coeff);
        if (c != 0) r.terms_.push_back({std::move(c), i->mono});
        ++i, ++j;
      }
    }
    return r;
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const term& a, const term& b) { return index_precedes(a.mono, b.mono); });
    std::vector<term> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      t.coeff.canonicalize();
      if (!merged.empty() && merged.back().mono == t.mono)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const term& t) { return t.coeff == 0; });
    terms_ = std::move(merged);
  }

  ring ring_;
  std::vector<term> terms_;
};

/// Canonical representative of the line through p: integer coefficients with
/// content 1 and positive DegLex-leading coefficient. Zero maps to zero.
inline polynomial canonical(const polynomial& p) {
  if (p.is_zero()) return p;
  std::vector<rational> coeffs;
  coeffs.reserve(p.size());
  for (const auto& t : p.terms()) coeffs.push_back(t.coeff);
  auto ints = primitive_integer_vector(coeffs);
  bool flip = sgn(p.deglex_leading().coeff) < 0;
  std::vector<term> out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < ints.size(); ++i)
    out.push_back({rational(flip ? integer(-ints[i]) : ints[i]), p.terms()[i].mono});
  return polynomial::from_terms(p.base_ring(), std::move(out));
}

}  // namespace polyinv
