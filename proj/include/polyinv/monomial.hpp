// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyinv {

/// Power product x1^a1 ... xn^an over a fixed number of variables.
class monomial {
 public:
  using exponent = std::uint32_t;

  monomial() = default;
  explicit monomial(std::size_t nvars) : exps_(nvars, 0) {}
  monomial(std::initializer_list<exponent> exps) : exps_(exps) { recount(); }
  explicit monomial(std::vector<exponent> exps) : exps_(std::move(exps)) { recount(); }

  static monomial variable(std::size_t nvars, std::size_t index, exponent power = 1) {
    monomial m(nvars);
    m.exps_.at(index) = power;
    m.degree_ = power;
    return m;
  }

  std::size_t size() const noexcept { return exps_.size(); }
  std::uint64_t degree() const noexcept { return degree_; }
  bool is_one() const noexcept { return degree_ == 0; }
  exponent operator[](std::size_t i) const { return exps_[i]; }
  std::span<const exponent> exponents() const noexcept { return exps_; }

  void set(std::size_t i, exponent e) {
    degree_ = degree_ - exps_[i] + e;
    exps_[i] = e;
  }

  monomial& operator*=(const monomial& o) {
    for (std::size_t i = 0; i < exps_.size(); ++i) exps_[i] += o.exps_[i];
    degree_ += o.degree_;
    return *this;
  }
  friend monomial operator*(monomial a, const monomial& b) { return a *= b; }

  /// True when `d` divides this monomial.
  bool divisible_by(const monomial& d) const {
    if (d.degree_ > degree_) return false;
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (d.exps_[i] > exps_[i]) return false;
    return true;
  }

  /// this / d; caller guarantees divisibility.
  monomial quotient(const monomial& d) const {
    monomial q(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) q.exps_[i] -= d.exps_[i];
    q.degree_ -= d.degree_;
    return q;
  }

  friend monomial lcm(const monomial& a, const monomial& b) {
    monomial l(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) l.exps_[i] = std::max(a.exps_[i], b.exps_[i]);
    l.recount();
    return l;
  }

  friend bool coprime(const monomial& a, const monomial& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.exps_[i] != 0 && b.exps_[i] != 0) return false;
    return true;
  }

  /// Copy with `extra` zero exponents appended (ring extension).
  monomial extended(std::size_t extra) const {
    monomial m(*this);
    m.exps_.resize(exps_.size() + extra, 0);
    return m;
  }

  friend bool operator==(const monomial& a, const monomial& b) { return a.exps_ == b.exps_; }

  std::size_t hash() const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto e : exps_) h = (h ^ e) * 1099511628211ull;
    return h;
  }

 private:
  void recount() {
    degree_ = 0;
    for (auto e : exps_) degree_ += e;
  }

  std::vector<exponent> exps_;
  std::uint64_t degree_ = 0;
};

struct monomial_hash {
  std::size_t operator()(const monomial& m) const noexcept { return m.hash(); }
};

namespace detail {

inline int lex_compare(std::span<const monomial::exponent> a, std::span<const monomial::exponent> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
  return 0;
}

// Reverse lexicographic tiebreak of grevlex: the monomial with the smaller
// exponent in the last differing variable is the larger one.
inline int revlex_tiebreak(std::span<const monomial::exponent> a, std::span<const monomial::exponent> b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
  return 0;
}

inline std::uint64_t span_degree(std::span<const monomial::exponent> s) {
  std::uint64_t d = 0;
  for (auto e : s) d += e;
  return d;
}

inline int grevlex_compare(std::span<const monomial::exponent> a, std::span<const monomial::exponent> b) {
  auto da = span_degree(a), db = span_degree(b);
  if (da != db) return da > db ? 1 : -1;
  return revlex_tiebreak(a, b);
}

}  // namespace detail

/// Monomial orders with x1 > x2 > ... > xn.
///
/// `block_elim` makes the trailing variables [split, n) a dominant grevlex block
/// (that block is compared first), with grevlex on [0, split) as the tiebreak.
/// Appending an auxiliary variable to a ring and selecting block_elim(n) gives
/// an elimination order for that variable.
struct monomial_order {
  enum class kind { deglex, grevlex, lex, block_elim };

  kind type = kind::grevlex;
  std::size_t split = 0;

  static constexpr monomial_order deglex() { return {kind::deglex, 0}; }
  static constexpr monomial_order grevlex() { return {kind::grevlex, 0}; }
  static constexpr monomial_order lex() { return {kind::lex, 0}; }
  static constexpr monomial_order block_elim(std::size_t split) { return {kind::block_elim, split}; }

  /// Three-way comparison: positive when a > b.
  int compare(const monomial& a, const monomial& b) const {
    switch (type) {
      case kind::lex:
        return detail::lex_compare(a.exponents(), b.exponents());
      case kind::deglex:
        if (a.degree() != b.degree()) return a.degree() > b.degree() ? 1 : -1;
        return detail::lex_compare(a.exponents(), b.exponents());
      case kind::grevlex:
        if (a.degree() != b.degree()) return a.degree() > b.degree() ? 1 : -1;
        return detail::revlex_tiebreak(a.exponents(), b.exponents());
      case kind::block_elim: {
        auto ea = a.exponents(), eb = b.exponents();
        std::size_t s = std::min(split, ea.size());
        if (int c = detail::grevlex_compare(ea.subspan(s), eb.subspan(s)); c != 0) return c;
        return detail::grevlex_compare(ea.first(s), eb.first(s));
      }
    }
    return 0;
  }

  bool greater(const monomial& a, const monomial& b) const { return compare(a, b) > 0; }

  friend bool operator==(const monomial_order&, const monomial_order&) = default;
};

/// Canonical storage/indexing order: ascending total degree, and within one
/// degree the lexicographically larger monomial first (x1^2 before x1*x2).
/// Index 0 is the constant monomial.
inline bool index_precedes(const monomial& a, const monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return detail::lex_compare(a.exponents(), b.exponents()) > 0;
}

/// All monomials of total degree <= d in n variables, in index order.
/// Length is C(n+d, d).
inline std::vector<monomial> monomial_basis(std::size_t n, std::size_t d) {
  if (n == 0) throw std::invalid_argument("monomial_basis: need at least one variable");
  std::vector<monomial> out;
  std::vector<monomial::exponent> e(n, 0);
  // Within degree k, enumerate exponent vectors in lex-descending order.
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t pos, std::size_t remaining) {
    if (pos + 1 == n) {
      e[pos] = static_cast<monomial::exponent>(remaining);
      out.emplace_back(e);
      return;
    }
    for (std::size_t take = remaining + 1; take-- > 0;) {
      e[pos] = static_cast<monomial::exponent>(take);
      fill(pos + 1, remaining - take);
    }
  };
  for (std::size_t k = 0; k <= d; ++k) fill(0, k);
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace polyinv
