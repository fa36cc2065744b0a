// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polyinv/rational.hpp"
#include "polyinv/resource.hpp"

namespace polyinv {

using vector_q = std::vector<rational>;
using matrix_q = std::vector<vector_q>;

/// Reduced row echelon form over Q; returns the nonzero rows and pivot columns.
inline std::pair<matrix_q, std::vector<std::size_t>> rref(matrix_q rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      rational f = rows[i][c];
      for (std::size_t k = c; k < cols; ++k) rows[i][k] -= f * rows[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return {std::move(rows), std::move(pivots)};
}

inline std::size_t rank(const matrix_q& rows, std::size_t cols) { return rref(rows, cols).second.size(); }

/// rank A = rank B = rank [A; B].
inline bool same_span(const matrix_q& a, const matrix_q& b, std::size_t cols) {
  std::size_t ra = rank(a, cols), rb = rank(b, cols);
  if (ra != rb) return false;
  matrix_q both = a;
  both.insert(both.end(), b.begin(), b.end());
  return rank(both, cols) == ra;
}

/// Canonical basis of span(vectors): RREF rows with denominators cleared.
inline matrix_q canonical_basis(const matrix_q& vectors, std::size_t cols) {
  matrix_q out;
  for (auto& row : rref(vectors, cols).first) {
    vector_q scaled;
    for (auto& z : primitive_integer_vector(row)) scaled.emplace_back(z);
    out.push_back(std::move(scaled));
  }
  return out;
}

/// Right kernel maintained row by row with fraction-free integer updates.
/// Starts as the identity basis; each independent row removes one vector.
class incremental_kernel {
 public:
  explicit incremental_kernel(std::size_t cols) : cols_(cols) {
    for (std::size_t i = 0; i < cols; ++i) {
      std::vector<integer> e(cols, 0);
      e[i] = 1;
      basis_.push_back(std::move(e));
    }
  }

  std::size_t columns() const noexcept { return cols_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  std::size_t rank() const noexcept { return cols_ - basis_.size(); }
  const std::vector<std::vector<integer>>& basis() const noexcept { return basis_; }

  std::size_t state_bits() const {
    std::size_t bits = 0;
    for (const auto& v : basis_)
      for (const auto& z : v) bits += bit_size(z);
    return bits;
  }

  /// True when the row is independent of all rows added so far.
  bool add_row(const std::vector<integer>& row, const resource_limits& limits = {}) {
    if (row.size() != cols_) throw std::invalid_argument("incremental_kernel: row has the wrong length");
    std::vector<integer> dots(basis_.size());
    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      check_deadline(limits, "linear system");
      integer acc = 0;
      for (std::size_t k = 0; k < cols_; ++k)
        if (sgn(row[k]) != 0 && sgn(basis_[i][k]) != 0) acc += row[k] * basis_[i][k];
      dots[i] = std::move(acc);
      if (!pivot && sgn(dots[i]) != 0) pivot = i;
    }
    if (!pivot) return false;
    const std::size_t p = *pivot;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (i == p || sgn(dots[i]) == 0) continue;
      check_deadline(limits, "linear system");
      integer a = dots[p], b = dots[i];
      integer g = gcd(a, b);
      a /= g;
      b /= g;
      integer content = 0;
      for (std::size_t k = 0; k < cols_; ++k) {
        basis_[i][k] = a * basis_[i][k] - b * basis_[p][k];
        content = gcd(content, basis_[i][k]);
      }
      if (content > 1)
        for (auto& z : basis_[i]) mpz_divexact(z.get_mpz_t(), z.get_mpz_t(), content.get_mpz_t());
    }
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(p));
    if (limits.max_state_bits != 0 && state_bits() > limits.max_state_bits)
      throw resource_exhausted(resource_kind::state_bits, "linear system");
    return true;
  }

  bool add_row(const vector_q& row, const resource_limits& limits = {}) {
    return add_row(clear_denominators(row), limits);
  }

  static std::vector<integer> clear_denominators(const vector_q& row) {
    integer den = 1;
    for (const auto& q : row) den = lcm(den, integer(q.get_den()));
    std::vector<integer> out;
    out.reserve(row.size());
    for (const auto& q : row) out.push_back(integer(q.get_num()) * (den / integer(q.get_den())));
    return out;
  }

 private:
  std::size_t cols_;
  std::vector<std::vector<integer>> basis_;
};

/// Exact right kernel of `rows` (each of length `cols`), in canonical form.
inline matrix_q kernel_basis(const matrix_q& rows, std::size_t cols, const resource_limits& limits = {}) {
  incremental_kernel k(cols);
  for (const auto& r : rows) {
    if (k.dimension() == 0) break;
    k.add_row(r, limits);
  }
  matrix_q vectors;
  for (const auto& v : k.basis()) vectors.emplace_back(v.begin(), v.end());
  return canonical_basis(vectors, cols);
}

namespace modp {

using u64 = std::uint64_t;

inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % p); }
inline u64 add(u64 a, u64 b, u64 p) { return a + b >= p ? a + b - p : a + b; }
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 pow(u64 a, u64 e, u64 p) {
  u64 r = 1;
  for (; e; e >>= 1, a = mul(a, a, p))
    if (e & 1) r = mul(r, a, p);
  return r;
}

inline u64 inv(u64 a, u64 p) { return pow(a, p - 2, p); }

inline u64 reduce(const integer& z, u64 p) {
  return static_cast<u64>(mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(p)));
}

/// q mod p, or nothing when p divides the denominator.
inline std::optional<u64> reduce(const rational& q, u64 p) {
  u64 den = reduce(integer(q.get_den()), p);
  if (den == 0) return std::nullopt;
  return mul(reduce(integer(q.get_num()), p), inv(den, p), p);
}

inline constexpr std::size_t prime_count = 64;

/// The k-th prime below 2^62 in descending order (fixed list).
inline u64 prime(std::size_t k) {
  static const std::vector<u64> primes = [] {
    std::vector<u64> out;
    integer z = integer(1) << 62;
    while (out.size() < prime_count) {
      do {
        z -= 1;
      } while (mpz_probab_prime_p(z.get_mpz_t(), 30) == 0);
      out.push_back(z.get_ui());
    }
    return out;
  }();
  return primes.at(k);
}

/// Row echelon form over Z/p kept fully reduced, built one row at a time.
class echelon {
 public:
  echelon(std::size_t cols, u64 p) : cols_(cols), p_(p) {}

  u64 modulus() const noexcept { return p_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  bool add_row(std::vector<u64> row) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      u64 f = row[pivots_[i]];
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols_; ++k)
        if (rows_[i][k] != 0) row[k] = sub(row[k], mul(f, rows_[i][k], p_), p_);
    }
    std::size_t c = 0;
    while (c < cols_ && row[c] == 0) ++c;
    if (c == cols_) return false;
    u64 iv = inv(row[c], p_);
    for (auto& v : row) v = mul(v, iv, p_);
    for (auto& r : rows_) {
      u64 f = r[c];
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols_; ++k)
        if (row[k] != 0) r[k] = sub(r[k], mul(f, row[k], p_), p_);
    }
    auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), c) - pivots_.begin();
    pivots_.insert(pivots_.begin() + pos, c);
    rows_.insert(rows_.begin() + pos, std::move(row));
    return true;
  }

  /// Kernel vectors, one per free column f: e_f minus the pivot-column entries.
  std::vector<std::vector<u64>> kernel() const {
    std::vector<char> is_pivot(cols_, 0);
    for (auto c : pivots_) is_pivot[c] = 1;
    std::vector<std::vector<u64>> out;
    for (std::size_t f = 0; f < cols_; ++f) {
      if (is_pivot[f]) continue;
      std::vector<u64> v(cols_, 0);
      v[f] = 1;
      for (std::size_t i = 0; i < rows_.size(); ++i) v[pivots_[i]] = rows_[i][f] == 0 ? 0 : p_ - rows_[i][f];
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  std::size_t cols_;
  u64 p_;
  std::vector<std::vector<u64>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace modp

/// The unique n/d with |n|, d <= sqrt(N/2) and n = a*d mod N, if it exists.
inline std::optional<rational> rational_reconstruct(const integer& a, const integer& modulus) {
  integer bound = sqrt(modulus / 2);
  integer r0 = modulus, r1 = a % modulus, s0 = 0, s1 = 1;
  if (r1 < 0) r1 += modulus;
  while (r1 > bound) {
    integer q = r0 / r1;
    integer r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (s1 == 0 || abs(s1) > bound || gcd(r1, s1) != 1) return std::nullopt;
  rational q(r1, s1);
  q.canonicalize();
  return q;
}

}  // namespace polyinv
