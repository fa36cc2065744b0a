// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyinv/truncated_ideal.hpp"

namespace polyinv {

/// g(x, y) = sum_i y_i x^(alpha_i) over monomial_basis(n, d).
struct generic_template {
  ring x;                          // loop variables
  ring joint;                      // x followed by the m coefficient variables
  std::vector<monomial> monomials;
  std::size_t degree = 0;
  polynomial g;

  std::size_t m() const noexcept { return monomials.size(); }
};

inline generic_template make_generic_template(const ring& x, std::size_t d) {
  if (x.size() == 0 || d == 0) throw std::invalid_argument("generic template needs n >= 1 and d >= 1");
  generic_template t;
  t.x = x;
  t.degree = d;
  t.monomials = monomial_basis(x.size(), d);
  std::vector<std::string> ys;
  for (std::size_t i = 1; i <= t.monomials.size(); ++i) ys.push_back(x.fresh_name("__y" + std::to_string(i)));
  t.joint = x.extended(ys);
  const std::size_t m = t.monomials.size();
  std::vector<term> ts;
  for (std::size_t i = 0; i < m; ++i) {
    monomial mono = t.monomials[i].extended(m);
    mono.set(x.size() + i, 1);
    ts.push_back({rational(1), std::move(mono)});
  }
  t.g = polynomial::from_terms(t.joint, std::move(ts));
  return t;
}

inline generic_template make_generic_template(std::size_t n, std::size_t d) {
  return make_generic_template(ring::numbered(n), d);
}

/// Rows of polynomials in x only: generator k of the chain equals
/// sum_j rows[k][j] * y_j.
struct poly_matrix {
  ring x;
  std::size_t degree = 0;
  std::vector<monomial> monomials;  // column j belongs to monomials[j]
  std::vector<std::vector<polynomial>> rows;
  std::size_t iterations = 0;

  std::size_t n() const noexcept { return x.size(); }
  std::size_t m() const noexcept { return monomials.size(); }

  matrix_q at(const point& a) const {
    if (a.size() != x.size())
      throw std::invalid_argument("kernel_at: point has " + std::to_string(a.size()) + " coordinates, expected " +
                                  std::to_string(x.size()));
    matrix_q out;
    for (const auto& row : rows) {
      vector_q v;
      for (const auto& e : row) v.push_back(e.eval(a));
      out.push_back(std::move(v));
    }
    return out;
  }
};

namespace detail {

// Coefficients of y_1..y_m in a polynomial that is linear homogeneous in y.
inline std::vector<polynomial> y_coefficients(const polynomial& h, const generic_template& t) {
  const std::size_t n = t.x.size(), m = t.m();
  std::vector<std::vector<term>> parts(m);
  for (const auto& tm : h.terms()) {
    std::optional<std::size_t> which;
    for (std::size_t j = 0; j < m; ++j) {
      auto e = tm.mono[n + j];
      if (e == 0) continue;
      if (e != 1 || which) throw std::logic_error("invariant matrix: generator is not linear in the template coefficients");
      which = j;
    }
    if (!which) throw std::logic_error("invariant matrix: generator has a term free of template coefficients");
    monomial xm(n);
    for (std::size_t i = 0; i < n; ++i) xm.set(i, tm.mono[i]);
    parts[*which].push_back({tm.coeff, std::move(xm)});
  }
  std::vector<polynomial> row;
  for (auto& p : parts) row.push_back(polynomial::from_terms(t.x, std::move(p)));
  return row;
}

}  // namespace detail

namespace detail {

// Every chain generator is linear in y, so V(chain) = {(x, y) : A(x) y = 0}.
// At a rational x0 the rows of A(x0) are the (p-scaled) monomial values along
// the orbit of x0. A new row outside their span gives a point of V(chain)
// where the new generator is nonzero: an exact proof that it is not in the
// radical, found without any Groebner basis.
class witness_samples {
 public:
  witness_samples(const poly_map& F, const std::vector<monomial>& monos, std::size_t d,
                  const std::optional<polynomial>& diseq)
      : F_(F), monos_(monos), d_(d), diseq_(diseq) {
    std::mt19937 rng(7919);
    std::uniform_int_distribution<int> coord(-3, 3);
    for (int s = 0; s < 3; ++s) {
      point x;
      for (std::size_t i = 0; i < F.size(); ++i) x.emplace_back(coord(rng));
      samples_.push_back({x, incremental_kernel(monos.size())});
      samples_.back().kernel.add_row(row(x));
    }
  }

  // Advances every sample one step; true if some sample separates.
  bool step() {
    bool separated = false;
    for (auto& s : samples_) {
      if (!s.live) continue;
      s.x = F_.apply(s.x);
      for (const auto& v : s.x)
        if (bit_size(v) > max_bits) s.live = false;
      if (!s.live) continue;
      if (s.kernel.add_row(row(s.x))) separated = true;
      if (s.kernel.state_bits() > max_bits * monos_.size()) s.live = false;
    }
    return separated;
  }

 private:
  static constexpr std::size_t max_bits = 1 << 14;

  struct sample {
    point x;
    incremental_kernel kernel;
    bool live = true;
  };

  vector_q row(const point& x) const {
    auto r = evaluation_row(monos_, x, d_);
    if (diseq_) {
      rational s = diseq_->eval(x);
      for (auto& v : r) v *= s;
    }
    return r;
  }

  const poly_map& F_;
  const std::vector<monomial>& monos_;
  std::size_t d_;
  const std::optional<polynomial>& diseq_;
  std::vector<sample> samples_;
};

}  // namespace detail

/// Runs the invariant-set chain on (g or p*g, (F, y identity)) and extracts
/// the coefficient matrix. Throws resource_exhausted when the chain does not
/// stabilize within the limits. Same chain as invariant_set; radical tests
/// are skipped whenever a sample point already separates the new generation.
inline poly_matrix invariant_matrix(const poly_map& F, std::size_t d, const std::optional<polynomial>& diseq = {},
                                    const resource_limits& limits = {}) {
  auto t = make_generic_template(F.base_ring(), d);
  polynomial g = diseq ? diseq->embed(t.joint) * t.g : t.g;
  poly_map G = F.extended(t.joint);
  detail::witness_samples witness(F, t.monomials, d, diseq);

  std::vector<polynomial> chain{g};
  std::optional<groebner_basis> basis;
  std::size_t in_basis = 0, iterations = 0;
  polynomial next = compose(g, G, limits);
  for (;;) {
    check_deadline(limits, "invariant matrix");
    if (!witness.step()) {
      std::vector<polynomial> fresh(chain.begin() + static_cast<std::ptrdiff_t>(in_basis), chain.end());
      basis = basis ? extend_groebner_basis(*basis, t.joint, fresh, limits.ideal_order, limits)
                    : compute_groebner_basis(t.joint, fresh, limits.ideal_order, limits);
      in_basis = chain.size();
      if (radical_contains_all({next}, *basis, limits)) break;
    }
    if (iterations >= limits.max_iterations) throw resource_exhausted(resource_kind::iterations, "invariant set");
    chain.push_back(next);
    ++iterations;
    next = compose(next, G, limits);
  }

  poly_matrix A;
  A.x = t.x;
  A.degree = d;
  A.monomials = t.monomials;
  A.iterations = iterations;
  for (const auto& h : chain) A.rows.push_back(detail::y_coefficients(h, t));
  return A;
}

inline poly_matrix invariant_matrix(const loop_spec& loop, std::size_t d, const resource_limits& limits = {}) {
  require_equation_guard(loop, "parametric");
  return invariant_matrix(loop.body, d, loop.guard_diseq, limits);
}

/// Reassembles row k as a polynomial in the joint ring.
inline polynomial row_polynomial(const poly_matrix& A, std::size_t k, const generic_template& t) {
  polynomial out(t.joint);
  for (std::size_t j = 0; j < A.m(); ++j)
    out += A.rows.at(k)[j].embed(t.joint) * polynomial::variable(t.joint, A.n() + j);
  return out;
}

/// Basis of { sum b_i x^(alpha_i) : A(a) b = 0 }.
inline std::vector<polynomial> kernel_at(const poly_matrix& A, const point& a, const resource_limits& limits = {}) {
  auto rows = A.at(a);
  std::vector<polynomial> out;
  for (const auto& v : kernel_basis(rows, A.m(), limits)) out.push_back(detail::from_coefficients(A.x, A.monomials, v));
  return out;
}

/// Drops rows whose polynomial lies in the ideal of the remaining rows; the
/// kernel at every point is unchanged.
inline poly_matrix trimmed(const poly_matrix& A, const resource_limits& limits = {}) {
  auto t = make_generic_template(A.x, A.degree);
  std::vector<polynomial> polys;
  for (std::size_t k = 0; k < A.rows.size(); ++k) polys.push_back(row_polynomial(A, k, t));
  std::vector<char> keep(polys.size(), 1);
  for (std::size_t k = polys.size(); k-- > 0;) {
    if (polys[k].is_zero()) {
      keep[k] = 0;
      continue;
    }
    std::vector<polynomial> others;
    for (std::size_t j = 0; j < polys.size(); ++j)
      if (j != k && keep[j]) others.push_back(polys[j]);
    if (others.empty()) continue;
    if (compute_groebner_basis(t.joint, others, limits.ideal_order, limits).contains(polys[k], limits)) keep[k] = 0;
  }
  poly_matrix out = A;
  out.rows.clear();
  for (std::size_t k = 0; k < A.rows.size(); ++k)
    if (keep[k]) out.rows.push_back(A.rows[k]);
  return out;
}

}  // namespace polyinv
