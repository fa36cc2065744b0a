// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polyinv/linear_algebra.hpp"
#include "polyinv/loop.hpp"

namespace polyinv {

enum class basis_provenance { all_candidates_verified, repaired_via_fallback };

inline const char* to_string(basis_provenance p) {
  return p == basis_provenance::all_candidates_verified ? "all_candidates_verified" : "repaired_via_fallback";
}

struct truncated_options {
  std::optional<std::size_t> rows;  // M; orbit points a^0..a^M, default C(n+d, d)
  std::size_t confirm_window = 3;   // stop after this many consecutive dependent rows (0: never)
  bool modular_candidates = true;   // candidate kernel via several primes, verified afterwards
};

/// Basis of the degree-d truncated invariant ideal, canonical form.
struct invariant_basis {
  std::size_t degree = 0;
  std::vector<polynomial> polynomials;
  std::size_t dimension = 0;
  basis_provenance provenance = basis_provenance::all_candidates_verified;
  std::size_t orbit_rows = 0;          // rows of the linear system actually used
  std::size_t candidates = 0;
  std::size_t failed_candidates = 0;   // |C|
  bool exact_candidates = false;       // candidates came from the exact (not modular) kernel
  bool disequality_folded = false;
};

namespace detail {

// Values of every monomial of `monos` at x, built from cached powers.
template <class T, class Mul>
std::vector<T> monomial_values(const std::vector<monomial>& monos, const std::vector<T>& x, std::size_t d, T one,
                               Mul mul) {
  std::vector<std::vector<T>> pw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    pw[i].push_back(one);
    for (std::size_t e = 1; e <= d; ++e) pw[i].push_back(mul(pw[i].back(), x[i]));
  }
  std::vector<T> out;
  out.reserve(monos.size());
  for (const auto& m : monos) {
    T v = one;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] != 0) v = mul(v, pw[i][m[i]]);
    out.push_back(std::move(v));
  }
  return out;
}

inline vector_q evaluation_row(const std::vector<monomial>& monos, const point& x, std::size_t d) {
  return monomial_values<rational>(monos, x, d, rational(1), [](const rational& a, const rational& b) { return a * b; });
}

inline polynomial from_coefficients(const ring& r, const std::vector<monomial>& monos, const vector_q& c) {
  std::vector<term> ts;
  for (std::size_t i = 0; i < monos.size(); ++i)
    if (sgn(c[i]) != 0) ts.push_back({c[i], monos[i]});
  return canonical(polynomial::from_terms(r, std::move(ts)));
}

inline vector_q coefficients_of(const polynomial& p, const std::vector<monomial>& monos) {
  vector_q out;
  out.reserve(monos.size());
  for (const auto& m : monos) out.push_back(p.coefficient(m));
  return out;
}

inline std::vector<polynomial> polynomials_of(const ring& r, const std::vector<monomial>& monos,
                                              const matrix_q& vectors) {
  std::vector<polynomial> out;
  for (const auto& v : canonical_basis(vectors, monos.size())) out.push_back(from_coefficients(r, monos, v));
  return out;
}

}  // namespace detail

/// Row j is the evaluation of every basis monomial at a^j (times p(a^j)
/// when the loop has a disequality), for j = 0..M.
inline matrix_q orbit_system(const loop_spec& loop, std::size_t d, std::size_t M, const resource_limits& limits = {}) {
  auto monos = monomial_basis(loop.arity(), d);
  matrix_q rows;
  point a = require_init(loop, "orbit system");
  for (std::size_t j = 0; j <= M; ++j) {
    if (j > 0) {
      check_deadline(limits, "orbit");
      a = loop.body.apply(a);
      for (const auto& v : a) check_coefficient(limits, v, "orbit");
    }
    auto row = detail::evaluation_row(monos, a, d);
    if (loop.guard_diseq) {
      rational s = loop.guard_diseq->eval(a);
      for (auto& v : row) v *= s;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

struct exact_candidates_result {
  std::vector<polynomial> polys;
  std::size_t rows_used = 0;
};

// Exact fraction-free kernel of the orbit system, one row at a time.
inline exact_candidates_result exact_candidates(const loop_spec& loop, std::size_t d, std::size_t M,
                                                std::size_t window, const resource_limits& limits) {
  auto monos = monomial_basis(loop.arity(), d);
  incremental_kernel kernel(monos.size());
  point a = require_init(loop, "candidates");
  std::size_t dependent_run = 0, used = 0;
  for (std::size_t j = 0; j <= M && kernel.dimension() > 0; ++j) {
    if (j > 0) {
      check_deadline(limits, "orbit");
      a = loop.body.apply(a);
      for (const auto& v : a) check_coefficient(limits, v, "orbit");
    }
    auto row = evaluation_row(monos, a, d);
    if (loop.guard_diseq) {
      rational s = loop.guard_diseq->eval(a);
      for (auto& v : row) v *= s;
    }
    ++used;
    if (kernel.add_row(row, limits)) {
      dependent_run = 0;
    } else if (window != 0 && ++dependent_run >= window) {
      break;
    }
  }
  matrix_q vectors;
  for (const auto& v : kernel.basis()) vectors.emplace_back(v.begin(), v.end());
  return {polynomials_of(loop.vars, monos, vectors), used};
}

struct modular_map {
  std::vector<std::vector<std::pair<modp::u64, monomial>>> comps;
};

inline std::optional<modular_map> reduce_map(const poly_map& F, modp::u64 p) {
  modular_map out;
  for (const auto& c : F.components()) {
    std::vector<std::pair<modp::u64, monomial>> ts;
    for (const auto& t : c.terms()) {
      auto v = modp::reduce(t.coeff, p);
      if (!v) return std::nullopt;
      ts.emplace_back(*v, t.mono);
    }
    out.comps.push_back(std::move(ts));
  }
  return out;
}

inline modp::u64 eval_mod(const std::vector<std::pair<modp::u64, monomial>>& ts, const std::vector<modp::u64>& x,
                          modp::u64 p) {
  modp::u64 acc = 0;
  for (const auto& [c, m] : ts) {
    modp::u64 v = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] != 0) v = modp::mul(v, modp::pow(x[i], m[i], p), p);
    acc = modp::add(acc, v, p);
  }
  return acc;
}

struct modular_run {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  std::vector<std::vector<modp::u64>> kernel;
  std::size_t rows_used = 0;
};

// The orbit system modulo p; nothing if p divides a denominator.
inline std::optional<modular_run> modular_kernel(const loop_spec& loop, const std::vector<monomial>& monos,
                                                 std::size_t d, std::size_t max_rows, std::size_t window,
                                                 modp::u64 p, const resource_limits& limits) {
  auto F = reduce_map(loop.body, p);
  if (!F) return std::nullopt;
  std::optional<std::vector<std::pair<modp::u64, monomial>>> diseq;
  if (loop.guard_diseq) {
    diseq.emplace();
    for (const auto& t : loop.guard_diseq->terms()) {
      auto v = modp::reduce(t.coeff, p);
      if (!v) return std::nullopt;
      diseq->emplace_back(*v, t.mono);
    }
  }
  std::vector<modp::u64> a;
  for (const auto& v : *loop.init) {
    auto r = modp::reduce(v, p);
    if (!r) return std::nullopt;
    a.push_back(*r);
  }
  modp::echelon ech(monos.size(), p);
  modular_run out;
  std::size_t dependent_run = 0;
  for (std::size_t j = 0; j < max_rows && ech.rank() < monos.size(); ++j) {
    if (j > 0) {
      check_deadline(limits, "modular orbit");
      std::vector<modp::u64> next;
      for (const auto& c : F->comps) next.push_back(eval_mod(c, a, p));
      a = std::move(next);
    }
    auto row = monomial_values<modp::u64>(monos, a, d, 1, [p](modp::u64 x, modp::u64 y) { return modp::mul(x, y, p); });
    if (diseq) {
      modp::u64 s = eval_mod(*diseq, a, p);
      for (auto& v : row) v = modp::mul(v, s, p);
    }
    ++out.rows_used;
    if (ech.add_row(std::move(row))) {
      dependent_run = 0;
    } else if (window != 0 && ++dependent_run >= window) {
      break;
    }
  }
  out.rank = ech.rank();
  out.pivots = ech.pivots();
  out.kernel = ech.kernel();
  return out;
}

struct modular_candidates_result {
  std::vector<polynomial> polys;
  std::size_t rows_used = 0;
};

// Candidate kernel by Chinese remaindering over word-size primes followed by
// rational reconstruction. Primes whose rank or pivot pattern differ from the
// best seen so far are discarded. Nothing when reconstruction never settles.
inline std::optional<modular_candidates_result> modular_candidates(const loop_spec& loop, std::size_t d,
                                                                   std::size_t M, std::size_t window,
                                                                   const resource_limits& limits) {
  auto monos = monomial_basis(loop.arity(), d);
  std::optional<modular_run> best;
  std::size_t rows = M + 1;
  std::vector<std::vector<integer>> residues;
  integer modulus = 1;
  std::optional<matrix_q> previous;

  for (std::size_t k = 0; k < modp::prime_count; ++k) {
    const modp::u64 p = modp::prime(k);
    auto run = modular_kernel(loop, monos, d, rows, best ? 0 : window, p, limits);
    if (!run) continue;
    if (!best) rows = run->rows_used;
    bool better = !best || run->rank > best->rank || (run->rank == best->rank && run->pivots < best->pivots);
    bool same = best && run->rank == best->rank && run->pivots == best->pivots;
    if (better) {
      best = run;
      residues.clear();
      modulus = 1;
      previous.reset();
    } else if (!same) {
      continue;
    }
    if (run->kernel.empty()) return modular_candidates_result{{}, rows};

    // combine with the residues gathered so far
    integer pz(static_cast<unsigned long>(p));
    if (residues.empty()) {
      for (const auto& v : run->kernel) {
        std::vector<integer> z;
        for (auto x : v) z.emplace_back(static_cast<unsigned long>(x));
        residues.push_back(std::move(z));
      }
    } else {
      integer inv_mod;
      mpz_invert(inv_mod.get_mpz_t(), modulus.get_mpz_t(), pz.get_mpz_t());
      for (std::size_t r = 0; r < residues.size(); ++r)
        for (std::size_t i = 0; i < residues[r].size(); ++i) {
          integer x = residues[r][i];
          integer diff = integer(static_cast<unsigned long>(run->kernel[r][i])) - x;
          integer t = diff * inv_mod;
          mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), pz.get_mpz_t());
          residues[r][i] = x + modulus * t;
        }
    }
    modulus *= pz;

    matrix_q lifted;
    bool ok = true;
    for (const auto& v : residues) {
      vector_q q;
      for (const auto& x : v) {
        auto r = rational_reconstruct(x, modulus);
        if (!r) {
          ok = false;
          break;
        }
        q.push_back(*r);
      }
      if (!ok) break;
      lifted.push_back(std::move(q));
    }
    if (!ok) {
      previous.reset();
      continue;
    }
    if (previous && *previous == lifted) return modular_candidates_result{polynomials_of(loop.vars, monos, lifted), rows};
    previous = std::move(lifted);
  }
  return std::nullopt;
}

// Algorithm-1 repair on the z-combination of the failing candidates.
inline std::vector<polynomial> repair(const loop_spec& loop, const std::vector<polynomial>& failing,
                                      const resource_limits& limits) {
  const ring& x = loop.vars;
  std::vector<std::string> znames;
  for (std::size_t j = 1; j <= failing.size(); ++j) znames.push_back(x.fresh_name("__z" + std::to_string(j)));
  ring ext = x.extended(znames);
  polynomial h(ext);
  for (std::size_t j = 0; j < failing.size(); ++j)
    h += polynomial::variable(ext, x.size() + j) * failing[j].embed(ext);
  if (loop.guard_diseq) h = loop.guard_diseq->embed(ext) * h;

  auto chain = invariant_set({h}, loop.body.extended(ext), limits);
  require_stabilized(chain);

  // generation k at x = a is sum_j z_j p(a^k) h_j(a^k)
  auto points = iterate(loop.body, *loop.init, chain.iterations, limits);
  matrix_q rows;
  for (const auto& a : points) {
    rational s = loop.guard_diseq ? loop.guard_diseq->eval(a) : rational(1);
    vector_q row;
    for (const auto& f : failing) row.push_back(s * f.eval(a));
    rows.push_back(std::move(row));
  }
  std::vector<polynomial> out;
  for (const auto& c : kernel_basis(rows, failing.size(), limits)) {
    polynomial combo(x);
    for (std::size_t j = 0; j < failing.size(); ++j)
      if (sgn(c[j]) != 0) combo += c[j] * failing[j];
    out.push_back(std::move(combo));
  }
  return out;
}

}  // namespace detail

/// Candidate basis from the orbit system (exact kernel).
inline std::vector<polynomial> candidate_basis(const loop_spec& loop, std::size_t d, std::optional<std::size_t> M = {},
                                               const resource_limits& limits = {}, std::size_t window = 3) {
  require_equation_guard(loop, "candidates");
  require_init(loop, "candidates");
  if (d == 0) throw std::invalid_argument("candidates: degree must be at least 1");
  return detail::exact_candidates(loop, d, M.value_or(binomial(loop.arity() + d, d)), window, limits).polys;
}

/// Outcome of a truncated-ideal run that may stop early. `basis` carries
/// whatever was established before a resource ran out: `stage` names the
/// step that was running and, once the candidate kernel is known,
/// `basis.candidates` bounds the dimension from above.
struct truncated_attempt {
  invariant_basis basis;
  bool complete = false;
  std::string stage;
  std::optional<resource_kind> exhausted;
  std::string message;
};

namespace detail {

inline void truncated_run(const loop_spec& loop, std::size_t d, const truncated_options& options,
                          const resource_limits& limits, invariant_basis& out, std::string& stage) {
  const std::size_t n = loop.arity();
  const std::size_t M = options.rows.value_or(binomial(n + d, d));
  auto monos = monomial_basis(n, d);
  out.degree = d;
  out.disequality_folded = loop.guard_diseq.has_value();

  std::vector<polynomial> B;
  bool have = false;
  stage = "candidates";
  if (options.modular_candidates) {
    if (auto mod = modular_candidates(loop, d, M, options.confirm_window, limits)) {
      B = std::move(mod->polys);
      out.orbit_rows = mod->rows_used;
      have = true;
    }
  }
  if (!have) {
    auto ex = exact_candidates(loop, d, M, options.confirm_window, limits);
    B = std::move(ex.polys);
    out.orbit_rows = ex.rows_used;
    out.exact_candidates = true;
  }

  auto finish = [&](std::vector<polynomial> polys) {
    matrix_q vectors;
    for (const auto& p : polys) vectors.push_back(coefficients_of(p, monos));
    out.polynomials = polynomials_of(loop.vars, monos, vectors);
    out.dimension = out.polynomials.size();
    stage = "done";
  };

  out.candidates = B.size();
  stage = "verification";
  if (B.empty() || check_pi_all(loop, B, limits)) return finish(std::move(B));

  // Not every candidate is an invariant: redo the kernel exactly on all M+1 rows.
  if (!out.exact_candidates || options.confirm_window != 0) {
    stage = "exact candidates";
    auto ex = exact_candidates(loop, d, M, 0, limits);
    B = std::move(ex.polys);
    out.orbit_rows = ex.rows_used;
    out.exact_candidates = true;
    out.candidates = B.size();
    stage = "verification";
    if (B.empty() || check_pi_all(loop, B, limits)) return finish(std::move(B));
  }

  stage = "per-candidate check";
  std::vector<polynomial> failing, kept;
  for (const auto& h : B) (check_pi(loop, h, limits) ? kept : failing).push_back(h);
  out.failed_candidates = failing.size();
  if (failing.empty()) return finish(std::move(kept));
  out.provenance = basis_provenance::repaired_via_fallback;
  stage = "repair";
  auto repaired = repair(loop, failing, limits);
  kept.insert(kept.end(), repaired.begin(), repaired.end());
  finish(std::move(kept));
}

}  // namespace detail

/// truncated_invariant_ideal that reports partial progress instead of
/// throwing when a resource runs out.
inline truncated_attempt try_truncated_invariant_ideal(const loop_spec& loop, std::size_t d,
                                                       const truncated_options& options = {},
                                                       const resource_limits& limits = {}) {
  require_equation_guard(loop, "truncated");
  require_init(loop, "truncated");
  if (d == 0) throw std::invalid_argument("truncated: degree must be at least 1");
  truncated_attempt a;
  try {
    detail::truncated_run(loop, d, options, limits, a.basis, a.stage);
    a.complete = true;
  } catch (const resource_exhausted& e) {
    a.exhausted = e.kind();
    a.message = e.what();
  }
  return a;
}

/// Basis of the degree-d truncated invariant ideal of L(a, 0, F).
inline invariant_basis truncated_invariant_ideal(const loop_spec& loop, std::size_t d,
                                                 const truncated_options& options = {},
                                                 const resource_limits& limits = {}) {
  auto a = try_truncated_invariant_ideal(loop, d, options, limits);
  if (!a.complete) throw resource_exhausted(*a.exhausted, "truncated invariant ideal (" + a.stage + ")");
  return std::move(a.basis);
}

}  // namespace polyinv
