// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/polynomial.hpp"
#include "polyinv/resource.hpp"

namespace polyinv {

namespace gb_detail {

struct gterm {
  integer c;
  monomial m;
};

// Integer polynomial, terms strictly descending in the active order.
using gpoly = std::vector<gterm>;

inline void sort_desc(gpoly& f, const monomial_order& ord) {
  std::sort(f.begin(), f.end(), [&](const gterm& a, const gterm& b) { return ord.greater(a.m, b.m); });
}

inline integer content(const gpoly& f, std::size_t from = 0) {
  integer g = 0;
  for (std::size_t i = from; i < f.size() && g != 1; ++i) g = gcd(g, f[i].c);
  return g;
}

// Divides by the content and makes the leading coefficient positive.
inline void make_primitive(gpoly& f) {
  if (f.empty()) return;
  integer g = content(f);
  if (sgn(f.front().c) < 0) g = -g;
  if (g != 1)
    for (auto& t : f) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), g.get_mpz_t());
}

inline gpoly from_polynomial(const polynomial& p, const monomial_order& ord) {
  gpoly f;
  if (p.is_zero()) return f;
  integer den = 1;
  for (const auto& t : p.terms()) den = lcm(den, integer(t.coeff.get_den()));
  f.reserve(p.size());
  for (const auto& t : p.terms()) f.push_back({integer(t.coeff.get_num()) * (den / integer(t.coeff.get_den())), t.mono});
  sort_desc(f, ord);
  make_primitive(f);
  return f;
}

inline polynomial to_polynomial(const gpoly& f, const ring& r) {
  std::vector<term> ts;
  ts.reserve(f.size());
  for (const auto& t : f) ts.push_back({rational(t.c), t.m});
  return polynomial::from_terms(r, std::move(ts));
}

// a*mf*f[ffrom..] - b*mg*g[gfrom..]; inputs and output sorted descending.
inline gpoly axpy(const integer& a, const monomial& mf, const gpoly& f, std::size_t ffrom, const integer& b,
                  const monomial& mg, const gpoly& g, std::size_t gfrom, const monomial_order& ord) {
  gpoly out;
  out.reserve(f.size() - ffrom + g.size() - gfrom);
  std::size_t i = ffrom, j = gfrom;
  const bool shift_f = !mf.is_one();
  auto fmono = [&](std::size_t k) { return shift_f ? f[k].m * mf : f[k].m; };
  while (i < f.size() || j < g.size()) {
    if (j == g.size()) {
      out.push_back({a * f[i].c, fmono(i)});
      ++i;
      continue;
    }
    monomial tg = g[j].m * mg;
    if (i == f.size()) {
      out.push_back({-(b * g[j].c), std::move(tg)});
      ++j;
      continue;
    }
    monomial tf = fmono(i);
    int c = ord.compare(tf, tg);
    if (c > 0) {
      out.push_back({a * f[i].c, std::move(tf)});
      ++i;
    } else if (c < 0) {
      out.push_back({-(b * g[j].c), std::move(tg)});
      ++j;
    } else {
      integer v = a * f[i].c - b * g[j].c;
      if (v != 0) out.push_back({std::move(v), std::move(tf)});
      ++i, ++j;
    }
  }
  return out;
}

// Sum of sorted term runs kept in buckets of geometrically growing size, so
// adding a short multiple of a divisor never rewrites the long dividend.
// Each bucket is ascending (leading term at the back).
class geobucket {
 public:
  struct qterm {
    rational c;
    monomial m;
  };

  explicit geobucket(const monomial_order& ord) : ord_(ord) {}

  std::size_t stored() const {
    std::size_t n = 0;
    for (const auto& b : buckets_) n += b.size();
    return n;
  }

  // Adds factor * shift * p[from..] (shift == nullptr: no shift).
  void add(const rational& factor, const monomial* shift, const gpoly& p, std::size_t from) {
    std::vector<qterm> run;
    run.reserve(p.size() - from);
    for (std::size_t i = p.size(); i-- > from;) {
      rational c = factor * p[i].c;
      run.push_back({std::move(c), shift ? p[i].m * *shift : p[i].m});
    }
    insert(std::move(run));
  }

  // Removes and returns the leading term; false once the sum is zero.
  bool pop_leading(qterm& out) {
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (buckets_[i].empty()) continue;
        if (!best || ord_.greater(buckets_[i].back().m, buckets_[*best].back().m)) best = i;
      }
      if (!best) return false;
      out = std::move(buckets_[*best].back());
      buckets_[*best].pop_back();
      for (std::size_t i = 0; i < buckets_.size(); ++i) {
        if (i == *best || buckets_[i].empty() || !(buckets_[i].back().m == out.m)) continue;
        out.c += buckets_[i].back().c;
        buckets_[i].pop_back();
      }
      if (sgn(out.c) != 0) return true;
    }
  }

 private:
  static std::size_t capacity(std::size_t i) { return std::size_t(8) << (2 * i); }

  void insert(std::vector<qterm> run) {
    std::size_t i = 0;
    while (capacity(i) < run.size()) ++i;
    for (;;) {
      if (buckets_.size() <= i) buckets_.resize(i + 1);
      run = merge(std::move(buckets_[i]), std::move(run));
      buckets_[i].clear();
      if (run.size() <= capacity(i)) {
        buckets_[i] = std::move(run);
        return;
      }
      ++i;
    }
  }

  std::vector<qterm> merge(std::vector<qterm> a, std::vector<qterm> b) const {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<qterm> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      int c = ord_.compare(a[i].m, b[j].m);
      if (c < 0) {
        out.push_back(std::move(a[i++]));
      } else if (c > 0) {
        out.push_back(std::move(b[j++]));
      } else {
        a[i].c += b[j].c;
        if (sgn(a[i].c) != 0) out.push_back(std::move(a[i]));
        ++i, ++j;
      }
    }
    for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
    for (; j < b.size(); ++j) out.push_back(std::move(b[j]));
    return out;
  }

  const monomial_order& ord_;
  std::vector<std::vector<qterm>> buckets_;
};

struct reduction_result {
  gpoly remainder;
  rational scale = 1;  // remainder = scale * (f mod G) over Q
};

// Multivariate division of f by `basis` (only entries with active[k] set).
// With `full`, every term is reduced; otherwise only the leading one.
inline reduction_result reduce(const gpoly& f, const std::vector<gpoly>& basis, const std::vector<char>& active,
                               const monomial_order& ord, const resource_limits& limits, bool full) {
  reduction_result out;
  geobucket sum(ord);
  sum.add(rational(1), nullptr, f, 0);
  std::vector<geobucket::qterm> done;
  geobucket::qterm lead;
  std::size_t steps = 0;
  bool reducing = true;
  while (sum.pop_leading(lead)) {
    std::optional<std::size_t> reducer;
    if (reducing)
      for (std::size_t k = 0; k < basis.size(); ++k)
        if (active[k] && lead.m.divisible_by(basis[k].front().m)) {
          reducer = k;
          break;
        }
    if (!reducer) {
      reducing = full;
      done.push_back(std::move(lead));
      continue;
    }
    const gpoly& g = basis[*reducer];
    monomial q = lead.m.quotient(g.front().m);
    rational factor = -lead.c / g.front().c;
    sum.add(factor, &q, g, 1);
    if (++steps % 64 == 0) {
      check_deadline(limits, "reduction");
      check_coefficient(limits, factor, "reduction");
      check_terms(limits, sum.stored() + done.size(), "reduction");
    }
  }
  integer den = 1;
  for (const auto& t : done) den = lcm(den, integer(t.c.get_den()));
  out.remainder.reserve(done.size());
  for (auto& t : done) out.remainder.push_back({integer(t.c.get_num()) * (den / integer(t.c.get_den())), std::move(t.m)});
  integer cont = out.remainder.empty() ? integer(1) : content(out.remainder);
  if (cont > 1)
    for (auto& t : out.remainder) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), cont.get_mpz_t());
  out.scale = rational(den, cont);
  out.scale.canonicalize();
  return out;
}

inline gpoly spoly(const gpoly& f, const gpoly& g, const monomial_order& ord) {
  monomial l = lcm(f.front().m, g.front().m);
  integer common = gcd(f.front().c, g.front().c);
  integer a = g.front().c / common;
  integer b = f.front().c / common;
  return axpy(a, l.quotient(f.front().m), f, 1, b, l.quotient(g.front().m), g, 1, ord);
}

struct critical_pair {
  std::size_t i, j;
  monomial lcm;
};

// Buchberger state with Gebauer-Moeller pair management.
class buchberger {
 public:
  buchberger(std::size_t nvars, const monomial_order& ord, const resource_limits& limits)
      : nvars_(nvars), ord_(ord), limits_(limits) {}

  // Adds polynomials already known to form a Groebner basis together with the
  // current basis (no pairs among them are generated).
  void seed(std::vector<gpoly> known) {
    for (auto& g : known) {
      if (g.empty()) continue;
      terms_ += g.size();
      basis_.push_back(std::move(g));
      active_.push_back(1);
    }
  }

  // Returns false once the ideal is known to be the unit ideal.
  bool add(gpoly h) {
    auto red = reduce(std::move(h), basis_, active_, ord_, limits_, true);
    return insert(std::move(red.remainder));
  }

  bool run() {
    while (!pairs_.empty()) {
      check_deadline(limits_, "Buchberger");
      if (limits_.max_pairs != 0 && ++processed_ > limits_.max_pairs)
        throw resource_exhausted(resource_kind::pairs, "Buchberger");
      std::size_t best = 0;
      for (std::size_t k = 1; k < pairs_.size(); ++k) {
        int c = ord_.compare(pairs_[k].lcm, pairs_[best].lcm);
        if (c < 0 || (c == 0 && std::pair(pairs_[k].j, pairs_[k].i) < std::pair(pairs_[best].j, pairs_[best].i)))
          best = k;
      }
      critical_pair p = pairs_[best];
      pairs_.erase(pairs_.begin() + static_cast<std::ptrdiff_t>(best));
      gpoly s = spoly(basis_[p.i], basis_[p.j], ord_);
      auto red = reduce(std::move(s), basis_, active_, ord_, limits_, true);
      if (!insert(std::move(red.remainder))) return false;
    }
    return true;
  }

  bool unit() const noexcept { return unit_; }

  // Reduced basis: minimal, tails reduced, primitive, sorted by leading monomial.
  std::vector<gpoly> reduced() const {
    if (unit_) return {gpoly{{integer(1), monomial(nvars_)}}};
    std::vector<gpoly> minimal;
    for (std::size_t k = 0; k < basis_.size(); ++k)
      if (active_[k]) minimal.push_back(basis_[k]);
    std::vector<char> on(minimal.size(), 1);
    std::vector<gpoly> out;
    for (std::size_t k = 0; k < minimal.size(); ++k) {
      on[k] = 0;
      gpoly head{minimal[k].front()};
      gpoly tail(minimal[k].begin() + 1, minimal[k].end());
      auto red = reduce(std::move(tail), minimal, on, ord_, limits_, true);
      on[k] = 1;
      // remainder = s * nf(tail), so s*head + remainder is the reduced element
      rational s = red.scale;
      integer num = s.get_num(), den = s.get_den();
      gpoly g;
      g.push_back({head.front().c * num, head.front().m});
      for (auto& t : red.remainder) g.push_back({t.c * den, std::move(t.m)});
      make_primitive(g);
      out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [&](const gpoly& a, const gpoly& b) { return ord_.greater(b.front().m, a.front().m); });
    return out;
  }

 private:
  bool insert(gpoly h) {
    if (h.empty()) return true;
    make_primitive(h);
    check_coefficient(limits_, h.front().c, "Buchberger");
    if (h.front().m.is_one()) {
      unit_ = true;
      pairs_.clear();
      return false;
    }
    terms_ += h.size();
    check_terms(limits_, terms_, "Buchberger");
    update(std::move(h));
    return true;
  }

  void update(gpoly h) {
    const std::size_t hi = basis_.size();
    const monomial& lh = h.front().m;

    std::vector<critical_pair> fresh;
    for (std::size_t k = 0; k < basis_.size(); ++k)
      if (active_[k]) fresh.push_back({k, hi, lcm(basis_[k].front().m, lh)});

    // Chain criterion among the new pairs: keep (g, h) unless another new pair's
    // lcm properly divides it; coprime pairs are kept here and dropped below.
    std::vector<char> keep(fresh.size(), 1);
    for (std::size_t a = 0; a < fresh.size(); ++a) {
      if (coprime(basis_[fresh[a].i].front().m, lh)) continue;
      for (std::size_t b = 0; b < fresh.size(); ++b) {
        if (a == b || !keep[b]) continue;
        if (fresh[a].lcm.divisible_by(fresh[b].lcm) &&
            (!(fresh[a].lcm == fresh[b].lcm) || b < a)) {
          keep[a] = 0;
          break;
        }
      }
    }
    std::vector<critical_pair> kept;
    for (std::size_t a = 0; a < fresh.size(); ++a)
      if (keep[a] && !coprime(basis_[fresh[a].i].front().m, lh)) kept.push_back(std::move(fresh[a]));

    // Old pairs (g1, g2) become redundant when lm(h) divides lcm(g1, g2) and
    // neither lcm with h equals it.
    std::erase_if(pairs_, [&](const critical_pair& p) {
      if (!p.lcm.divisible_by(lh)) return false;
      monomial l1 = lcm(basis_[p.i].front().m, lh);
      monomial l2 = lcm(basis_[p.j].front().m, lh);
      return !(l1 == p.lcm) && !(l2 == p.lcm);
    });
    for (auto& p : kept) pairs_.push_back(std::move(p));

    for (std::size_t k = 0; k < basis_.size(); ++k)
      if (active_[k] && basis_[k].front().m.divisible_by(lh)) active_[k] = 0;
    basis_.push_back(std::move(h));
    active_.push_back(1);
  }

  std::size_t nvars_;
  monomial_order ord_;
  const resource_limits& limits_;
  std::vector<gpoly> basis_;
  std::vector<char> active_;
  std::vector<critical_pair> pairs_;
  std::size_t processed_ = 0;
  std::size_t terms_ = 0;
  bool unit_ = false;
};

}  // namespace gb_detail

/// Reduced Groebner basis of an ideal together with the generators it came from.
class groebner_basis {
 public:
  groebner_basis() = default;
  groebner_basis(ring r, monomial_order ord, std::vector<gb_detail::gpoly> basis, std::vector<polynomial> source)
      : ring_(std::move(r)), order_(ord), basis_(std::move(basis)), source_(std::move(source)) {
    for (const auto& g : basis_) generators_.push_back(gb_detail::to_polynomial(g, ring_));
  }

  const ring& base_ring() const noexcept { return ring_; }
  const monomial_order& order() const noexcept { return order_; }
  const std::vector<polynomial>& generators() const noexcept { return generators_; }
  const std::vector<polynomial>& source_ideal() const noexcept { return source_; }
  const std::vector<gb_detail::gpoly>& internal() const noexcept { return basis_; }

  bool is_unit() const noexcept { return basis_.size() == 1 && basis_.front().front().m.is_one(); }
  bool is_zero_ideal() const noexcept { return basis_.empty(); }

  /// Remainder of f on division by the basis, over Q.
  polynomial normal_form(const polynomial& f, const resource_limits& limits = {}) const {
    require_ring(f);
    if (f.is_zero()) return f;
    // keep f's own scaling: integer form times its Q-scale, reduced, rescaled
    integer den = 1;
    for (const auto& t : f.terms()) den = lcm(den, integer(t.coeff.get_den()));
    gb_detail::gpoly g;
    for (const auto& t : f.terms()) g.push_back({integer(t.coeff.get_num()) * (den / integer(t.coeff.get_den())), t.mono});
    gb_detail::sort_desc(g, order_);
    std::vector<char> all(basis_.size(), 1);
    auto red = gb_detail::reduce(std::move(g), basis_, all, order_, limits, true);
    rational factor = 1 / (red.scale * rational(den));
    std::vector<term> ts;
    for (const auto& t : red.remainder) ts.push_back({rational(t.c) * factor, t.m});
    return polynomial::from_terms(ring_, std::move(ts));
  }

  /// Ideal membership: f reduces to zero.
  bool contains(const polynomial& f, const resource_limits& limits = {}) const {
    require_ring(f);
    if (f.is_zero()) return true;
    std::vector<char> all(basis_.size(), 1);
    auto red = gb_detail::reduce(gb_detail::from_polynomial(f, order_), basis_, all, order_, limits, false);
    return red.remainder.empty();
  }

 private:
  void require_ring(const polynomial& f) const {
    if (!(f.base_ring() == ring_)) throw ring_mismatch("polynomial and Groebner basis live in different rings");
  }

  ring ring_;
  monomial_order order_;
  std::vector<gb_detail::gpoly> basis_;
  std::vector<polynomial> generators_;
  std::vector<polynomial> source_;
};

/// Reduced Groebner basis of <gens> in ring `r` (needed when gens is empty).
inline groebner_basis compute_groebner_basis(const ring& r, const std::vector<polynomial>& gens,
                                             const monomial_order& order = monomial_order::grevlex(),
                                             const resource_limits& limits = {}) {
  gb_detail::buchberger bb(r.size(), order, limits);
  for (const auto& g : gens) {
    if (!(g.base_ring() == r)) throw ring_mismatch("generator outside the requested ring");
    if (!bb.add(gb_detail::from_polynomial(g, order))) break;
  }
  if (!bb.unit()) bb.run();
  return groebner_basis(r, order, bb.reduced(), gens);
}

inline groebner_basis compute_groebner_basis(const std::vector<polynomial>& gens,
                                             const monomial_order& order = monomial_order::grevlex(),
                                             const resource_limits& limits = {}) {
  if (gens.empty()) throw std::invalid_argument("compute_groebner_basis: empty generator list needs an explicit ring");
  return compute_groebner_basis(gens.front().base_ring(), gens, order, limits);
}

/// Groebner basis of <known, extra>, reusing `known` (already a basis).
/// `order` must agree with known.order() on the known ring's monomials.
inline groebner_basis extend_groebner_basis(const groebner_basis& known, const ring& target,
                                            const std::vector<polynomial>& extra, const monomial_order& order,
                                            const resource_limits& limits = {}) {
  if (!known.base_ring().is_prefix_of(target)) throw ring_mismatch("extend_groebner_basis: not a ring extension");
  const std::size_t pad = target.size() - known.base_ring().size();
  std::vector<gb_detail::gpoly> seeded;
  for (const auto& g : known.internal()) {
    gb_detail::gpoly e;
    for (const auto& t : g) e.push_back({t.c, t.m.extended(pad)});
    gb_detail::sort_desc(e, order);
    seeded.push_back(std::move(e));
  }
  gb_detail::buchberger bb(target.size(), order, limits);
  std::vector<polynomial> source;
  for (const auto& s : known.source_ideal()) source.push_back(pad == 0 ? s : s.embed(target));
  if (known.is_unit()) {
    bb.add(std::move(seeded.front()));
  } else {
    bb.seed(std::move(seeded));
    for (const auto& g : extra) {
      source.push_back(g);
      if (!bb.add(gb_detail::from_polynomial(g, order))) break;
    }
    if (!bb.unit()) bb.run();
  }
  return groebner_basis(target, order, bb.reduced(), std::move(source));
}

inline polynomial normal_form(const polynomial& f, const groebner_basis& gb) { return gb.normal_form(f); }

/// S-polynomial certificate: every pair of basis elements has an S-polynomial
/// that reduces to zero.
inline bool satisfies_buchberger_criterion(const groebner_basis& gb) {
  const auto& b = gb.internal();
  std::vector<char> all(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      auto s = gb_detail::spoly(b[i], b[j], gb.order());
      if (!gb_detail::reduce(std::move(s), b, all, gb.order(), {}, true).remainder.empty()) return false;
    }
  return true;
}

/// Name reserved for the Rabinowitsch variable.
inline constexpr const char* rabinowitsch_variable = "__t";

namespace detail {

// 1 - t*f is added to a known basis of the generators in the ring extended by t.
inline bool rabinowitsch_unit(const polynomial& f, const groebner_basis& gens_gb, const resource_limits& limits) {
  const ring& r = gens_gb.base_ring();
  ring ext = r.extended({r.fresh_name(rabinowitsch_variable)});
  polynomial t = polynomial::variable(ext, ext.size() - 1);
  polynomial aux = polynomial::constant(ext, 1) - t * f.embed(ext);
  const auto kind = gens_gb.order().type;
  if (kind == monomial_order::kind::grevlex || kind == monomial_order::kind::lex) {
    auto order = kind == monomial_order::kind::lex ? monomial_order::lex() : monomial_order::block_elim(r.size());
    return extend_groebner_basis(gens_gb, ext, {aux}, order, limits).is_unit();
  }
  std::vector<polynomial> gens{aux};
  for (const auto& g : gens_gb.generators()) gens.push_back(g.embed(ext));
  return compute_groebner_basis(ext, gens, monomial_order::lex(), limits).is_unit();
}

}  // namespace detail

/// f in sqrt(<gens>), decided by whether <gens, 1 - t*f> is the unit ideal.
inline bool radical_membership(const polynomial& f, const std::vector<polynomial>& gens,
                               const resource_limits& limits = {}) {
  auto gb = compute_groebner_basis(f.base_ring(), gens, limits.ideal_order, limits);
  if (f.is_zero() || gb.is_unit()) return true;
  return detail::rabinowitsch_unit(f, gb, limits);
}

/// Every f in fs lies in the radical of the ideal with basis `gb`. Plain ideal
/// membership is tried first; only the remaining polynomials go through the
/// auxiliary-variable test.
inline bool radical_contains_all(const std::vector<polynomial>& fs, const groebner_basis& gb,
                                 const resource_limits& limits = {}) {
  if (gb.is_unit()) return true;
  for (const auto& f : fs) {
    if (gb.contains(f, limits)) continue;
    if (!detail::rabinowitsch_unit(f, gb, limits)) return false;
  }
  return true;
}

inline bool radical_contains_all(const std::vector<polynomial>& fs, const std::vector<polynomial>& gens,
                                 const resource_limits& limits = {}) {
  if (fs.empty()) return true;
  auto gb = compute_groebner_basis(fs.front().base_ring(), gens, limits.ideal_order, limits);
  return radical_contains_all(fs, gb, limits);
}

}  // namespace polyinv
