// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "polyinv/polynomial.hpp"
#include "polyinv/resource.hpp"

namespace polyinv {

/// F = (f1, ..., fn): one polynomial per variable of an n-variable ring.
class poly_map {
 public:
  poly_map() = default;
  poly_map(ring r, std::vector<polynomial> components) : ring_(std::move(r)), comps_(std::move(components)) {
    if (comps_.size() != ring_.size())
      throw std::invalid_argument("poly_map: " + std::to_string(comps_.size()) + " components for " +
                                  std::to_string(ring_.size()) + " variables");
    for (const auto& c : comps_)
      if (!(c.base_ring() == ring_)) throw ring_mismatch("poly_map: component outside the map's ring");
  }

  static poly_map identity(const ring& r) {
    std::vector<polynomial> comps;
    for (std::size_t i = 0; i < r.size(); ++i) comps.push_back(polynomial::variable(r, i));
    return poly_map(r, std::move(comps));
  }

  const ring& base_ring() const noexcept { return ring_; }
  std::size_t size() const noexcept { return comps_.size(); }
  const polynomial& operator[](std::size_t i) const { return comps_.at(i); }
  const std::vector<polynomial>& components() const noexcept { return comps_; }

  /// (F, identity) on a ring extended by new trailing variables.
  poly_map extended(const ring& target) const {
    if (!ring_.is_prefix_of(target)) throw ring_mismatch("poly_map::extended: not a ring extension");
    std::vector<polynomial> comps;
    for (const auto& c : comps_) comps.push_back(c.embed(target));
    for (std::size_t i = ring_.size(); i < target.size(); ++i) comps.push_back(polynomial::variable(target, i));
    return poly_map(target, std::move(comps));
  }

  point apply(const point& x) const {
    point y;
    y.reserve(comps_.size());
    for (const auto& c : comps_) y.push_back(c.eval(x));
    return y;
  }

  friend bool operator==(const poly_map&, const poly_map&) = default;

 private:
  ring ring_;
  std::vector<polynomial> comps_;
};

/// g(f1, ..., fn). The ring of g may extend F's ring by trailing variables
/// (template coefficients, auxiliary parameters); those map to themselves.
inline polynomial compose(const polynomial& g, const poly_map& F, const resource_limits& limits = {}) {
  const ring& target = g.base_ring();
  poly_map G = target == F.base_ring() ? F : F.extended(target);
  const std::size_t n = target.size();

  std::vector<std::vector<polynomial>> powers(n);
  auto power = [&](std::size_t i, monomial::exponent e) -> const polynomial& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(polynomial::constant(target, 1));
    while (pw.size() <= e) {
      check_deadline(limits, "compose");
      pw.push_back(pw.back() * G[i]);
      check_terms(limits, pw.back().size(), "compose");
    }
    return pw[e];
  };

  std::vector<term> acc;
  std::size_t merged = 0;
  for (const auto& t : g.terms()) {
    check_deadline(limits, "compose");
    polynomial prod = polynomial::constant(target, t.coeff);
    for (std::size_t i = 0; i < n; ++i) {
      auto e = t.mono[i];
      if (e == 0) continue;
      if (i >= F.size()) {
        prod = prod.shifted(monomial::variable(n, i, e));
      } else {
        prod *= power(i, e);
      }
    }
    check_terms(limits, prod.size(), "compose");
    acc.insert(acc.end(), prod.terms().begin(), prod.terms().end());
    if (acc.size() > 2 * merged + 65536) {
      auto sum = polynomial::from_terms(target, std::move(acc));
      acc = sum.terms();
      merged = acc.size();
      check_terms(limits, merged, "compose");
    }
  }
  auto out = polynomial::from_terms(target, std::move(acc));
  check_terms(limits, out.size(), "compose");
  return out;
}

inline std::vector<polynomial> compose_all(const std::vector<polynomial>& gs, const poly_map& F,
                                           const resource_limits& limits = {}) {
  std::vector<polynomial> out;
  out.reserve(gs.size());
  for (const auto& g : gs) out.push_back(compose(g, F, limits));
  return out;
}

/// F^k(a) for k = 0..steps, computed exactly.
inline std::vector<point> iterate(const poly_map& F, const point& start, std::size_t steps,
                                  const resource_limits& limits = {}) {
  std::vector<point> orbit{start};
  orbit.reserve(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    check_deadline(limits, "orbit");
    orbit.push_back(F.apply(orbit.back()));
    for (const auto& v : orbit.back()) check_coefficient(limits, v, "orbit");
  }
  return orbit;
}

}  // namespace polyinv
