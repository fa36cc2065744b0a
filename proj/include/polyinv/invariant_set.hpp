// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polyinv/groebner.hpp"
#include "polyinv/poly_map.hpp"
#include "polyinv/resource.hpp"

namespace polyinv {

enum class invariant_status { stabilized, resource_exhausted };

inline const char* to_string(invariant_status s) {
  return s == invariant_status::stabilized ? "stabilized" : "resource_exhausted";
}

/// Generators g, g∘F, ..., g∘F^N of the invariant set S_(F, V(g)).
struct invariant_set_result {
  std::vector<polynomial> generators;
  std::size_t iterations = 0;  // number of chain updates N
  invariant_status status = invariant_status::stabilized;
  std::optional<resource_kind> exhausted;
  std::string message;
  groebner_basis basis;  // of `generators`, in limits.ideal_order

  bool stabilized() const noexcept { return status == invariant_status::stabilized; }
  bool full_space() const noexcept { return generators.empty(); }
};

/// Iterates g <- g∘F until the newest generation lies in the radical of
/// everything collected so far. Resource exhaustion returns the partial chain.
inline invariant_set_result invariant_set(const std::vector<polynomial>& guard, const poly_map& F,
                                          const resource_limits& limits = {}) {
  invariant_set_result out;
  if (guard.empty()) {
    out.basis = compute_groebner_basis(F.base_ring(), {}, limits.ideal_order, limits);
    return out;
  }
  const ring& r = guard.front().base_ring();
  for (const auto& g : guard)
    if (!(g.base_ring() == r)) throw ring_mismatch("invariant_set: guard polynomials in different rings");

  try {
    out.generators = guard;
    out.basis = compute_groebner_basis(r, guard, limits.ideal_order, limits);
    std::vector<polynomial> generation = compose_all(guard, F, limits);
    while (!radical_contains_all(generation, out.basis, limits)) {
      if (out.iterations >= limits.max_iterations)
        throw resource_exhausted(resource_kind::iterations, "invariant set");
      out.basis = extend_groebner_basis(out.basis, r, generation, limits.ideal_order, limits);
      out.generators.insert(out.generators.end(), generation.begin(), generation.end());
      ++out.iterations;
      generation = compose_all(generation, F, limits);
    }
  } catch (const resource_exhausted& e) {
    out.status = invariant_status::resource_exhausted;
    out.exhausted = e.kind();
    out.message = e.what();
  }
  return out;
}

/// Turns a partial chain back into the resource error that stopped it.
inline void require_stabilized(const invariant_set_result& r) {
  if (!r.stabilized()) throw resource_exhausted(*r.exhausted, "invariant set");
}

/// Certificate that F maps V(generators) into itself:
/// s∘F lies in the radical for every generator s.
inline bool forward_invariance_certificate(const invariant_set_result& result, const poly_map& F,
                                           const resource_limits& limits = {}) {
  if (result.full_space()) return true;
  return radical_contains_all(compose_all(result.generators, F, limits), result.basis, limits);
}

}  // namespace polyinv
