// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "polyinv/invariant_set.hpp"

namespace polyinv {

struct lift_result {
  bool liftable = false;
  invariant_set_result chain;  // on ({f - t}, (F, t))
  bool zero_updates = false;   // the chain stopped before any update
  bool first_image_in_radical = false;  // f∘F - t lies in sqrt(<f - t>)
};

/// f(x) - f(a) is an invariant for every initial value a exactly when the
/// invariant set of V(f - t) under (F, t) is V(f - t) itself.
inline lift_result lift_invariant(const polynomial& f, const poly_map& F, const resource_limits& limits = {}) {
  const ring& x = F.base_ring();
  if (!(f.base_ring() == x)) throw ring_mismatch("lift: polynomial and map live in different rings");
  ring ext = x.extended({x.fresh_name("__t")});
  polynomial t = polynomial::variable(ext, x.size());
  polynomial level = f.embed(ext) - t;
  poly_map F1 = F.extended(ext);

  lift_result out;
  out.chain = invariant_set({level}, F1, limits);
  require_stabilized(out.chain);
  auto gb = compute_groebner_basis(ext, {level}, limits.ideal_order, limits);
  out.liftable = radical_contains_all(out.chain.generators, gb, limits);
  out.zero_updates = out.chain.iterations == 0;
  out.first_image_in_radical = radical_contains_all({compose(level, F1, limits)}, gb, limits);
  return out;
}

}  // namespace polyinv
