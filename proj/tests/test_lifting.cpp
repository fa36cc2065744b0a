// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace polyinv;
using polyinv::testing::load_loop;
using polyinv::testing::P;
using polyinv::testing::Ps;

namespace {

// The three observations that must agree on every lift.
void expect_consistent(const lift_result& r) {
  EXPECT_TRUE(r.chain.stabilized());
  EXPECT_EQ(r.liftable, r.zero_updates);
  EXPECT_EQ(r.liftable, r.first_image_in_radical);
}

// f - f(a) vanishes on orbits from random initial values.
void expect_sound(const polynomial& f, const loop_spec& base, unsigned seed) {
  polyinv::testing::poly_generator gen(seed);
  for (int k = 0; k < 10; ++k) {
    auto loop = base;
    loop.init = gen.random_point(loop.arity(), 3);
    auto g = f - polynomial::constant(f.base_ring(), f.eval(*loop.init));
    EXPECT_TRUE(check_pi(loop, g)) << to_string(f);
    EXPECT_TRUE(vanishes_on_orbit({g}, orbit_prefix(loop.body, *loop.init, 50, 4096)));
  }
}

// Degree-3 invariants of the benchmarks with their constant term removed.
TEST(Lift, FibonacciFamilyInvariants) {
  struct lift_case {
    const char* name;
    const char* f;
  };
  for (auto [name, text] : {lift_case{"fib1", "x1^2 + x2^2 + x3^2 - 2*x1*x2*x3"},
                            lift_case{"fib2", "-x2 - 2*x1*x3 + 4*x1^2*x2"},
                            lift_case{"fib3", "x1 + x2 + x3 - x1^2 + x1*x2 + x1*x3 - x2^2 + x2*x3 - x3^2 + x1*x2*x3"}}) {
    auto loop = load_loop(std::string("benchmarks/") + name + ".loop");
    auto f = P(text, loop.vars);
    // the stripped polynomial is the computed basis element up to its constant
    auto basis = truncated_invariant_ideal(loop, 3).polynomials;
    ASSERT_EQ(basis.size(), 1u);
    auto g = basis[0];
    g -= polynomial::constant(loop.vars, g.constant_term());
    EXPECT_EQ(canonical(g), canonical(f)) << name;

    auto r = lift_invariant(f, loop.body);
    EXPECT_TRUE(r.liftable) << name;
    expect_consistent(r);
    expect_sound(f, loop, 40);
    // with the constant kept the answer is the same
    EXPECT_TRUE(lift_invariant(basis[0], loop.body).liftable) << name;
  }
}

TEST(Lift, ConstantLifts) {
  ring r = ring::numbered(2);
  auto res = lift_invariant(P("7", r), poly_map(r, Ps({"x1 + 1", "x1*x2"}, r)));
  EXPECT_TRUE(res.liftable);
  expect_consistent(res);
}

TEST(Lift, IncreasingCoordinateDoesNotLift) {
  ring r = ring::numbered(2);
  auto res = lift_invariant(P("x1", r), poly_map(r, Ps({"x1 + 1", "x2"}, r)));
  EXPECT_FALSE(res.liftable);
  expect_consistent(res);
}

TEST(Lift, CassiniSquareLiftsForFibonacci) {
  auto loop = load_loop("benchmarks/fibonacci.loop");
  auto q = P("x1^2 + x1*x2 - x2^2", loop.vars);
  auto res = lift_invariant(q * q, loop.body);
  EXPECT_TRUE(res.liftable);
  expect_consistent(res);
  expect_sound(q * q, loop, 41);
  // q itself flips sign every step
  auto once = lift_invariant(q, loop.body);
  EXPECT_FALSE(once.liftable);
  expect_consistent(once);
}

TEST(Lift, SquaresLinearInvariantIsTiedToItsInitialValue) {
  auto loop = load_loop("benchmarks/squares.loop");
  auto f = P("x1 + x2 + x3", loop.vars);
  auto res = lift_invariant(f, loop.body);
  EXPECT_FALSE(res.liftable);
  expect_consistent(res);
  // oracle: an initial value whose orbit changes x1 + x2 + x3
  auto path = iterate(loop.body, point{rational(0), rational(0), rational(0)}, 2);
  EXPECT_NE(f.eval(path[0]), f.eval(path[1]));
}

TEST(Lift, RingMismatchIsRejected) {
  ring r2 = ring::numbered(2), r3 = ring::numbered(3);
  EXPECT_THROW(lift_invariant(P("x1", r3), poly_map(r2, Ps({"x1", "x2"}, r2))), ring_mismatch);
}

// Random polynomials under random maps: the observations agree, positives
// are sound, negatives have an orbit witness.
TEST(Properties, RandomLifts) {
  polyinv::testing::poly_generator gen(90);
  ring r = ring::numbered(2);
  int positives = 0, negatives = 0;
  for (int k = 0; k < 60; ++k) {
    poly_map F = gen.random_map(r, 2, k % 2 ? 1 : 2);
    polynomial f = gen.random(r, 3, 2);
    // some cases built to lift: symmetric f under the coordinate swap
    if (k % 5 == 0) {
      F = poly_map(r, Ps({"x2", "x1"}, r));
      f = gen.small_rational() * P("x1 + x2", r) + P("x1*x2", r);
    }
    resource_limits caps;
    caps.max_iterations = 8;
    caps.with_timeout(std::chrono::seconds(10));
    lift_result res;
    try {
      res = lift_invariant(f, F, caps);
    } catch (const resource_exhausted&) {
      continue;
    }
    expect_consistent(res);
    loop_spec loop;
    loop.vars = r;
    loop.body = F;
    if (res.liftable) {
      ++positives;
      expect_sound(f, loop, 100 + k);
    } else {
      ++negatives;
      bool witness = false;
      for (int j = 0; j < 20 && !witness; ++j) {
        auto a = gen.random_point(2, 3);
        auto path = orbit_prefix(F, a, 6, 4096);
        for (const auto& x : path) witness = witness || f.eval(x) != f.eval(a);
      }
      EXPECT_TRUE(witness) << to_string(f);
    }
  }
  EXPECT_GE(positives, 10);
  EXPECT_GE(negatives, 10);
}

}  // namespace
