// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

using namespace polyinv;
using polyinv::testing::load_loop;
using polyinv::testing::P;
using polyinv::testing::Ps;
using polyinv::testing::same_span;
using polyinv::testing::span_rank;
using polyinv::testing::spans;

namespace {

const char* kFib1 = "-2 + x1^2 + x2^2 + x3^2 - 2*x1*x2*x3";
const char* kFib2 = "76 - x2 - 2*x1*x3 + 4*x1^2*x2";
const char* kFib3 = "7 + x1 + x2 + x3 - x1^2 + x1*x2 + x1*x3 - x2^2 + x2*x3 - x3^2 + x1*x2*x3";
const char* kFibonacci = "-1 + x1^4 + 2*x1^3*x2 - x1^2*x2^2 - 2*x1*x2^3 + x2^4";

// Orbit points kept below this many bits per coordinate; the quadratic
// benchmarks reach it after 8 to 30 steps.
constexpr std::size_t kOrbitBits = 65536;

loop_spec bench(const std::string& name) { return load_loop("benchmarks/" + name + ".loop"); }

// The last element's constant is -2; with +2 it is the constant 4 on the orbit.
std::vector<polynomial> squares_degree_two(const ring& r) {
  return Ps({"1 + x1 + x2 + x3", "1 + x1 + x2 + x3^2", "2 + 3*x1 + 3*x2 + x1^2 + 2*x1*x2 + x2^2",
             "-2 - x1 - 3*x2 + x1^2 + 2*x1*x3 - x2^2", "-2 - 3*x1 - x2 - x1^2 + x2^2 + 2*x2*x3"},
            r);
}

void expect_vanishes_on_orbit(const loop_spec& loop, const std::vector<polynomial>& ps) {
  auto points = orbit_prefix(loop.body, *loop.init, 50, kOrbitBits);
  ASSERT_GE(points.size(), 8u);
  for (const auto& p : ps) {
    auto g = loop.guard_diseq ? *loop.guard_diseq * p : p;
    EXPECT_TRUE(vanishes_on_orbit({g}, points)) << to_string(p);
  }
}

TEST(KernelBasis, ZeroMatrixGivesEveryStandardVector) {
  matrix_q zero(3, vector_q(4, rational(0)));
  auto k = kernel_basis(zero, 4);
  ASSERT_EQ(k.size(), 4u);
  matrix_q identity(4, vector_q(4, rational(0)));
  for (std::size_t i = 0; i < 4; ++i) identity[i][i] = 1;
  EXPECT_TRUE(same_span(k, identity, 4));
  EXPECT_EQ(kernel_basis({}, 3).size(), 3u);
}

TEST(KernelBasis, IdentityHasNoKernel) {
  matrix_q identity(5, vector_q(5, rational(0)));
  for (std::size_t i = 0; i < 5; ++i) identity[i][i] = 1;
  EXPECT_TRUE(kernel_basis(identity, 5).empty());
}

TEST(KernelBasis, RandomSystemsSatisfyRankNullity) {
  polyinv::testing::poly_generator gen(12);
  std::uniform_int_distribution<int> dim(1, 7);
  for (int k = 0; k < 200; ++k) {
    std::size_t rows = dim(gen.engine()), cols = dim(gen.engine());
    matrix_q A(rows);
    for (auto& row : A) {
      row = gen.random_point(cols, 3);
      // make some rows dependent
      if (k % 4 == 0 && &row != &A[0]) row = A[0];
    }
    auto K = kernel_basis(A, cols);
    EXPECT_EQ(K.size() + rank(A, cols), cols);
    for (const auto& v : K)
      for (const auto& row : A) {
        rational dot = 0;
        for (std::size_t j = 0; j < cols; ++j) dot += row[j] * v[j];
        EXPECT_EQ(dot, 0);
      }
    if (!K.empty()) {
      EXPECT_EQ(rank(K, cols), K.size());
    }
    EXPECT_EQ(kernel_basis(A, cols), K);
  }
}

TEST(KernelBasis, SquaresDegreeTwoSystem) {
  auto loop = bench("squares");
  auto monos = monomial_basis(3, 2);
  auto rows = orbit_system(loop, 2, 9);
  ASSERT_EQ(rows.size(), 10u);
  ASSERT_EQ(rows[0].size(), 10u);
  auto K = kernel_basis(rows, monos.size());
  ASSERT_EQ(K.size(), 5u);
  EXPECT_TRUE(same_span(detail::polynomials_of(loop.vars, monos, K), squares_degree_two(loop.vars)));
}

TEST(CandidateBasis, SquaresDegreeTwo) {
  auto loop = bench("squares");
  auto B = candidate_basis(loop, 2);
  EXPECT_EQ(B.size(), 5u);
  EXPECT_TRUE(same_span(B, squares_degree_two(loop.vars)));
}

TEST(CandidateBasis, Fib1DegreeTwoIsEmpty) { EXPECT_TRUE(candidate_basis(bench("fib1"), 2).empty()); }

TEST(CandidateBasis, OriginFixedByTheMapGivesEveryVariable) {
  auto loop = parse_loop("vars: x1, x2, x3\ninit: 0, 0, 0\nguard: true\nbody: x1 <- x2*x3; x2 <- x1 + x3^2; x3 <- 3*x1\n");
  auto B = candidate_basis(loop, 1);
  EXPECT_TRUE(spans(B, Ps({"x1", "x2", "x3"}, loop.vars)));
  EXPECT_EQ(truncated_invariant_ideal(loop, 1).dimension, 3u);
}

TEST(CandidateBasis, Preconditions) {
  auto loop = bench("fib1");
  EXPECT_THROW(candidate_basis(loop, 0), std::invalid_argument);
  EXPECT_THROW(truncated_invariant_ideal(loop, 0), std::invalid_argument);
  auto open = load_loop("benchmarks/worked/parametric_example.loop");
  EXPECT_THROW(candidate_basis(open, 2), std::invalid_argument);
  EXPECT_THROW(truncated_invariant_ideal(open, 2), std::invalid_argument);
}

TEST(TruncatedIdeal, Fib1) {
  auto loop = bench("fib1");
  auto g = P(kFib1, loop.vars);
  auto d3 = truncated_invariant_ideal(loop, 3);
  EXPECT_EQ(d3.dimension, 1u);
  EXPECT_EQ(canonical(d3.polynomials.at(0)), canonical(g));
  auto d4 = truncated_invariant_ideal(loop, 4);
  EXPECT_EQ(d4.dimension, 4u);
  auto x = [&](const char* v) { return P(v, loop.vars); };
  EXPECT_TRUE(same_span(d4.polynomials, {g, x("x1") * g, x("x2") * g, x("x3") * g}));
}

TEST(TruncatedIdeal, Fib2AndFib3DegreeThree) {
  auto fib2 = bench("fib2");
  auto b2 = truncated_invariant_ideal(fib2, 3);
  ASSERT_EQ(b2.dimension, 1u);
  EXPECT_EQ(canonical(b2.polynomials[0]), canonical(P(kFib2, fib2.vars)));
  auto fib3 = bench("fib3");
  auto b3 = truncated_invariant_ideal(fib3, 3);
  ASSERT_EQ(b3.dimension, 1u);
  EXPECT_EQ(canonical(b3.polynomials[0]), canonical(P(kFib3, fib3.vars)));
}

TEST(TruncatedIdeal, ClassicalFibonacci) {
  auto loop = bench("fibonacci");
  EXPECT_EQ(truncated_invariant_ideal(loop, 1).dimension, 0u);
  EXPECT_EQ(truncated_invariant_ideal(loop, 2).dimension, 0u);
  EXPECT_EQ(truncated_invariant_ideal(loop, 3).dimension, 0u);
  auto d4 = truncated_invariant_ideal(loop, 4);
  ASSERT_EQ(d4.dimension, 1u);
  EXPECT_EQ(canonical(d4.polynomials[0]), canonical(P(kFibonacci, loop.vars)));
}

TEST(TruncatedIdeal, SquaresDegreeTwoFiveElementBasis) {
  auto loop = bench("squares");
  auto b = truncated_invariant_ideal(loop, 2);
  EXPECT_EQ(b.dimension, 5u);
  EXPECT_EQ(b.provenance, basis_provenance::all_candidates_verified);
  EXPECT_TRUE(same_span(b.polynomials, squares_degree_two(loop.vars)));
  auto shifted = P("2 - 3*x1 - x2 - x1^2 + x2^2 + 2*x2*x3", loop.vars);
  for (const auto& a : orbit(loop, 6)) EXPECT_EQ(shifted.eval(a), 4);
  EXPECT_FALSE(check_pi(loop, shifted));
  auto d1 = truncated_invariant_ideal(loop, 1);
  ASSERT_EQ(d1.dimension, 1u);
  EXPECT_EQ(canonical(d1.polynomials[0]), canonical(P("1 + x1 + x2 + x3", loop.vars)));
}

TEST(TruncatedIdeal, Yagzhev9LinearInvariants) {
  auto loop = bench("yagzhev9");
  auto b = truncated_invariant_ideal(loop, 1);
  EXPECT_EQ(b.dimension, 3u);
  EXPECT_TRUE(same_span(b.polynomials, Ps({"x1 - x3 + x5", "x2 - x4 + x6", "x8 - x7 - 7"}, loop.vars)));
}

TEST(TruncatedIdeal, BenchmarkDimensionTable) {
  const std::map<std::string, std::vector<std::size_t>> table{
      {"fib1", {0, 0, 1, 4}},      {"fib2", {0, 0, 1}},        {"fib3", {0, 0, 1, 4}},
      {"nagata", {1, 5, 13, 26}},  {"example9", {0, 0, 3, 11}}, {"example10", {0, 2, 8, 19}},
      {"squares", {1, 5, 13, 26}}, {"yagzhev9", {3}},           {"yagzhev11", {0, 0}},
  };
  for (const auto& [name, dims] : table) {
    auto loop = bench(name);
    for (std::size_t d = 1; d <= dims.size(); ++d) {
      auto b = truncated_invariant_ideal(loop, d);
      EXPECT_EQ(b.dimension, dims[d - 1]) << name << " degree " << d;
      EXPECT_EQ(b.polynomials.size(), b.dimension);
      EXPECT_EQ(span_rank(b.polynomials), b.dimension) << name << " degree " << d;
    }
  }
}

TEST(TruncatedIdeal, SquaresDegreesThreeAndFour) {
  auto loop = bench("squares");
  auto d3 = truncated_invariant_ideal(loop, 3);
  auto d4 = truncated_invariant_ideal(loop, 4);
  EXPECT_EQ(d3.dimension, 13u);
  EXPECT_EQ(d4.dimension, 26u);
  EXPECT_TRUE(spans(d4.polynomials, d3.polynomials));
}

TEST(TruncatedIdeal, DisequalityIsFoldedIntoTheInvariants) {
  // x stays 1 while y counts up; the disequality holds on the whole orbit
  auto loop = parse_loop("vars: x, y\ninit: 1, 0\nguard: x != 0\nbody: x <- x; y <- y + 1\n");
  auto b = truncated_invariant_ideal(loop, 1);
  EXPECT_TRUE(b.disequality_folded);
  ASSERT_EQ(b.dimension, 1u);
  EXPECT_EQ(canonical(b.polynomials[0]), canonical(P("x - 1", loop.vars)));
  expect_vanishes_on_orbit(loop, b.polynomials);
}

TEST(TruncatedIdeal, GuardEquationsDoNotChangeTheBasis) {
  auto guarded = parse_loop("vars: x, y\ninit: 1, 0\nguard: x - 1 = 0\nbody: x <- x; y <- y + 1\n");
  auto open = parse_loop("vars: x, y\ninit: 1, 0\nguard: true\nbody: x <- x; y <- y + 1\n");
  for (std::size_t d = 1; d <= 3; ++d)
    EXPECT_EQ(truncated_invariant_ideal(guarded, d).polynomials, truncated_invariant_ideal(open, d).polynomials);
}

TEST(Repair, TooFewRowsFallBackToTheExtendedChain) {
  struct repair_case {
    const char* name;
    std::size_t d, rows;
  };
  for (auto [name, d, rows] : {repair_case{"squares", 1, 1}, repair_case{"nagata", 1, 1},
                               repair_case{"fibonacci", 2, 2}, repair_case{"fib1", 1, 1}}) {
    auto loop = bench(name);
    truncated_options few;
    few.rows = rows;
    auto repaired = truncated_invariant_ideal(loop, d, few);
    auto reference = truncated_invariant_ideal(loop, d);
    EXPECT_EQ(repaired.provenance, basis_provenance::repaired_via_fallback) << name;
    EXPECT_GT(repaired.failed_candidates, 0u) << name;
    EXPECT_GT(repaired.candidates, reference.dimension) << name;
    EXPECT_EQ(repaired.dimension, reference.dimension) << name;
    EXPECT_TRUE(same_span(repaired.polynomials, reference.polynomials)) << name;
    expect_vanishes_on_orbit(loop, repaired.polynomials);
  }
}

TEST(Repair, NagataKeepsTheVerifiedCandidate) {
  auto loop = bench("nagata");
  truncated_options few;
  few.rows = 1;
  auto b = truncated_invariant_ideal(loop, 1, few);
  EXPECT_EQ(b.candidates, 2u);
  EXPECT_EQ(b.failed_candidates, 1u);
  ASSERT_EQ(b.dimension, 1u);
  EXPECT_EQ(canonical(b.polynomials[0]), canonical(P("x3 - 5", loop.vars)));
}

TEST(Limits, ExpiredDeadlineReportsTheStage) {
  auto loop = bench("yagzhev9");
  resource_limits past;
  past.deadline = std::chrono::steady_clock::now();
  auto a = try_truncated_invariant_ideal(loop, 2, {}, past);
  EXPECT_FALSE(a.complete);
  ASSERT_TRUE(a.exhausted);
  EXPECT_EQ(*a.exhausted, resource_kind::deadline);
  EXPECT_EQ(a.stage, "candidates");
  EXPECT_FALSE(a.message.empty());
  try {
    truncated_invariant_ideal(loop, 2, {}, past);
    FAIL() << "expected resource_exhausted";
  } catch (const resource_exhausted& e) {
    EXPECT_EQ(e.kind(), resource_kind::deadline);
  }
}

TEST(Limits, PartialDataSurvivesAVerificationCap) {
  // candidates need no composition; a tiny term cap then stops the chain
  auto loop = bench("yagzhev9");
  resource_limits caps;
  caps.max_terms = 50;
  auto a = try_truncated_invariant_ideal(loop, 2, {}, caps);
  EXPECT_FALSE(a.complete);
  ASSERT_TRUE(a.exhausted);
  EXPECT_EQ(*a.exhausted, resource_kind::terms);
  EXPECT_EQ(a.stage, "verification");
  EXPECT_EQ(a.basis.candidates, 28u);
  EXPECT_TRUE(a.basis.polynomials.empty());
}

// Every basis element vanishes on the orbit, lies in the candidate span and
// the spans grow with the degree.
TEST(Properties, SoundSupersetAndMonotone) {
  for (const char* name : {"fib1", "fib3", "fibonacci", "nagata", "example9", "example10", "squares", "yagzhev11"}) {
    auto loop = bench(name);
    std::vector<polynomial> previous;
    std::size_t top = std::string(name) == "yagzhev11" ? 2 : 4;
    for (std::size_t d = 1; d <= top; ++d) {
      auto b = truncated_invariant_ideal(loop, d);
      expect_vanishes_on_orbit(loop, b.polynomials);
      EXPECT_TRUE(spans(candidate_basis(loop, d), b.polynomials)) << name << " degree " << d;
      EXPECT_TRUE(spans(b.polynomials, previous)) << name << " degree " << d;
      EXPECT_GE(b.dimension, previous.size());
      for (const auto& p : b.polynomials) EXPECT_LE(p.degree(), d);
      previous = b.polynomials;
    }
  }
}

TEST(Properties, MoreRowsKeepTheSpan) {
  polyinv::testing::poly_generator gen(5);
  std::uniform_int_distribution<int> extra(1, 25);
  for (const char* name : {"fib1", "fib3", "fibonacci", "nagata", "example9", "example10", "squares"}) {
    auto loop = bench(name);
    for (std::size_t d = 2; d <= 3; ++d) {
      auto reference = truncated_invariant_ideal(loop, d);
      truncated_options more;
      more.rows = binomial(loop.arity() + d, d) + extra(gen.engine());
      more.confirm_window = 0;
      auto b = truncated_invariant_ideal(loop, d, more);
      EXPECT_TRUE(same_span(b.polynomials, reference.polynomials)) << name << " degree " << d;
      truncated_options exact;
      exact.modular_candidates = false;
      EXPECT_TRUE(same_span(truncated_invariant_ideal(loop, d, exact).polynomials, reference.polynomials)) << name;
    }
  }
}

TEST(Properties, BasesAreCanonical) {
  auto loop = bench("nagata");
  auto a = truncated_invariant_ideal(loop, 2);
  auto b = truncated_invariant_ideal(loop, 2);
  EXPECT_EQ(a.polynomials, b.polynomials);
  for (const auto& p : a.polynomials) {
    for (const auto& t : p.terms()) EXPECT_EQ(t.coeff.get_den(), 1);
  }
}

}  // namespace
