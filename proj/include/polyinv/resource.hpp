// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <limits>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "polyinv/monomial.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

/// Caps shared by every long-running kernel. For the size caps zero means
/// "no cap"; the iteration cap is literal (0 allows no update at all).
struct resource_limits {
  std::size_t max_iterations = 64;      // invariant-set chain updates
  std::size_t max_pairs = 0;            // S-pairs processed per Buchberger run
  std::size_t max_coeff_bits = 0;       // any single coefficient / orbit coordinate
  std::size_t max_state_bits = 0;       // total bits held by one linear system
  std::size_t max_terms = 0;            // terms of one polynomial or one Groebner basis
  std::optional<std::chrono::steady_clock::time_point> deadline;
  monomial_order ideal_order = monomial_order::grevlex();  // bases behind radical tests

  static resource_limits unlimited() {
    resource_limits r;
    r.max_iterations = std::numeric_limits<std::size_t>::max();
    return r;
  }

  resource_limits& with_timeout(std::chrono::milliseconds budget) {
    deadline = std::chrono::steady_clock::now() + budget;
    return *this;
  }
};

enum class resource_kind { iterations, pairs, coefficient_bits, state_bits, terms, deadline };

inline const char* to_string(resource_kind k) {
  switch (k) {
    case resource_kind::iterations: return "iteration cap";
    case resource_kind::pairs: return "S-pair cap";
    case resource_kind::coefficient_bits: return "coefficient bit-size cap";
    case resource_kind::state_bits: return "linear-system size cap";
    case resource_kind::terms: return "term-count cap";
    case resource_kind::deadline: return "deadline";
  }
  return "resource";
}

class resource_exhausted : public std::runtime_error {
 public:
  resource_exhausted(resource_kind kind, const std::string& where)
      : std::runtime_error(std::string(to_string(kind)) + " exceeded in " + where), kind_(kind) {}

  resource_kind kind() const noexcept { return kind_; }

 private:
  resource_kind kind_;
};

inline void check_deadline(const resource_limits& limits, const char* where) {
  if (limits.deadline && std::chrono::steady_clock::now() >= *limits.deadline)
    throw resource_exhausted(resource_kind::deadline, where);
}

inline void check_terms(const resource_limits& limits, std::size_t terms, const char* where) {
  if (limits.max_terms != 0 && terms > limits.max_terms) throw resource_exhausted(resource_kind::terms, where);
}

inline void check_coefficient(const resource_limits& limits, const integer& z, const char* where) {
  if (limits.max_coeff_bits != 0 && bit_size(z) > limits.max_coeff_bits)
    throw resource_exhausted(resource_kind::coefficient_bits, where);
}

inline void check_coefficient(const resource_limits& limits, const rational& q, const char* where) {
  if (limits.max_coeff_bits != 0 && bit_size(q) > limits.max_coeff_bits)
    throw resource_exhausted(resource_kind::coefficient_bits, where);
}

}  // namespace polyinv
