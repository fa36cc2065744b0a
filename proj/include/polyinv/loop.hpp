// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyinv/invariant_set.hpp"
#include "polyinv/poly_io.hpp"
#include "polyinv/poly_map.hpp"

namespace polyinv {

/// Loop-file error with a 1-based line and column.
class loop_parse_error : public parse_error {
 public:
  loop_parse_error(const std::string& what, std::size_t line, std::size_t column)
      : parse_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what, 0),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Raised when a command cannot handle a loop shape (e.g. inequality guards).
class unsupported_loop : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class inequality_kind { gt, ge, lt, le };

struct guard_inequality {
  polynomial poly;
  inequality_kind kind;
  friend bool operator==(const guard_inequality&, const guard_inequality&) = default;
};

/// while (g = 0 and p != 0) x <- F(x), started at `init` when present.
struct loop_spec {
  ring vars;
  std::optional<point> init;
  std::vector<polynomial> guard_eqs;
  std::optional<polynomial> guard_diseq;
  std::vector<guard_inequality> guard_ineqs;  // parsed only; no command accepts them
  poly_map body;

  std::size_t arity() const noexcept { return vars.size(); }
  bool has_inequalities() const noexcept { return !guard_ineqs.empty(); }

  friend bool operator==(const loop_spec&, const loop_spec&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on `sep`, remembering each piece's offset inside `text`.
inline std::vector<std::pair<std::string_view, std::size_t>> split_with_offsets(std::string_view text, char sep) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.emplace_back(text.substr(start, i - start), start);
      start = i + 1;
    }
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

class loop_parser {
 public:
  explicit loop_parser(std::string_view text) : text_(text) {}

  loop_spec parse() {
    collect_lines();
    std::size_t i = 0;
    auto next_key = [&](const char* key, bool optional) -> const line_info* {
      if (i < lines_.size() && lines_[i].key == key) return &lines_[i++];
      if (optional) return nullptr;
      if (i < lines_.size())
        fail(lines_[i].number, 1, std::string("expected '") + key + ":' but found '" + lines_[i].key + ":'");
      fail(last_line_ + 1, 1, std::string("missing '") + key + ":' section");
    };

    loop_spec spec;
    const line_info* vars = next_key("vars", false);
    spec.vars = parse_vars(*vars);
    if (const line_info* init = next_key("init", true)) spec.init = parse_init(*init, spec.vars.size());
    parse_guard(*next_key("guard", false), spec);
    spec.body = parse_body(*next_key("body", false), spec.vars);
    if (i < lines_.size()) fail(lines_[i].number, 1, "unexpected section '" + lines_[i].key + ":'");
    return spec;
  }

 private:
  struct line_info {
    std::string key;
    std::string value;           // text after the colon (continuations joined by ' ')
    std::size_t number;          // 1-based line of the key
    std::size_t value_column;    // 1-based column where `value` starts
  };

  [[noreturn]] static void fail(std::size_t line, std::size_t column, const std::string& what) {
    throw loop_parse_error(what, line, column);
  }

  void collect_lines() {
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view raw = text_.substr(pos, end - pos);
      ++number;
      pos = end + 1;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      if (trim(raw).empty()) continue;
      last_line_ = number;
      auto colon = raw.find(':');
      std::string_view key = colon == std::string_view::npos ? std::string_view{} : trim(raw.substr(0, colon));
      bool known = key == "vars" || key == "init" || key == "guard" || key == "body";
      if (!known) {
        // a body may continue on following lines
        if (!lines_.empty() && lines_.back().key == "body") {
          lines_.back().value += ' ';
          lines_.back().value += std::string(raw);
          continue;
        }
        fail(number, raw.find_first_not_of(" \t") + 1, "expected one of 'vars:', 'init:', 'guard:', 'body:'");
      }
      for (const auto& l : lines_)
        if (l.key == key) fail(number, 1, "duplicate '" + std::string(key) + ":' section");
      lines_.push_back({std::string(key), std::string(raw.substr(colon + 1)), number, colon + 2});
    }
  }

  static ring parse_vars(const line_info& l) {
    std::vector<std::string> names;
    for (auto [piece, off] : split_with_offsets(l.value, ',')) {
      auto name = trim(piece);
      std::size_t col = l.value_column + off + (name.empty() ? 0 : piece.find_first_not_of(" \t"));
      if (!is_identifier(name)) fail(l.number, col, "invalid variable name '" + std::string(name) + "'");
      if (name.substr(0, 2) == "__") fail(l.number, col, "names starting with '__' are reserved");
      for (const auto& n : names)
        if (n == name) fail(l.number, col, "duplicate variable '" + std::string(name) + "'");
      names.emplace_back(name);
    }
    return ring(std::move(names));
  }

  static point parse_init(const line_info& l, std::size_t n) {
    point a;
    for (auto [piece, off] : split_with_offsets(l.value, ',')) {
      auto text = trim(piece);
      std::size_t col = l.value_column + off + (text.empty() ? 0 : piece.find_first_not_of(" \t"));
      try {
        a.push_back(parse_rational(text));
      } catch (const std::invalid_argument&) {
        fail(l.number, col, "expected a rational constant, found '" + std::string(text) + "'");
      }
    }
    if (a.size() != n)
      fail(l.number, l.value_column,
           "init has " + std::to_string(a.size()) + " values for " + std::to_string(n) + " variables");
    return a;
  }

  static polynomial parse_poly(std::string_view text, std::size_t line, std::size_t column, const ring& r) {
    try {
      return parse_polynomial(text, r);
    } catch (const parse_error& e) {
      fail(line, column + e.offset(), e.what());
    }
  }

  static void parse_guard(const line_info& l, loop_spec& spec) {
    if (trim(l.value) == "true") return;
    for (auto [piece, off] : split_with_offsets(l.value, ';')) {
      std::size_t col = l.value_column + off;
      if (trim(piece).empty()) fail(l.number, col, "empty guard condition");
      struct op_info {
        const char* text;
        int kind;  // 0: =, 1: !=, 2..5: inequalities
      };
      static constexpr op_info ops[] = {{"!=", 1}, {">=", 3}, {"<=", 5}, {"=", 0}, {">", 2}, {"<", 4}};
      std::size_t at = std::string_view::npos;
      const op_info* found = nullptr;
      for (const auto& op : ops) {
        auto p = piece.find(op.text);
        if (p != std::string_view::npos && (at == std::string_view::npos || p < at ||
                                            (p == at && std::string_view(op.text).size() > 1))) {
          at = p;
          found = &op;
        }
      }
      if (!found) fail(l.number, col, "guard condition needs a relation such as '= 0'");
      std::size_t oplen = std::string_view(found->text).size();
      auto rhs = trim(piece.substr(at + oplen));
      if (rhs != "0") fail(l.number, col + at + oplen + 1, "right-hand side of a guard relation must be 0");
      polynomial p = parse_poly(piece.substr(0, at), l.number, col, spec.vars);
      switch (found->kind) {
        case 0: spec.guard_eqs.push_back(std::move(p)); break;
        case 1:
          spec.guard_diseq = spec.guard_diseq ? *spec.guard_diseq * p : std::move(p);
          break;
        case 2: spec.guard_ineqs.push_back({std::move(p), inequality_kind::gt}); break;
        case 3: spec.guard_ineqs.push_back({std::move(p), inequality_kind::ge}); break;
        case 4: spec.guard_ineqs.push_back({std::move(p), inequality_kind::lt}); break;
        default: spec.guard_ineqs.push_back({std::move(p), inequality_kind::le}); break;
      }
    }
  }

  static poly_map parse_body(const line_info& l, const ring& r) {
    std::vector<std::optional<polynomial>> comps(r.size());
    for (auto [piece, off] : split_with_offsets(l.value, ';')) {
      std::size_t col = l.value_column + off;
      if (trim(piece).empty()) {
        if (off + piece.size() == l.value.size() && off != 0) continue;  // trailing ';'
        fail(l.number, col, "empty assignment");
      }
      auto arrow = piece.find("<-");
      if (arrow == std::string_view::npos) fail(l.number, col, "assignment needs '<-'");
      auto lhs = trim(piece.substr(0, arrow));
      auto idx = r.index_of(std::string(lhs));
      if (!idx) fail(l.number, col, "assignment to undeclared variable '" + std::string(lhs) + "'");
      if (comps[*idx]) fail(l.number, col, "variable '" + std::string(lhs) + "' assigned twice");
      comps[*idx] = parse_poly(piece.substr(arrow + 2), l.number, col + arrow + 2, r);
    }
    std::vector<polynomial> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!comps[i]) fail(l.number, l.value_column, "no assignment for variable '" + r.name(i) + "'");
      out.push_back(std::move(*comps[i]));
    }
    return poly_map(r, std::move(out));
  }

  std::string_view text_;
  std::vector<line_info> lines_;
  std::size_t last_line_ = 0;
};

}  // namespace detail

/// Parses the loop DSL (`vars:`, optional `init:`, `guard:`, `body:`).
inline loop_spec parse_loop(std::string_view text) { return detail::loop_parser(text).parse(); }

inline loop_spec read_loop_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open loop file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_loop(ss.str());
}

inline std::string to_string(const loop_spec& loop) {
  std::string out = "vars: ";
  for (std::size_t i = 0; i < loop.vars.size(); ++i) out += (i ? ", " : "") + loop.vars.name(i);
  out += '\n';
  if (loop.init) {
    out += "init: ";
    for (std::size_t i = 0; i < loop.init->size(); ++i) out += (i ? ", " : "") + to_string((*loop.init)[i]);
    out += '\n';
  }
  std::vector<std::string> conds;
  for (const auto& g : loop.guard_eqs) conds.push_back(to_string(g) + " = 0");
  if (loop.guard_diseq) conds.push_back(to_string(*loop.guard_diseq) + " != 0");
  for (const auto& q : loop.guard_ineqs) {
    static constexpr const char* rel[] = {" > 0", " >= 0", " < 0", " <= 0"};
    conds.push_back(to_string(q.poly) + rel[static_cast<int>(q.kind)]);
  }
  out += "guard: ";
  if (conds.empty()) out += "true";
  for (std::size_t i = 0; i < conds.size(); ++i) out += (i ? "; " : "") + conds[i];
  out += "\nbody: ";
  for (std::size_t i = 0; i < loop.body.size(); ++i)
    out += (i ? "; " : "") + loop.vars.name(i) + " <- " + to_string(loop.body[i]);
  out += '\n';
  return out;
}

inline void require_equation_guard(const loop_spec& loop, const char* command) {
  if (loop.has_inequalities())
    throw unsupported_loop(std::string(command) + ": inequality guards (semi-algebraic loops) are not supported");
}

inline const point& require_init(const loop_spec& loop, const char* command) {
  if (!loop.init) throw std::invalid_argument(std::string(command) + ": the loop has no initial value");
  return *loop.init;
}

/// a, F(a), ..., F^k(a).
inline std::vector<point> orbit(const loop_spec& loop, std::size_t k, const resource_limits& limits = {}) {
  return iterate(loop.body, require_init(loop, "orbit"), k, limits);
}

/// a^0, ..., a^bound, cut short before the first point with a coordinate
/// wider than `max_bits` (0: no cut).
inline std::vector<point> orbit_prefix(const poly_map& F, const point& a, std::size_t bound, std::size_t max_bits) {
  std::vector<point> out{a};
  while (out.size() <= bound) {
    point next = F.apply(out.back());
    for (const auto& v : next)
      if (max_bits != 0 && bit_size(v) > max_bits) return out;
    out.push_back(std::move(next));
  }
  return out;
}

/// Every polynomial of `polys` vanishes on a^0, ..., a^steps.
inline bool vanishes_on_orbit(const std::vector<polynomial>& polys, const std::vector<point>& points) {
  for (const auto& a : points)
    for (const auto& p : polys)
      if (sgn(p.eval(a)) != 0) return false;
  return true;
}

/// True when the invariant-set chain of `guard` contains `a`: the chain's
/// generation k is guard∘F^k, so it is enough to test guard on F^k(a).
inline bool chain_contains(const std::vector<polynomial>& guard, const invariant_set_result& chain, const poly_map& F,
                           const point& a, const resource_limits& limits = {}) {
  return vanishes_on_orbit(guard, iterate(F, a, chain.iterations, limits));
}

inline std::vector<polynomial> fold_disequality(const loop_spec& loop, std::vector<polynomial> polys) {
  if (loop.guard_diseq)
    for (auto& p : polys) p = *loop.guard_diseq * p;
  return polys;
}

struct nontermination_result {
  std::optional<bool> never_terminates;  // empty without an initial value
  std::vector<polynomial> conditions;    // the loop never exits iff these vanish at a
  invariant_set_result chain;
  std::size_t disequality_steps = 0;     // orbit prefix on which p != 0 was confirmed
};

/// Decides whether the loop runs forever: a lies in the invariant set of
/// V(guard). A disequality p is folded into each guard equation; p itself
/// is then confirmed nonzero on an orbit prefix of length `diseq_horizon`
/// (shortened when coefficients outgrow the limits).
inline nontermination_result nonterminates(const loop_spec& loop, const resource_limits& limits = {},
                                           std::size_t diseq_horizon = 50) {
  require_equation_guard(loop, "nonterminates");
  nontermination_result out;
  auto guard = fold_disequality(loop, loop.guard_eqs);
  out.chain = invariant_set(guard, loop.body, limits);
  require_stabilized(out.chain);
  out.conditions = out.chain.generators;
  if (!loop.init) return out;
  bool inside = guard.empty() || chain_contains(guard, out.chain, loop.body, *loop.init, limits);
  if (inside && loop.guard_diseq) {
    point a = *loop.init;
    for (std::size_t k = 0; k <= diseq_horizon; ++k) {
      if (sgn(loop.guard_diseq->eval(a)) == 0) {
        inside = false;
        break;
      }
      out.disequality_steps = k;
      try {
        check_deadline(limits, "orbit");
        a = loop.body.apply(a);
        for (const auto& v : a) check_coefficient(limits, v, "orbit");
      } catch (const resource_exhausted&) {
        break;
      }
    }
  }
  out.never_terminates = inside;
  return out;
}

namespace detail {

// A short orbit prefix on which some guard polynomial is nonzero refutes
// invariance without building a chain.
inline bool refuted_on_prefix(const std::vector<polynomial>& guard, const poly_map& F, const point& a) {
  return !vanishes_on_orbit(guard, orbit_prefix(F, a, 8, 256));
}

}  // namespace detail

/// g (times p, when the loop has a disequality) vanishes on the whole orbit
/// of L(a, 0, F).
inline bool check_pi(const loop_spec& loop, const polynomial& g, const resource_limits& limits = {}) {
  const point& a = require_init(loop, "check");
  auto guard = fold_disequality(loop, {g});
  if (guard.front().is_zero()) return true;
  if (detail::refuted_on_prefix(guard, loop.body, a)) return false;
  auto chain = invariant_set(guard, loop.body, limits);
  require_stabilized(chain);
  return chain_contains(guard, chain, loop.body, a, limits);
}

/// check_pi for a whole family at once, with one chain on all of them:
/// true iff every member is an invariant.
inline bool check_pi_all(const loop_spec& loop, const std::vector<polynomial>& gs, const resource_limits& limits = {}) {
  const point& a = require_init(loop, "check");
  std::vector<polynomial> guard;
  for (auto& g : fold_disequality(loop, gs))
    if (!g.is_zero()) guard.push_back(std::move(g));
  if (guard.empty()) return true;
  if (detail::refuted_on_prefix(guard, loop.body, a)) return false;
  auto chain = invariant_set(guard, loop.body, limits);
  require_stabilized(chain);
  return chain_contains(guard, chain, loop.body, a, limits);
}

}  // namespace polyinv
