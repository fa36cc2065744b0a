// Copyright (c) polyinv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "polyinv/polyinv.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace polyinv;
using clock_type = std::chrono::steady_clock;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_exhausted = 2;

struct global_flags {
  bool json = false;
  double timeout_seconds = 360;
  std::size_t max_iterations = 64;
  std::size_t max_coeff_bits = 0;
  std::size_t max_terms = 1000000;
  std::string order = "grevlex";

  resource_limits limits(double timeout) const {
    resource_limits r;
    r.max_iterations = max_iterations;
    r.max_coeff_bits = max_coeff_bits;
    r.max_terms = max_terms;
    r.ideal_order = order == "lex" ? monomial_order::lex() : monomial_order::grevlex();
    auto budget = std::chrono::duration<double>(std::max(0.0, timeout));
    r.deadline = clock_type::now() + std::chrono::duration_cast<clock_type::duration>(budget);
    return r;
  }
};

std::int64_t elapsed_ms(clock_type::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(clock_type::now() - start).count();
}

json report(const std::string& command) {
  return json{{"command", command}, {"status", "ok"},      {"degree", nullptr}, {"dimension", nullptr},
              {"basis", json::array()}, {"iterations", nullptr}, {"wall_ms", 0}};
}

json strings(const std::vector<polynomial>& ps, bool canonical_form) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(to_string(canonical_form ? canonical(p) : p));
  return out;
}

const char* status_of(const resource_exhausted& e) {
  return e.kind() == resource_kind::deadline ? "timeout" : "error";
}

// Plain-text rendering of a report: one "key: value" line per field, lists
// indented below their key, nulls omitted.
void render(const json& v, std::ostream& os, int indent = 0) {
  std::string pad(indent, ' ');
  for (const auto& [key, val] : v.items()) {
    if (val.is_null()) continue;
    if (val.is_object()) {
      os << pad << key << ":\n";
      render(val, os, indent + 2);
    } else if (val.is_array()) {
      os << pad << key << ":" << (val.empty() ? " (none)" : "") << "\n";
      for (const auto& e : val) {
        if (e.is_object()) {
          render(e, os, indent + 2);
          os << "\n";
        } else if (e.is_string()) {
          os << pad << "  " << e.get<std::string>() << "\n";
        } else {
          os << pad << "  " << e.dump() << "\n";
        }
      }
    } else if (val.is_string()) {
      os << pad << key << ": " << val.get<std::string>() << "\n";
    } else {
      os << pad << key << ": " << val.dump() << "\n";
    }
  }
}

void emit(const json& r, bool as_json) {
  if (as_json)
    std::cout << r.dump(2) << "\n";
  else
    render(r, std::cout);
}

// Runs one command body, converting errors into a status and an exit code.
int execute(const global_flags& g, const std::string& command,
            const std::function<int(json&, const resource_limits&)>& body) {
  json r = report(command);
  auto start = clock_type::now();
  int code = exit_ok;
  try {
    code = body(r, g.limits(g.timeout_seconds));
  } catch (const resource_exhausted& e) {
    r["status"] = status_of(e);
    r["reason"] = e.what();
    code = exit_exhausted;
  } catch (const std::exception& e) {
    r["status"] = "error";
    r["reason"] = e.what();
    code = exit_input;
  }
  r["wall_ms"] = elapsed_ms(start);
  emit(r, g.json);
  if (code != exit_ok && r.contains("reason")) std::cerr << "polyinv: " << r["reason"].get<std::string>() << "\n";
  return code;
}

loop_spec load(const std::string& path) {
  try {
    return read_loop_file(path);
  } catch (const loop_parse_error& e) {
    throw loop_parse_error(e.what() + std::string(" in ") + path, e.line(), e.column());
  }
}

point parse_point(const std::string& text) {
  point a;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    a.push_back(parse_rational(std::string(detail::trim(piece))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return a;
}

std::vector<std::size_t> parse_degrees(const std::string& text) {
  std::vector<std::size_t> out;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::size_t lo = std::stoul(text.substr(0, dots)), hi = std::stoul(text.substr(dots + 2));
    for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
  } else {
    std::size_t start = 0;
    while (start < text.size()) {
      auto comma = text.find(',', start);
      out.push_back(std::stoul(text.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  for (auto d : out)
    if (d == 0) throw std::invalid_argument("degrees must be at least 1");
  return out;
}

int cmd_invariant_set(const global_flags& g, const std::string& file) {
  return execute(g, "invariant-set", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    require_equation_guard(loop, "invariant-set");
    auto guard = fold_disequality(loop, loop.guard_eqs);
    if (guard.empty()) throw std::invalid_argument("invariant-set: the guard is 'true'; there is nothing to iterate");
    auto chain = invariant_set(guard, loop.body, limits);
    r["basis"] = strings(chain.generators, true);
    r["iterations"] = chain.iterations;
    r["stabilized"] = chain.stabilized();
    if (chain.stabilized()) return exit_ok;
    r["status"] = *chain.exhausted == resource_kind::deadline ? "timeout" : "error";
    r["reason"] = chain.message;
    return exit_exhausted;
  });
}

int cmd_nonterminates(const global_flags& g, const std::string& file) {
  return execute(g, "nonterminates", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    auto res = nonterminates(loop, limits);
    r["basis"] = strings(res.conditions, true);
    r["iterations"] = res.chain.iterations;
    if (res.never_terminates)
      r["never_terminates"] = *res.never_terminates;
    if (loop.guard_diseq) r["disequality_steps"] = res.disequality_steps;
    return exit_ok;
  });
}

json attempt_fields(const truncated_attempt& a) {
  json r;
  r["provenance"] = a.complete ? json(to_string(a.basis.provenance)) : json(nullptr);
  r["orbit_rows"] = a.basis.orbit_rows;
  r["candidates"] = a.basis.candidates;
  r["failed_candidates"] = a.basis.failed_candidates;
  r["disequality_folded"] = a.basis.disequality_folded;
  if (!a.complete) r["stage"] = a.stage;
  return r;
}

int cmd_truncated(const global_flags& g, const std::string& file, std::size_t d, std::optional<std::size_t> rows) {
  return execute(g, "truncated", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    truncated_options opt;
    opt.rows = rows;
    r["degree"] = d;
    auto a = try_truncated_invariant_ideal(loop, d, opt, limits);
    if (a.complete) {
      r["dimension"] = a.basis.dimension;
      r["basis"] = strings(a.basis.polynomials, false);
    }
    r.update(attempt_fields(a));
    if (a.complete) return exit_ok;
    r["status"] = *a.exhausted == resource_kind::deadline ? "timeout" : "error";
    r["reason"] = a.message;
    return exit_exhausted;
  });
}

json matrix_json(const poly_matrix& A) {
  json m{{"n", A.n()}, {"d", A.degree}, {"m", A.m()}};
  json monos = json::array();
  for (const auto& mono : A.monomials) monos.push_back(mono.degree() == 0 ? std::string("1") : to_string(mono, A.x));
  m["monomials"] = monos;
  json rows = json::array();
  for (const auto& row : A.rows) rows.push_back(strings(row, false));
  m["rows"] = rows;
  return m;
}

int cmd_parametric(const global_flags& g, const std::string& file, std::size_t d, const std::string& at, bool trim) {
  return execute(g, "parametric", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    r["degree"] = d;
    auto A = invariant_matrix(loop, d, limits);
    if (trim) A = trimmed(A, limits);
    r["iterations"] = A.iterations;
    if (!at.empty()) {
      auto a = parse_point(at);
      auto basis = kernel_at(A, a, limits);
      json pt = json::array();
      for (const auto& v : a) pt.push_back(to_string(v));
      r["at"] = pt;
      r["dimension"] = basis.size();
      r["basis"] = strings(basis, false);
    }
    r["matrix"] = matrix_json(A);
    return exit_ok;
  });
}

int cmd_check(const global_flags& g, const std::string& file, const std::string& poly) {
  return execute(g, "check", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    auto p = parse_polynomial(poly, loop.vars);
    const point& a = require_init(loop, "check");
    auto guard = fold_disequality(loop, {p});
    bool holds = true;
    std::size_t iterations = 0;
    if (!guard.front().is_zero()) {
      auto chain = invariant_set(guard, loop.body, limits);
      require_stabilized(chain);
      iterations = chain.iterations;
      holds = chain_contains(guard, chain, loop.body, a, limits);
    }
    r["basis"] = strings({p}, false);
    r["iterations"] = iterations;
    r["result"] = holds;
    r["certificate"] = holds ? "the chain generators vanish at the initial value"
                             : "some chain generator is nonzero at the initial value";
    return exit_ok;
  });
}

int cmd_lift(const global_flags& g, const std::string& file, const std::string& poly) {
  return execute(g, "lift", [&](json& r, const resource_limits& limits) {
    auto loop = load(file);
    auto p = parse_polynomial(poly, loop.vars);
    auto res = lift_invariant(p, loop.body, limits);
    r["basis"] = strings({p}, false);
    r["iterations"] = res.chain.iterations;
    r["result"] = res.liftable;
    r["zero_updates"] = res.zero_updates;
    r["first_image_in_radical"] = res.first_image_in_radical;
    return exit_ok;
  });
}

std::vector<std::filesystem::path> corpus(const std::string& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".loop") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

json bench_cell(const global_flags& g, const loop_spec& loop, std::size_t d, double timeout) {
  json c{{"degree", d}, {"status", "ok"}, {"dimension", nullptr}, {"basis", json::array()}};
  auto start = clock_type::now();
  try {
    auto a = try_truncated_invariant_ideal(loop, d, {}, g.limits(timeout));
    if (a.complete) {
      c["dimension"] = a.basis.dimension;
      c["basis"] = strings(a.basis.polynomials, false);
    } else {
      c["status"] = *a.exhausted == resource_kind::deadline ? "timeout" : "error";
      c["reason"] = a.message;
    }
    c.update(attempt_fields(a));
  } catch (const std::exception& e) {
    c["status"] = "error";
    c["reason"] = e.what();
  }
  c["wall_ms"] = elapsed_ms(start);
  return c;
}

std::string cell_text(const json& c) {
  if (c["status"] == "ok") return std::to_string(c["dimension"].get<std::size_t>());
  if (c["status"] == "timeout") return "TL";
  return "-";
}

int cmd_bench(const global_flags& g, const std::string& dir, const std::string& degree_text,
              std::optional<double> timeout, const std::string& csv_path, const std::string& json_path) {
  auto degrees = parse_degrees(degree_text);
  const double budget = timeout.value_or(g.timeout_seconds);
  json r = report("bench");
  auto start = clock_type::now();
  json degs = json::array();
  for (auto d : degrees) degs.push_back(d);
  r["degrees"] = degs;
  r["timeout_seconds"] = budget;
  json results = json::array();
  for (const auto& path : corpus(dir)) {
    json b{{"benchmark", path.stem().string()}, {"cells", json::array()}};
    std::optional<loop_spec> loop;
    std::string load_error;
    try {
      loop = load(path.string());
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    bool timed_out = false;
    for (auto d : degrees) {
      json c;
      if (!loop) {
        c = json{{"degree", d}, {"status", "error"}, {"dimension", nullptr}, {"basis", json::array()},
                 {"reason", load_error}, {"wall_ms", 0}};
      } else if (timed_out) {
        // a lower degree already ran out of time; higher degrees are strictly larger systems
        c = json{{"degree", d}, {"status", "timeout"}, {"dimension", nullptr}, {"basis", json::array()},
                 {"stage", "skipped after a lower-degree timeout"}, {"wall_ms", 0}};
      } else {
        c = bench_cell(g, *loop, d, budget);
        timed_out = c["status"] == "timeout";
      }
      if (!g.json) std::cerr << b["benchmark"].get<std::string>() << " d=" << d << ": " << cell_text(c) << "\n";
      b["cells"].push_back(std::move(c));
    }
    results.push_back(std::move(b));
  }
  r["results"] = results;
  r["wall_ms"] = elapsed_ms(start);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << "benchmark,degree,status,dimension,wall_ms\n";
    for (const auto& b : results)
      for (const auto& c : b["cells"])
        csv << b["benchmark"].get<std::string>() << "," << c["degree"] << "," << c["status"].get<std::string>() << ","
            << (c["dimension"].is_null() ? "" : c["dimension"].dump()) << "," << c["wall_ms"] << "\n";
  }
  if (!json_path.empty()) std::ofstream(json_path) << r.dump(2) << "\n";

  if (g.json) {
    std::cout << r.dump(2) << "\n";
  } else {
    std::size_t width = 9;
    for (const auto& b : results) width = std::max(width, b["benchmark"].get<std::string>().size());
    std::cout << std::string("benchmark").append(width - 9 + 2, ' ');
    for (auto d : degrees) std::cout << "d=" << d << "\t";
    std::cout << "\n";
    for (const auto& b : results) {
      auto name = b["benchmark"].get<std::string>();
      std::cout << name << std::string(width - name.size() + 2, ' ');
      for (const auto& c : b["cells"]) std::cout << cell_text(c) << "\t";
      std::cout << "\n";
    }
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial loop invariants: invariant sets, truncated invariant ideals, parametric matrices."};
  app.require_subcommand(1);
  app.fallthrough();
  global_flags g;
  app.add_flag("--json", g.json, "Print a JSON report on stdout");
  app.add_option("--timeout-seconds", g.timeout_seconds, "Wall-clock budget per computation")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--max-iterations", g.max_iterations, "Invariant-set chain updates allowed")->capture_default_str();
  app.add_option("--max-coeff-bits", g.max_coeff_bits, "Largest coefficient bit size (0: no cap)")
      ->capture_default_str();
  app.add_option("--max-terms", g.max_terms, "Largest polynomial or basis, in terms (0: no cap)")
      ->capture_default_str();
  app.add_option("--order", g.order, "Monomial order for ideal computations")
      ->check(CLI::IsMember({"grevlex", "lex"}))
      ->capture_default_str();

  std::string file, poly, at, degrees = "1..4", csv_path, json_path;
  std::size_t degree = 0;
  std::optional<std::size_t> rows;
  std::optional<double> bench_timeout;
  bool trim = false;

  auto* inv = app.add_subcommand("invariant-set", "Invariant set of the guard variety under the loop body");
  inv->add_option("loop_file", file, "Loop file")->required();

  auto* nt = app.add_subcommand("nonterminates", "Decide whether the loop runs forever from its initial value");
  nt->add_option("loop_file", file, "Loop file")->required();

  auto* tr = app.add_subcommand("truncated", "Basis of the truncated invariant ideal for the initial value");
  tr->add_option("loop_file", file, "Loop file")->required();
  tr->add_option("--degree,-d", degree, "Degree bound")->required()->check(CLI::PositiveNumber);
  tr->add_option("--rows", rows, "Orbit points a^0..a^M used for candidates");

  auto* pm = app.add_subcommand("parametric", "Invariant matrix for arbitrary initial values");
  pm->add_option("loop_file", file, "Loop file")->required();
  pm->add_option("--degree,-d", degree, "Degree bound")->required()->check(CLI::PositiveNumber);
  pm->add_option("--at", at, "Initial value a1,...,an for a kernel basis");
  pm->add_flag("--trimmed", trim, "Drop rows implied by the others");

  auto* ck = app.add_subcommand("check", "Is the polynomial an invariant of the loop?");
  ck->add_option("loop_file", file, "Loop file")->required();
  ck->add_option("--poly", poly, "Polynomial")->required();

  auto* lf = app.add_subcommand("lift", "Is f(x) - f(a) an invariant for every initial value a?");
  lf->add_option("loop_file", file, "Loop file")->required();
  lf->add_option("--poly", poly, "Polynomial")->required();

  auto* bn = app.add_subcommand("bench", "Dimension table over a corpus of loop files");
  bn->add_option("corpus_dir", file, "Directory of .loop files")->required()->check(CLI::ExistingDirectory);
  bn->add_option("--degrees", degrees, "Degrees, as lo..hi or a comma list")->capture_default_str();
  bn->add_option("--timeout", bench_timeout, "Per-cell budget in seconds (default: --timeout-seconds)")
      ->check(CLI::NonNegativeNumber);
  bn->add_option("--csv", csv_path, "Also write the table as CSV");
  bn->add_option("--output", json_path, "Also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  if (*inv) return cmd_invariant_set(g, file);
  if (*nt) return cmd_nonterminates(g, file);
  if (*tr) return cmd_truncated(g, file, degree, rows);
  if (*pm) return cmd_parametric(g, file, degree, at, trim);
  if (*ck) return cmd_check(g, file, poly);
  if (*lf) return cmd_lift(g, file, poly);
  try {
    return cmd_bench(g, file, degrees, bench_timeout, csv_path, json_path);
  } catch (const std::exception& e) {
    std::cerr << "polyinv: " << e.what() << "\n";
    return exit_input;
  }
}
