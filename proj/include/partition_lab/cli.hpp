#pragma once

// Command dispatch for the partition_lab executable. Argument parsing lives in
// tools/main.cpp; everything that decides what is computed and what the exit
// status is lives here so that it can be driven from tests.
//
// Exit status: 0 all rows pass, 1 a verdict fails, 2 quadrature failure,
// 3 input validation error. Failures other than verdicts also print a one-line
// JSON record {"error", "exit", "message"} on the error stream.

#include "partition_lab/bounds.hpp"
#include "partition_lab/bromwich.hpp"
#include "partition_lab/counts.hpp"
#include "partition_lab/functions.hpp"
#include "partition_lab/lattice.hpp"
#include "partition_lab/report.hpp"
#include "partition_lab/special.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partition_lab::cli {

using report::Format;
using report::Json;
using report::Table;

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitQuadrature = 2;
inline constexpr int kExitValidation = 3;

inline constexpr std::uint64_t kDefaultSeed = lattice::kDefaultSeed;
inline constexpr int kRandomSandwichInstances = 500;

enum class Command { verify, table, oracle, bromwich_check, slope };
enum class Family { plain, qpower, plane, theoremA };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::verify:
      return "verify";
    case Command::table:
      return "table";
    case Command::oracle:
      return "oracle";
    case Command::bromwich_check:
      return "bromwich-check";
    case Command::slope:
      return "slope";
  }
  return "?";
}

inline std::string to_string(Family f) {
  switch (f) {
    case Family::plain:
      return "plain";
    case Family::qpower:
      return "qpower";
    case Family::plane:
      return "plane";
    case Family::theoremA:
      return "theoremA";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "plain") return Family::plain;
  if (s == "qpower") return Family::qpower;
  if (s == "plane") return Family::plane;
  if (s == "theoremA") return Family::theoremA;
  throw std::invalid_argument("unknown family \"" + s + "\" (expected plain, qpower, plane or theoremA)");
}

/// "A,B" or "A:B" with 1 <= A < B.
inline std::pair<std::uint64_t, std::uint64_t> parse_window(const std::string& s) {
  const auto sep = s.find_first_of(",:");
  if (sep == std::string::npos) throw std::invalid_argument("window must be \"N_min,N_max\"");
  try {
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    const std::string a = s.substr(0, sep);
    const std::string b = s.substr(sep + 1);
    const auto lo = std::stoull(a, &used_a);
    const auto hi = std::stoull(b, &used_b);
    if (used_a != a.size() || used_b != b.size() || a.find('-') != std::string::npos ||
        b.find('-') != std::string::npos) {
      throw std::invalid_argument("");
    }
    return {lo, hi};
  } catch (const std::exception&) {
    throw std::invalid_argument("window must be \"N_min,N_max\" with non-negative integers, got \"" + s + "\"");
  }
}

struct RunConfig {
  Command command = Command::verify;
  Family family = Family::plain;
  unsigned q = 2;
  std::string h_file;
  std::uint64_t n_max = 100;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> window;
  std::optional<Precision> precision;
  Format format = Format::pretty;
  std::uint64_t seed = kDefaultSeed;
  std::string output;  // empty: standard output
  unsigned rho_max = 3;
  std::string grid = "default";
  std::optional<double> tolerance;  // slope tolerance; 0.06 for q = 1, 0.08 otherwise
  double corrupt_upper = 1.0;       // test hook, see bounds::EngineOptions
  bromwich::ContourSpec contour{};  // not exposed as flags

  void validate() const {
    if (n_max < 1) throw std::invalid_argument("--n-max must be at least 1");
    if (q < 1) throw std::invalid_argument("--q must be at least 1");
    if (precision && (*precision < 32 || *precision > kMaxPrecision)) {
      throw std::invalid_argument("--precision must lie in [32, " + std::to_string(kMaxPrecision) + "]");
    }
    if (command == Command::oracle && (rho_max < 1 || rho_max > 6)) {
      throw std::invalid_argument("--rho-max must lie in [1, 6]");
    }
    if (command == Command::bromwich_check && grid != "default") {
      throw std::invalid_argument("unknown grid \"" + grid + "\" (only \"default\" is defined)");
    }
    if (family == Family::theoremA && h_file.empty() && (command == Command::verify || command == Command::table)) {
      throw std::invalid_argument("family theoremA needs --h-file");
    }
    if (command == Command::slope) {
      if (family != Family::plain && family != Family::qpower) {
        throw std::invalid_argument("slope runs on the plain or qpower family");
      }
      if (!window) throw std::invalid_argument("slope needs --window N_min,N_max");
      if (window->first < 100 || window->second <= window->first) {
        throw std::invalid_argument("slope window must satisfy 100 <= N_min < N_max");
      }
      if (tolerance && !(*tolerance > 0)) throw std::invalid_argument("--tolerance must be positive");
    }
    if (!(corrupt_upper > 0)) throw std::invalid_argument("corrupt factor must be positive");
  }

  unsigned slope_q() const { return family == Family::plain ? 1 : q; }
  double slope_tolerance() const { return tolerance.value_or(slope_q() == 1 ? 0.06 : 0.08); }

  Json to_json() const {
    Json j;
    j["command"] = to_string(command);
    j["family"] = to_string(family);
    if (family == Family::qpower) j["q"] = q;
    if (!h_file.empty()) j["h_file"] = h_file;
    if (command == Command::slope) {
      j["window"] = Json::array({window->first, window->second});
      j["tolerance"] = report::render(slope_tolerance());
    } else {
      j["n_max"] = n_max;
    }
    j["precision"] = static_cast<long>(precision.value_or(default_precision()));
    j["format"] = report::to_string(format);
    j["seed"] = seed;
    if (command == Command::oracle) j["rho_max"] = rho_max;
    if (command == Command::bromwich_check) j["grid"] = grid;
    return j;
  }
};

inline FunctionSpecH load_h_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open h-file \"" + path + "\"");
  try {
    return parse_h_table(in);
  } catch (const ValidationError& e) {
    throw ValidationError(0, path + ": " + e.what());
  }
}

inline bounds::EngineOptions engine_options(const RunConfig& c) {
  bounds::EngineOptions o;
  if (c.precision) o.precision = *c.precision;
  o.corrupt_upper = c.corrupt_upper;
  o.contour = c.contour;
  return o;
}

// ---------------------------------------------------------------- commands

inline Table verify_table(const RunConfig& c) {
  bounds::BoundsEngine engine(engine_options(c));
  std::vector<bounds::BoundVerdict> rows;
  switch (c.family) {
    case Family::plain:
      for (std::uint64_t n = 1; n <= c.n_max; ++n) {
        rows.push_back(engine.verify_goal1(n));
        rows.push_back(engine.verify_pn_trivial(n));
        if (n >= 2) rows.push_back(engine.verify_pn_direct(n));
        if (engine.improved_m(n) >= 1) rows.push_back(engine.verify_pn_improved_upper(n));
      }
      break;
    case Family::qpower:
      for (std::uint64_t n = 1; n <= c.n_max; ++n) rows.push_back(engine.verify_qpower(c.q, n));
      break;
    case Family::plane:
      for (std::uint64_t n = 1; n <= c.n_max; ++n) rows.push_back(engine.verify_plane(n));
      break;
    case Family::theoremA: {
      const FunctionSpecH h = load_h_file(c.h_file);
      for (std::uint64_t n = 1; n <= c.n_max; ++n) rows.push_back(engine.verify_theoremA_general(h, n));
      break;
    }
  }
  return report::verdict_table(std::move(rows));
}

inline Table count_table(const RunConfig& c) {
  std::string name;
  const counts::CountFamily fam = [&] {
    switch (c.family) {
      case Family::plain:
        name = "plain";
        return counts::CountFamily::plain(c.n_max);
      case Family::qpower:
        name = "qpower" + std::to_string(c.q);
        return counts::CountFamily::power(c.q, c.n_max);
      case Family::plane:
        name = "plane";
        return counts::CountFamily::plane(c.n_max);
      case Family::theoremA:
        break;
    }
    const FunctionSpecH h = load_h_file(c.h_file);
    name = "theoremA:" + h.describe();
    return counts::CountFamily::from_h(h, c.n_max);
  }();
  Table t{{"family", "N", "count", "prefix"}, {}};
  BigInt prefix = 0;
  for (std::uint64_t n = 0; n <= c.n_max; ++n) {
    prefix += fam.count(n);
    Json row;
    row["family"] = name;
    row["N"] = n;
    row["count"] = report::render(fam.count(n));
    row["prefix"] = report::render(prefix);
    t.rows.push_back(row);
  }
  return t;
}

/// All r = (r_1, ..., r_4) with 1 <= sum r_k <= rho_max, for every N <= n_max,
/// then seeded random simplex sandwiches.
inline Table oracle_table(const RunConfig& c) {
  Table t{report::oracle_columns(), {}};
  std::vector<std::uint64_t> r(4, 0);
  auto visit = [&](auto&& self, std::size_t k, std::uint64_t left) -> void {
    if (k == r.size()) {
      if (left == c.rho_max) return;  // all zero
      for (std::uint64_t n = 1; n <= c.n_max; ++n) {
        try {
          t.rows.push_back(report::monomial_row(lattice::monomial_count_equivalence(r, n)));
        } catch (const lattice::SandwichViolation& e) {
          t.rows.push_back(Json{{"check", "monomial"}, {"case", "r=" + report::join(r, ':')}, {"N", n},
                                {"detail", e.what()}, {"pass", false}});
        }
      }
      return;
    }
    for (std::uint64_t v = 0; v <= left; ++v) {
      r[k] = v;
      self(self, k + 1, left - v);
    }
    r[k] = 0;
  };
  visit(visit, 0, c.rho_max);

  std::mt19937_64 rng(c.seed);
  auto uniform = [&rng](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  for (int i = 0; i < kRandomSandwichInstances; ++i) {
    std::vector<std::uint64_t> w(uniform(1, 4));
    for (auto& x : w) x = uniform(1, 8);
    const lattice::LatticeProblem p{w, uniform(1, 20), lattice::Origin::from_one};
    try {
      t.rows.push_back(report::sandwich_row(lattice::sandwich_check(p)));
    } catch (const lattice::SandwichViolation& e) {
      t.rows.push_back(Json{{"check", "sandwich"}, {"case", "w=" + report::join(w, ':')}, {"N", p.bound},
                            {"detail", e.what()}, {"pass", false}});
    }
  }
  return t;
}

/// psi^v_u(z) = sum_m z^m / (m! Gamma(v + 1 + u m)), the series route used as reference.
inline ExtReal psi_reference(const Rational& u, const Rational& v, const ExtReal& z) {
  return special::wright_psi(special::WrightParams(u, v), z, 1e-14);
}

inline Table bromwich_table(const RunConfig& c) {
  constexpr double kTol = 1e-6;
  const Precision prec = 160;
  Table t{report::quadrature_columns(), {}};
  const bromwich::ContourSpec spec = c.contour;

  // (1/2 pi i) int e^{a s^-u} s^-(v+1) e^{ts} ds = psi^v_u(a t^u) t^v.
  const std::vector<Rational> us = {Rational(1, 3), Rational(1, 2), Rational(1), Rational(2)};
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    for (const Rational& u : us) {
      for (long v : {0L, 1L}) {
        for (double x : {0.5, 1.0, 2.0, 5.0}) {
          const ExtReal aa = ExtReal::from_double(a, prec);
          const ExtReal tt = ExtReal::from_double(x, prec);
          const ExtReal z = aa * pow(tt, ExtReal::from_rational(u, prec));
          const ExtReal ref = psi_reference(u, v, z) * pow(tt, ExtReal::from_long(v, prec));
          const auto r = bromwich::invert_power_symbol(aa, u, v, x, spec);
          t.rows.push_back(report::quadrature_row("power_symbol",
                                                  "a=" + report::param(a) + " u=" + u.get_str() +
                                                      " v=" + std::to_string(v) + " t=" + report::param(x),
                                                  r, ref, kTol));
        }
      }
    }
  }

  // phi_h for h = x^q equals psi^0_{1/q}(Gamma(1 + 1/q) zeta_N(1 + 1/q) x^{1/q}).
  for (unsigned q : {1u, 2u, 3u}) {
    const Rational iq(1, q);
    for (std::uint64_t n : {1u, 10u, 50u}) {
      for (double x : {1.0, 10.0, 50.0}) {
        const ExtReal z = special::gamma_pos(1 + iq, 1e-30).with_precision(prec) *
                          special::zeta_trunc(n, 1 + iq, 1e-30).with_precision(prec) *
                          pow(ExtReal::from_double(x, prec), ExtReal::from_rational(iq, prec));
        const auto r = bromwich::phi_h(FunctionSpecH::power(q), n, x, spec);
        t.rows.push_back(report::quadrature_row(
            "phi_h", "q=" + std::to_string(q) + " N=" + std::to_string(n) + " x=" + report::param(x), r,
            psi_reference(iq, 0, z), kTol));
      }
    }
  }

  // The same integrals taken on other abscissas must agree with c = 1.
  for (double cc : {0.5, 2.0}) {
    bromwich::ContourSpec moved = spec;
    moved.c = cc;
    const ExtReal two = ExtReal::from_long(2, prec);
    const auto base = bromwich::invert_power_symbol(two, Rational(1, 2), 1, 1.5, spec);
    const auto other = bromwich::invert_power_symbol(two, Rational(1, 2), 1, 1.5, moved);
    t.rows.push_back(report::quadrature_row("abscissa", "power_symbol a=2 u=1/2 v=1 t=1.5 c=" + report::param(cc),
                                            other, base.value, 2 * spec.tol));
    const auto hb = bromwich::phi_h(FunctionSpecH::power(2), 10, 10.0, spec);
    const auto ho = bromwich::phi_h(FunctionSpecH::power(2), 10, 10.0, moved);
    t.rows.push_back(report::quadrature_row("abscissa", "phi_h q=2 N=10 x=10 c=" + report::param(cc), ho, hb.value,
                                            2 * spec.tol));
  }

  std::vector<double> xs;
  for (int x = -5; x <= 5; ++x) xs.push_back(x);
  t.rows.push_back(report::perron_row(bromwich::perron_truncation_bound_check(xs, 1.0, {2.0, 10.0, 100.0})));
  return t;
}

inline Table slope_table(const RunConfig& c) {
  bounds::BoundsEngine engine(engine_options(c));
  const auto [up, down] =
      engine.slope_check(c.slope_q(), c.window->first, c.window->second, c.slope_tolerance());
  Table t{report::slope_columns(), {}};
  t.rows.push_back(report::slope_row(down));
  t.rows.push_back(report::slope_row(up));
  return t;
}

inline Table build(const RunConfig& c) {
  switch (c.command) {
    case Command::verify:
      return verify_table(c);
    case Command::table:
      return count_table(c);
    case Command::oracle:
      return oracle_table(c);
    case Command::bromwich_check:
      return bromwich_table(c);
    case Command::slope:
      return slope_table(c);
  }
  throw std::logic_error("unhandled command");
}

inline int fail(std::ostream& err, const char* kind, int code, const std::string& message) {
  Json j;
  j["error"] = kind;
  j["exit"] = code;
  j["message"] = message;
  err << j.dump() << '\n';
  return code;
}

/// Runs one command and writes its artifact to `out`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.validate();
    const Table t = build(c);
    report::write(out, c.format, c.to_json(), t);
    return t.all_pass() ? kExitPass : kExitVerdict;
  } catch (const bromwich::QuadratureFailure& e) {
    return fail(err, "quadrature", kExitQuadrature, e.what());
  } catch (const lattice::GuardExceeded& e) {
    return fail(err, "validation", kExitValidation, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(err, "validation", kExitValidation, e.what());
  }
}

/// As above, writing to c.output or standard output.
inline int run(const RunConfig& c) {
  if (c.output.empty()) return run(c, std::cout, std::cerr);
  std::ofstream file(c.output, std::ios::binary);
  if (!file) return fail(std::cerr, "validation", kExitValidation, "cannot open output \"" + c.output + "\"");
  return run(c, file, std::cerr);
}

}  // namespace partition_lab::cli
