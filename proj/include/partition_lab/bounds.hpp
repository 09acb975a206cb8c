#pragma once

// Every explicit inequality between exact counts and their closed-form
// bounds, evaluated as verdicts. Bounds are enclosed in intervals; a
// comparison with the exact integer is only accepted once the interval lies
// entirely on one side, doubling precision until it does.

#include "partition_lab/bromwich.hpp"
#include "partition_lab/counts.hpp"
#include "partition_lab/ext_real.hpp"
#include "partition_lab/functions.hpp"
#include "partition_lab/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partition_lab::bounds {

struct BoundVerdict {
  std::string label;
  std::uint64_t n = 0;
  BigInt exact;
  std::optional<ExtReal> lower;  // absent for one-sided chains
  ExtReal upper;
  ExtReal log_lower_margin;  // log(exact / lower); +inf when lower <= 0
  ExtReal log_upper_margin;  // log(upper / exact)
  bool pass_lower = true;
  bool pass_upper = true;
  bool decisive = true;
  Precision precision = 0;
  std::vector<std::pair<std::string, std::string>> notes;

  bool pass() const { return pass_lower && pass_upper; }
};

struct SlopeReport {
  std::string label;
  Rational exponent_expected;
  double exponent_measured = 0.0;
  std::uint64_t n_min = 0;
  std::uint64_t n_max = 0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::uint64_t, double>> samples;  // (N, ratio)
};

struct TrendReport {
  std::vector<std::pair<std::uint64_t, double>> samples;  // (N, log sum p / (pi sqrt(2N/3)))
  bool approaching_one = false;
};

/// Descriptive fit of the existence-only constants C_1, C_2 at a fixed delta.
struct ConstantFit {
  double delta = 0.5;
  double c1 = 0.0;
  double c2 = 0.0;
  std::uint64_t n_min = 0;
  std::uint64_t n_max = 0;
};

/// Outcome of comparing one bound against the exact count.
struct SideDecision {
  bool pass = false;
  bool decisive = false;
  ExtReal value;  // bound rounded to the reporting precision
  Precision precision = 0;
};

namespace detail {

inline constexpr Precision kGuardBits = 32;

/// Evaluates `bound` at increasing precision until its enclosure no longer
/// straddles `exact`. `lower_side` selects bound <= exact as the pass
/// condition, otherwise exact <= bound.
inline SideDecision decide(const std::function<Interval(Precision)>& bound, const BigInt& exact, bool lower_side,
                           Precision report_prec) {
  Precision p = report_prec + kGuardBits;
  while (true) {
    const Interval iv = bound(p);
    const bool below = compare(iv.hi(), exact) <= 0;  // whole enclosure <= exact
    const bool above = compare(iv.lo(), exact) >= 0;  // whole enclosure >= exact
    const bool settled = lower_side ? (below || compare(iv.lo(), exact) > 0) : (above || compare(iv.hi(), exact) < 0);
    if (settled || p >= kMaxPrecision) {
      SideDecision d;
      d.pass = lower_side ? below : above;
      d.decisive = settled;
      d.value = iv.mid().with_precision(report_prec);
      d.precision = p;
      return d;
    }
    p = std::min<Precision>(2 * p, kMaxPrecision);
  }
}

inline ExtReal log_ratio(const ExtReal& num, const ExtReal& den) {
  if (den.sign() <= 0) return ExtReal::infinity(1, num.precision());
  if (num.sign() <= 0) return ExtReal::infinity(-1, num.precision());
  return log(num) - log(den);
}

inline Interval iv(long v, Precision p) { return Interval::from_long(v, p); }

inline Interval inv_e(Precision p) { return exp(-iv(1, p)); }

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<std::pair<std::uint64_t, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    const double lx = std::log(static_cast<double>(x));
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<std::uint64_t> geometric_grid(std::uint64_t lo, std::uint64_t hi, int points) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const auto n = static_cast<std::uint64_t>(std::llround(static_cast<double>(lo) * std::pow(static_cast<double>(hi) / lo, t)));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

}  // namespace detail

struct EngineOptions {
  Precision precision = default_precision();
  /// Test hook: multiplies every upper bound by this factor.
  double corrupt_upper = 1.0;
  bromwich::ContourSpec contour{};
};

class BoundsEngine {
 public:
  BoundsEngine() : BoundsEngine(EngineOptions{}) {}
  explicit BoundsEngine(EngineOptions opts) : opts_(std::move(opts)) {}

  Precision precision() const { return opts_.precision; }
  const EngineOptions& options() const { return opts_; }

  /// e^{-1} N^{-1} I_0(2 sqrt(zeta_N(2) N)) <= sum_{n<=N} p(n) <= I_0(2 sqrt(zeta_N(2) N)).
  BoundVerdict verify_goal1(std::uint64_t big_n) {
    require_positive(big_n, "verify_goal1");
    const BigInt exact = family(Family::plain, 1, big_n).prefix(big_n);
    auto upper = [this, big_n](Precision p) { return corrupt(goal1_upper(big_n, p), p); };
    auto lower = [this, big_n](Precision p) {
      return detail::inv_e(p) * goal1_upper(big_n, p) / detail::iv(static_cast<long>(big_n), p);
    };
    return assemble("goal1", big_n, exact, lower, upper);
  }

  /// e^{-1} n^{-2} I_0(2 sqrt(zeta_n(2) n)) - n^{-1} <= p(n) <= I_0(2 sqrt(zeta_n(2) n)).
  BoundVerdict verify_pn_trivial(std::uint64_t n) {
    require_positive(n, "verify_pn_trivial");
    const BigInt exact = family(Family::plain, 1, n).count(n);
    auto upper = [this, n](Precision p) { return corrupt(goal1_upper(n, p), p); };
    auto lower = [this, n](Precision p) {
      const Interval nn = detail::iv(static_cast<long>(n), p);
      return detail::inv_e(p) * goal1_upper(n, p) / (nn * nn) - detail::iv(1, p) / nn;
    };
    return assemble("pn_trivial", n, exact, lower, upper);
  }

  /// m = floor(sqrt(n / zeta(2))); p(n) <= (1/m) sum_{n<i<=n+m} p(i) <= (1/m) sum_{i<=n+m} p(i)
  /// <= (1/m) I_0(2 sqrt(zeta_{n+m}(2) (n+m))).
  BoundVerdict verify_pn_improved_upper(std::uint64_t n) {
    require_positive(n, "verify_pn_improved_upper");
    const std::uint64_t m = improved_m(n);
    if (m == 0) {
      throw std::invalid_argument("verify_pn_improved_upper needs m = floor(c sqrt(n)) >= 1; n = " +
                                  std::to_string(n));
    }
    const auto& plain = family(Family::plain, 1, n + m);
    const BigInt exact = plain.count(n);
    BigInt window = 0;
    for (std::uint64_t i = n + 1; i <= n + m; ++i) window += plain.count(i);
    const BigInt prefix = plain.prefix(n + m);
    const bool monotone_link = exact * static_cast<unsigned long>(m) <= window;
    const bool prefix_link = window <= prefix;

    // (1/m) I_0(...) >= prefix / m  <=>  I_0(...) >= prefix; decided on the integer prefix.
    auto i0 = [this, n, m](Precision p) { return corrupt(goal1_upper(n + m, p), p); };
    const SideDecision top = detail::decide(i0, prefix, false, opts_.precision);

    BoundVerdict v;
    v.label = "pn_improved_upper";
    v.n = n;
    v.exact = exact;
    const ExtReal mm = ExtReal::from_long(static_cast<long>(m), opts_.precision);
    v.upper = top.value / mm;
    v.pass_upper = monotone_link && prefix_link && top.pass;
    v.decisive = top.decisive;
    v.precision = top.precision;
    v.log_lower_margin = ExtReal::infinity(1, opts_.precision);
    v.log_upper_margin = detail::log_ratio(v.upper, ExtReal::from_int(exact, opts_.precision));
    v.notes.emplace_back("m", std::to_string(m));
    v.notes.emplace_back("window_over_m", (ExtReal::from_int(window, opts_.precision) / mm).to_scientific(12));
    v.notes.emplace_back("prefix_over_m", (ExtReal::from_int(prefix, opts_.precision) / mm).to_scientific(12));
    return v;
  }

  /// Lower: e^{-1} n^{-3/2} [zeta^{1/2} I_1(2 sqrt(zeta n)) - (zeta-1)^{1/2} I_1(2 sqrt((zeta-1) n))] <= p(n).
  /// Upper: p(n) <= zeta^{1/2} n^{-1/2} I_1(2 sqrt(zeta n)) + I_0(2 sqrt((zeta-1) n)), zeta = zeta_n(2).
  /// The n^{+1/2} form of the upper bound is evaluated alongside and recorded in the notes.
  BoundVerdict verify_pn_direct(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("verify_pn_direct needs n >= 2");
    const BigInt exact = family(Family::plain, 1, n).count(n);
    auto lower = [this, n](Precision p) {
      const Interval nn = detail::iv(static_cast<long>(n), p);
      const Interval z = zeta(2, n, p);
      const Interval z1 = z - detail::iv(1, p);
      const Interval two = detail::iv(2, p);
      const Interval a = sqrt(z) * special::bessel_i1_interval(two * sqrt(z * nn), p);
      const Interval b = sqrt(z1) * special::bessel_i1_interval(two * sqrt(z1 * nn), p);
      return detail::inv_e(p) * (a - b) / (nn * sqrt(nn));
    };
    auto upper_with = [this, n](Precision p, bool plus_half) {
      const Interval nn = detail::iv(static_cast<long>(n), p);
      const Interval z = zeta(2, n, p);
      const Interval z1 = z - detail::iv(1, p);
      const Interval two = detail::iv(2, p);
      const Interval scale = plus_half ? sqrt(z) * sqrt(nn) : sqrt(z) / sqrt(nn);
      return scale * special::bessel_i1_interval(two * sqrt(z * nn), p) +
             special::bessel_i0_interval(two * sqrt(z1 * nn), p);
    };
    auto upper = [&](Precision p) { return corrupt(upper_with(p, false), p); };
    BoundVerdict v = assemble("pn_direct", n, exact, lower, upper);

    const SideDecision variant = detail::decide([&](Precision p) { return upper_with(p, true); }, exact, false,
                                                opts_.precision);
    v.notes.emplace_back("upper_plus_half", variant.value.to_scientific(12));
    v.notes.emplace_back("upper_plus_half_holds", variant.pass ? "true" : "false");
    v.notes.emplace_back("minus_half_tighter", v.upper < variant.value ? "true" : "false");
    return v;
  }

  /// e^{-1} N^{-1} psi(z) <= sum_{n<=N} p_q(n) <= psi(z), psi = psi^0_{1/q}, z = Gamma(1+1/q) zeta_N(1+1/q) N^{1/q}.
  BoundVerdict verify_qpower(unsigned q, std::uint64_t big_n) {
    if (q == 0) throw std::invalid_argument("verify_qpower needs q >= 1");
    require_positive(big_n, "verify_qpower");
    const BigInt exact = family(Family::qpower, q, big_n).prefix(big_n);
    auto upper = [this, q, big_n](Precision p) { return corrupt(qpower_upper(q, big_n, p), p); };
    auto lower = [this, q, big_n](Precision p) {
      return detail::inv_e(p) * qpower_upper(q, big_n, p) / detail::iv(static_cast<long>(big_n), p);
    };
    return assemble("qpower" + std::to_string(q), big_n, exact, lower, upper);
  }

  /// e^{-1} N^{-1} psi^0_2(zeta_N(3) N^2) / psi^0_1(zeta_N(2) N) <= sum_{n<=N} PL(n)
  /// <= psi^0_2(zeta_N(3) N^2) psi^0_1(zeta_N(2) N).
  BoundVerdict verify_plane(std::uint64_t big_n) {
    require_positive(big_n, "verify_plane");
    const BigInt exact = family(Family::plane, 1, big_n).prefix(big_n);
    auto parts = [this, big_n](Precision p) {
      const Interval nn = detail::iv(static_cast<long>(big_n), p);
      const Interval a = special::wright_psi_interval(special::WrightParams(2, 0), zeta(3, big_n, p) * nn * nn, p);
      const Interval b = special::wright_psi_interval(special::WrightParams(1, 0), zeta(2, big_n, p) * nn, p);
      return std::make_pair(a, b);
    };
    auto upper = [&](Precision p) {
      const auto [a, b] = parts(p);
      return corrupt(a * b, p);
    };
    auto lower = [&](Precision p) {
      const auto [a, b] = parts(p);
      return detail::inv_e(p) * a / (b * detail::iv(static_cast<long>(big_n), p));
    };
    return assemble("plane", big_n, exact, lower, upper);
  }

  /// e^{-1} N^{-1} phi_h(N) <= sum_{n<=N} p_h(n) <= phi_h(N) with phi_h by contour integration.
  BoundVerdict verify_theoremA_general(const FunctionSpecH& h, std::uint64_t big_n) {
    require_positive(big_n, "verify_theoremA_general");
    if (auto bad = bromwich::LaplaceSymbol::theorem_A(h, big_n, opts_.contour.c).verify_decay(opts_.contour.c, 200)) {
      throw bromwich::QuadratureFailure("decay hypothesis fails for " + h.describe());
    }
    const BigInt exact = counts::CountFamily::from_h(h, big_n).prefix(big_n);
    bromwich::ContourSpec spec = opts_.contour;
    if (h.kind() == FunctionSpecH::Kind::piecewise_linear) spec.tol = std::max(spec.tol, 1e-6);
    const bromwich::InversionResult phi = bromwich::phi_h(h, big_n, static_cast<double>(big_n), spec);

    // The contour value carries a numerical error; its enclosure is widened by the
    // estimate plus the requested tolerance and cannot be refined by precision alone.
    const double value = phi.value.to_double();
    const double slack = phi.error_estimate + spec.tol * std::fabs(value);
    auto enclose = [](double lo, double hi) {
      return Interval(ExtReal::from_double(lo, 53), ExtReal::from_double(hi, 53));
    };
    auto upper = [&](Precision) {
      const Interval u = enclose(value - slack, value + slack);
      return Interval(u.lo() * ExtReal::from_double(opts_.corrupt_upper, 53),
                      u.hi() * ExtReal::from_double(opts_.corrupt_upper, 53));
    };
    auto lower = [&](Precision) {
      const double k = std::exp(-1.0) / static_cast<double>(big_n);
      return enclose(k * (value - slack) * (1 - 1e-15), k * (value + slack) * (1 + 1e-15));
    };
    BoundVerdict v;
    v.label = "theoremA:" + h.describe();
    v.n = big_n;
    v.exact = exact;
    const SideDecision lo = detail::decide(lower, exact, true, 53);
    const SideDecision up = detail::decide(upper, exact, false, 53);
    fill(v, lo, up);
    v.notes.emplace_back("method", bromwich::to_string(phi.method));
    v.notes.emplace_back("phi_error_estimate", ExtReal::from_double(phi.error_estimate, 53).to_scientific(6));
    return v;
  }

  /// Least-squares slopes of log(upper/exact) and log(exact/lower) against log N for
  /// sum p_q over a geometric window; expected q/(2(1+q)) and (2+q)/(2(1+q)).
  std::pair<SlopeReport, SlopeReport> slope_check(unsigned q, std::uint64_t n_min, std::uint64_t n_max,
                                                  double tolerance, int points = 16) {
    if (q == 0) throw std::invalid_argument("slope_check needs q >= 1");
    if (n_min < 100 || n_max <= n_min) throw std::invalid_argument("slope window must satisfy 100 <= N_min < N_max");
    SlopeReport up;
    SlopeReport down;
    up.label = "upper_ratio_q" + std::to_string(q);
    down.label = "lower_ratio_q" + std::to_string(q);
    up.exponent_expected = Rational(q, 2 * (1 + q));
    down.exponent_expected = Rational(2 + q, 2 * (1 + q));
    up.exponent_expected.canonicalize();
    down.exponent_expected.canonicalize();
    for (SlopeReport* r : {&up, &down}) {
      r->n_min = n_min;
      r->n_max = n_max;
      r->tolerance = tolerance;
    }
    family(q == 1 ? Family::plain : Family::qpower, q, n_max);
    for (std::uint64_t n : detail::geometric_grid(n_min, n_max, points)) {
      const BoundVerdict v = q == 1 ? verify_goal1(n) : verify_qpower(q, n);
      const ExtReal e = ExtReal::from_int(v.exact, opts_.precision);
      up.samples.emplace_back(n, std::exp((log(v.upper) - log(e)).to_double()));
      down.samples.emplace_back(n, std::exp((log(e) - log(*v.lower)).to_double()));
    }
    for (SlopeReport* r : {&up, &down}) {
      r->exponent_measured = detail::loglog_slope(r->samples);
      r->pass = std::fabs(r->exponent_measured - r->exponent_expected.get_d()) <= tolerance;
    }
    return {up, down};
  }

  /// log sum_{n<=N} p(n) / (pi sqrt(2N/3)) over a geometric window; the ratio should approach 1.
  TrendReport hardy_ramanujan_trend(std::uint64_t n_min, std::uint64_t n_max, int points = 12) {
    TrendReport t;
    const auto& plain = family(Family::plain, 1, n_max);
    for (std::uint64_t n : detail::geometric_grid(n_min, n_max, points)) {
      const double lg = log(ExtReal::from_int(plain.prefix(n), opts_.precision)).to_double();
      t.samples.emplace_back(n, lg / (std::numbers::pi * std::sqrt(2.0 * static_cast<double>(n) / 3.0)));
    }
    t.approaching_one = true;
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
      if (std::fabs(t.samples[i].second - 1) >= std::fabs(t.samples[i - 1].second - 1)) t.approaching_one = false;
    }
    return t;
  }

  /// Smallest C_1, C_2 for which the constant form of the direct bounds holds on [n_min, n_max]
  /// at the given delta. Descriptive only.
  ConstantFit fit_pn_direct_constants(std::uint64_t n_min, std::uint64_t n_max, double delta = 0.5) {
    if (n_min < 2 || n_max < n_min) throw std::invalid_argument("constant fit needs 2 <= n_min <= n_max");
    ConstantFit fit;
    fit.delta = delta;
    fit.n_min = n_min;
    fit.n_max = n_max;
    const auto& plain = family(Family::plain, 1, n_max);
    const Precision p = opts_.precision;
    for (std::uint64_t n = n_min; n <= n_max; ++n) {
      const Interval nn = detail::iv(static_cast<long>(n), p);
      const Interval z = zeta(2, n, p);
      const Interval i1 = special::bessel_i1_interval(detail::iv(2, p) * sqrt(z * nn), p);
      const ExtReal main_upper = (sqrt(z) / sqrt(nn) * i1).mid();
      const ExtReal main_lower = (detail::inv_e(p) * sqrt(z) * i1 / (nn * sqrt(nn))).mid();
      const ExtReal pn = ExtReal::from_int(plain.count(n), p);
      const double damp = std::exp(delta * std::sqrt(static_cast<double>(n)));
      fit.c2 = std::max(fit.c2, ((pn / main_upper).to_double() - 1.0) * damp);
      fit.c1 = std::max(fit.c1, (1.0 - (pn / main_lower).to_double()) * damp);
    }
    return fit;
  }

  /// m = floor(c sqrt(n)) with c = 1/sqrt(zeta(2)) = sqrt(6)/pi, decided exactly.
  std::uint64_t improved_m(std::uint64_t n) const {
    for (Precision p = opts_.precision; p <= kMaxPrecision; p *= 2) {
      const Interval x = sqrt(detail::iv(static_cast<long>(n), p) / special::zeta2_interval(p));
      const BigInt lo = x.lo().floor();
      if (lo == x.hi().floor()) return lo.get_ui();
    }
    throw std::runtime_error("floor(c sqrt(n)) not decidable at maximum precision");
  }

 private:
  enum class Family { plain, qpower, plane };

  static void require_positive(std::uint64_t n, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + " needs N >= 1");
  }

  /// Exact family cached with a doubling truncation order.
  const counts::CountFamily& family(Family f, unsigned q, std::uint64_t order) {
    const auto key = std::make_pair(static_cast<int>(f), q);
    auto it = families_.find(key);
    if (it != families_.end() && it->second->order() >= order) return *it->second;
    std::size_t target = std::max<std::size_t>(order, 64);
    if (it != families_.end()) target = std::max<std::size_t>(target, 2 * it->second->order());
    counts::CountFamily fam = f == Family::plain   ? counts::CountFamily::plain(target)
                              : f == Family::plane ? counts::CountFamily::plane(target)
                                                   : counts::CountFamily::power(q, target);
    auto ptr = std::make_shared<counts::CountFamily>(std::move(fam));
    families_[key] = ptr;
    return *ptr;
  }

  /// zeta_N(s) from a cached cumulative table at precision p.
  Interval zeta(const Rational& s, std::uint64_t n, Precision p) {
    const auto key = std::make_pair(s.get_str(), p);
    auto it = zetas_.find(key);
    if (it == zetas_.end() || it->second->size() < n) {
      std::uint64_t size = std::max<std::uint64_t>(n, 64);
      if (it != zetas_.end()) size = std::max<std::uint64_t>(size, 2 * it->second->size());
      auto table = std::make_shared<special::ZetaTable>(s, size, p);
      zetas_[key] = table;
      return table->at(n);
    }
    return it->second->at(n);
  }

  Interval goal1_upper(std::uint64_t n, Precision p) {
    const Interval x = detail::iv(2, p) * sqrt(zeta(2, n, p) * detail::iv(static_cast<long>(n), p));
    return special::bessel_i0_interval(x, p);
  }

  Interval qpower_upper(unsigned q, std::uint64_t n, Precision p) {
    const Rational iq(1, q);
    const Interval nn = detail::iv(static_cast<long>(n), p);
    const Interval root = q == 1 ? nn : pow(nn, Interval::from_rational(iq, p));
    const Interval z = special::gamma_interval(1 + iq, p) * zeta(1 + iq, n, p) * root;
    return special::wright_psi_interval(special::WrightParams(iq, 0), z, p);
  }

  Interval corrupt(const Interval& x, Precision p) const {
    if (opts_.corrupt_upper == 1.0) return x;
    const Interval k = Interval::point(ExtReal::from_double(opts_.corrupt_upper, p));
    return x * k;
  }

  void fill(BoundVerdict& v, const SideDecision& lo, const SideDecision& up) const {
    v.lower = lo.value;
    v.upper = up.value;
    v.pass_lower = lo.pass;
    v.pass_upper = up.pass;
    v.decisive = lo.decisive && up.decisive;
    v.precision = std::max(lo.precision, up.precision);
    const ExtReal e = ExtReal::from_int(v.exact, std::max<Precision>(opts_.precision, 64));
    v.log_lower_margin = detail::log_ratio(e, lo.value);
    v.log_upper_margin = detail::log_ratio(up.value, e);
  }

  BoundVerdict assemble(std::string label, std::uint64_t n, const BigInt& exact,
                        const std::function<Interval(Precision)>& lower,
                        const std::function<Interval(Precision)>& upper) {
    BoundVerdict v;
    v.label = std::move(label);
    v.n = n;
    v.exact = exact;
    fill(v, detail::decide(lower, exact, true, opts_.precision), detail::decide(upper, exact, false, opts_.precision));
    return v;
  }

  EngineOptions opts_;
  std::map<std::pair<int, unsigned>, std::shared_ptr<counts::CountFamily>> families_;
  std::map<std::pair<std::string, Precision>, std::shared_ptr<special::ZetaTable>> zetas_;
};

}  // namespace partition_lab::bounds
