#pragma once

// Brute-force lattice-point counts in weighted simplices and in the curved
// regions sum w_i h(x_i) <= N, the simplex volume formula, and the sandwich
// count(x >= 1) <= volume <= count(x >= 0) that the prefix-sum bounds rest on.

#include "partition_lab/counts.hpp"
#include "partition_lab/ext_real.hpp"
#include "partition_lab/functions.hpp"
#include "partition_lab/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace partition_lab::lattice {

inline constexpr double kEnumerationGuard = 1e8;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// The enumeration would visit more than kEnumerationGuard axis combinations.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sandwich inequality failed; this would falsify the volume argument.
class SandwichViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Origin { from_one, from_zero };

struct LatticeProblem {
  std::vector<std::uint64_t> weights;
  std::uint64_t bound = 0;
  Origin origin = Origin::from_zero;

  void validate() const {
    if (weights.empty()) throw std::invalid_argument("lattice problem needs at least one weight");
    for (auto w : weights) {
      if (w == 0) throw std::invalid_argument("lattice weights must be positive");
    }
    if (bound == 0) throw std::invalid_argument("lattice bound N must be positive");
  }
};

enum class Rounding { none, floor, ceiling };

struct CurvedProblem {
  FunctionSpecH h;
  std::vector<std::uint64_t> weights;
  std::uint64_t bound = 0;
  Rounding rounding = Rounding::none;

  void validate() const { LatticeProblem{weights, bound, Origin::from_zero}.validate(); }
};

namespace detail {

inline std::string join(const std::vector<std::uint64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

/// Counts x with sum w_i values[x_i] <= N and x_i >= lo, where values is the
/// increasing list h(0), h(1), ..., truncated at N. The last axis is counted
/// by binary search instead of enumeration.
inline BigInt count_sorted(const std::vector<std::uint64_t>& weights, std::uint64_t n,
                           const std::vector<std::uint64_t>& values, std::size_t lo) {
  double combos = 1.0;
  for (auto w : weights) {
    const auto top = std::upper_bound(values.begin(), values.end(), n / w) - values.begin();
    combos *= static_cast<double>(std::max<std::ptrdiff_t>(top - static_cast<std::ptrdiff_t>(lo), 0));
  }
  if (combos > kEnumerationGuard) {
    throw GuardExceeded("enumeration of weights " + join(weights) + " with N = " + std::to_string(n) +
                        " needs about " + std::to_string(combos) + " combinations; shrink the instance");
  }
  BigInt total = 0;
  auto rec = [&](auto&& self, std::size_t axis, std::uint64_t left) -> void {
    const std::uint64_t w = weights[axis];
    const auto top = static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), left / w) -
                                              values.begin());
    if (axis + 1 == weights.size()) {
      if (top > lo) total += static_cast<unsigned long>(top - lo);
      return;
    }
    for (std::size_t x = lo; x < top; ++x) self(self, axis + 1, left - w * values[x]);
  };
  rec(rec, 0, n);
  return total;
}

inline std::vector<std::uint64_t> identity_values(std::uint64_t n) {
  std::vector<std::uint64_t> v(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i) v[i] = i;
  return v;
}

inline std::vector<std::uint64_t> curve_values(const FunctionSpecH& h, std::uint64_t n) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 0;; ++i) {
    const BigInt hi = h.at_integer(i);
    if (hi > static_cast<unsigned long>(n)) break;
    v.push_back(hi.get_ui());
  }
  return v;
}

}  // namespace detail

/// Number of x in Z^rho with sum w_i x_i <= N and every x_i >= 1 (from_one) or >= 0.
inline BigInt count_lattice(const LatticeProblem& p) {
  p.validate();
  return detail::count_sorted(p.weights, p.bound, detail::identity_values(p.bound),
                              p.origin == Origin::from_one ? 1 : 0);
}

/// Volume of {x >= 0 : sum x_i / a_i <= 1} = (1/n!) prod a_i.
inline Rational simplex_volume(const std::vector<Rational>& intercepts) {
  if (intercepts.empty()) throw std::invalid_argument("simplex needs at least one axis");
  Rational v = 1;
  for (std::size_t i = 0; i < intercepts.size(); ++i) {
    if (intercepts[i] <= 0) throw std::invalid_argument("simplex intercepts must be positive");
    v *= intercepts[i];
    v /= static_cast<unsigned long>(i + 1);
  }
  return v;
}

struct SandwichReport {
  std::vector<std::uint64_t> weights;
  std::uint64_t bound = 0;
  BigInt count_one;
  Rational volume;
  BigInt count_zero;
};

/// count(x >= 1) <= vol <= count(x >= 0) for the simplex with intercepts N / w_i.
inline SandwichReport sandwich_check(const LatticeProblem& p) {
  p.validate();
  SandwichReport r;
  r.weights = p.weights;
  r.bound = p.bound;
  r.count_one = count_lattice({p.weights, p.bound, Origin::from_one});
  r.count_zero = count_lattice({p.weights, p.bound, Origin::from_zero});
  std::vector<Rational> intercepts;
  for (auto w : p.weights) intercepts.emplace_back(BigInt(static_cast<unsigned long>(p.bound)), BigInt(static_cast<unsigned long>(w)));
  for (auto& a : intercepts) a.canonicalize();
  r.volume = simplex_volume(intercepts);
  if (!(r.count_one <= r.volume && r.volume <= r.count_zero)) {
    throw SandwichViolation("simplex sandwich fails for weights " + detail::join(p.weights) + ", N = " +
                            std::to_string(p.bound) + ": " + r.count_one.get_str() + " <= " + r.volume.get_str() +
                            " <= " + r.count_zero.get_str());
  }
  return r;
}

/// Exact lattice count for the floor (x >= 0) or ceiling (x >= 1) region.
inline BigInt count_curved(const CurvedProblem& p) {
  p.validate();
  if (p.rounding == Rounding::none) throw std::invalid_argument("the unrounded region has a volume, not a count");
  return detail::count_sorted(p.weights, p.bound, detail::curve_values(p.h, p.bound),
                              p.rounding == Rounding::ceiling ? 1 : 0);
}

/// Volume of {x >= 0 : sum w_i x_i^q <= N} = Gamma(1+1/q)^rho / Gamma(1+rho/q) prod (N/w_i)^{1/q}.
inline double dirichlet_volume(unsigned q, const std::vector<std::uint64_t>& weights, std::uint64_t n) {
  const double iq = 1.0 / q;
  const double rho = static_cast<double>(weights.size());
  double log_v = rho * std::lgamma(1.0 + iq) - std::lgamma(1.0 + rho * iq);
  for (auto w : weights) log_v += iq * std::log(static_cast<double>(n) / static_cast<double>(w));
  return std::exp(log_v);
}

struct MonteCarloVolume {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Hit-or-miss volume of {x >= 0 : sum w_i h(x_i) <= N} in its bounding box,
/// with a normal-approximation confidence interval at z standard errors.
inline MonteCarloVolume monte_carlo_volume(const FunctionSpecH& h, const std::vector<std::uint64_t>& weights,
                                           std::uint64_t n, std::uint64_t samples, std::uint64_t seed = kDefaultSeed,
                                           double z = 3.29) {
  std::vector<double> sides;
  double box = 1.0;
  for (auto w : weights) {
    sides.push_back(h.inverse(static_cast<double>(n) / static_cast<double>(w)));
    box *= sides.back();
  }
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < sides.size(); ++a) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      acc += static_cast<double>(weights[a]) * h.at(u * sides[a]);
    }
    if (acc <= static_cast<double>(n)) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  const double se = std::sqrt(std::max(frac * (1 - frac), 1.0 / static_cast<double>(samples)) /
                              static_cast<double>(samples));
  return {box * frac, box * std::max(frac - z * se, 0.0), box * std::min(frac + z * se, 1.0), samples, seed};
}

enum class CurvedStatus { pass, fail, inconclusive };

inline std::string to_string(CurvedStatus s) {
  switch (s) {
    case CurvedStatus::pass:
      return "pass";
    case CurvedStatus::fail:
      return "fail";
    case CurvedStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct CurvedSandwichReport {
  std::string h;
  std::vector<std::uint64_t> weights;
  std::uint64_t bound = 0;
  BigInt count_minus;  // lattice form of C_-: x_i >= 1
  BigInt count_plus;   // lattice form of C_+: x_i >= 0
  MonteCarloVolume volume;
  std::optional<double> exact_volume;  // power curves only
  CurvedStatus status = CurvedStatus::inconclusive;
};

/// count(C_-) <= vol(C) <= count(C_+), with vol(C) estimated by Monte Carlo.
/// Samples double from 10^5 up to max_samples until the interval is narrower
/// than 2% of the estimate; a wider interval is reported as inconclusive.
inline CurvedSandwichReport curved_sandwich_check(const CurvedProblem& p, std::uint64_t max_samples = 1'000'000,
                                                  std::uint64_t seed = kDefaultSeed) {
  p.validate();
  CurvedSandwichReport r;
  r.h = p.h.describe();
  r.weights = p.weights;
  r.bound = p.bound;
  r.count_minus = count_curved({p.h, p.weights, p.bound, Rounding::ceiling});
  r.count_plus = count_curved({p.h, p.weights, p.bound, Rounding::floor});
  std::uint64_t samples = std::min<std::uint64_t>(100'000, max_samples);
  while (true) {
    r.volume = monte_carlo_volume(p.h, p.weights, p.bound, samples, seed);
    if (r.volume.ci_high - r.volume.ci_low <= 0.02 * r.volume.estimate || samples >= max_samples) break;
    samples = std::min(samples * 2, max_samples);
  }
  if (p.h.kind() == FunctionSpecH::Kind::power) r.exact_volume = dirichlet_volume(p.h.q(), p.weights, p.bound);

  const bool narrow = r.volume.ci_high - r.volume.ci_low <= 0.02 * r.volume.estimate;
  const bool lower_ok = r.count_minus.get_d() <= r.volume.ci_high;
  const bool upper_ok = r.volume.ci_low <= r.count_plus.get_d();
  bool exact_ok = true;
  if (r.exact_volume) {
    exact_ok = r.count_minus.get_d() <= *r.exact_volume * (1 + 1e-12) &&
               *r.exact_volume <= r.count_plus.get_d() * (1 + 1e-12);
  }
  if (!exact_ok || (narrow && !(lower_ok && upper_ok))) {
    r.status = CurvedStatus::fail;
  } else {
    r.status = narrow ? CurvedStatus::pass : CurvedStatus::inconclusive;
  }
  return r;
}

struct MonomialReport {
  std::vector<std::uint64_t> r;
  std::uint64_t bound = 0;
  BigInt series_one;
  BigInt lattice_one;
  BigInt series_zero;
  BigInt lattice_zero;
};

/// I[prod w_k^{r_k}](N) equals the x >= 1 count for the weight multiset {k repeated r_k times},
/// and I[prod (1 + w_k)^{r_k}](N) equals the x >= 0 count.
inline MonomialReport monomial_count_equivalence(const std::vector<std::uint64_t>& r, std::uint64_t n) {
  std::vector<std::uint64_t> weights;
  for (std::size_t k = 0; k < r.size(); ++k) weights.insert(weights.end(), r[k], k + 1);
  if (weights.empty()) throw std::invalid_argument("monomial needs sum r_k >= 1");
  MonomialReport rep;
  rep.r = r;
  rep.bound = n;
  rep.lattice_one = count_lattice({weights, n, Origin::from_one});
  rep.lattice_zero = count_lattice({weights, n, Origin::from_zero});

  using series::TruncatedSeries;
  TruncatedSeries one = TruncatedSeries::one(n);
  TruncatedSeries zero = TruncatedSeries::one(n);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] == 0) continue;
    const TruncatedSeries w = series::make_gap_series(k + 1, n);
    one = series::mul(one, series::power(w, static_cast<unsigned>(r[k])));
    zero = series::mul(zero, series::power(series::add(TruncatedSeries::one(n), w), static_cast<unsigned>(r[k])));
  }
  rep.series_one = series::prefix_sum_I(one, n);
  rep.series_zero = series::prefix_sum_I(zero, n);
  if (rep.series_one != rep.lattice_one || rep.series_zero != rep.lattice_zero) {
    throw SandwichViolation("monomial count mismatch for r = " + detail::join(r) + ", N = " + std::to_string(n) +
                            ": " + rep.series_one.get_str() + " vs " + rep.lattice_one.get_str() + ", " +
                            rep.series_zero.get_str() + " vs " + rep.lattice_zero.get_str());
  }
  return rep;
}

struct VolumeDemo {
  std::uint64_t n = 0;
  Rational volume;  // N^N / (N!)^2
  BigInt prefix;    // sum_{n <= N} p(n)
  double ratio = 0.0;
};

/// The simplex with intercepts N/k, k = 1..N, inside the region counted by sum p(n).
inline VolumeDemo volume_demo(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("volume demo needs N >= 1");
  std::vector<Rational> intercepts;
  for (std::uint64_t k = 1; k <= n; ++k) {
    Rational a(BigInt(static_cast<unsigned long>(n)), BigInt(static_cast<unsigned long>(k)));
    a.canonicalize();
    intercepts.push_back(a);
  }
  VolumeDemo d;
  d.n = n;
  d.volume = simplex_volume(intercepts);
  d.prefix = counts::CountFamily::plain(n).prefix(n);
  d.ratio = Rational(d.volume / d.prefix).get_d();
  return d;
}

}  // namespace partition_lab::lattice
