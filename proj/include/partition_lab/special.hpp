#pragma once

// Truncated zeta, Gamma at positive rationals, Wright's generalized Bessel
// function psi^v_u and the modified Bessel functions I_0, I_1.
//
// The *_interval functions return rigorous enclosures at a given precision.
// The tolerance-based functions pick a precision from the tolerance, raise it
// until the enclosure is narrow enough and return the midpoint.

#include "partition_lab/ext_real.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partition_lab::special {

namespace detail {

inline Interval nudge_out(Interval x) {
  ExtReal lo = x.lo();
  ExtReal hi = x.hi();
  mpfr_nextbelow(lo.get());
  mpfr_nextabove(hi.get());
  return {std::move(lo), std::move(hi)};
}

inline bool exactly_representable(const Rational& x, Precision prec) {
  ExtReal r(prec);
  return mpfr_set_q(r.get(), x.get_mpq_t(), MPFR_RNDN) == 0;
}

/// Repeats `eval` at doubling precision until the enclosure is at most `tol`
/// wide relative to its midpoint.
template <class Eval>
ExtReal refine(double tol, Eval eval) {
  for (Precision prec = precision_for_tolerance(tol);; prec *= 2) {
    const Interval r = eval(std::min(prec, kMaxPrecision));
    if (r.relative_width() <= tol || prec >= kMaxPrecision) {
      return r.mid();
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------- zeta

/// n^{-s} enclosure for integer n >= 1 and rational s > 0.
inline Interval inverse_power(std::uint64_t n, const Rational& s, Precision prec) {
  if (n == 1) return Interval::from_long(1, prec);
  const Interval one = Interval::from_long(1, prec);
  if (s.get_den() == 1 && s.get_num().fits_ulong_p()) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), n, s.get_num().get_ui());
    return one / Interval::from_int(p, prec);
  }
  const Interval base = Interval::from_long(static_cast<long>(n), prec);
  return pow(base, -Interval::from_rational(s, prec));
}

/// zeta_N(s) = sum_{n<=N} n^{-s}.
inline Interval zeta_trunc_interval(std::uint64_t n_max, const Rational& s, Precision prec) {
  if (n_max == 0) throw std::invalid_argument("zeta_trunc needs N >= 1");
  if (s <= 0) throw std::invalid_argument("zeta_trunc needs s > 0");
  Interval acc = Interval::from_long(0, prec);
  for (std::uint64_t n = n_max; n >= 1; --n) acc = acc + inverse_power(n, s, prec);
  return acc;
}

inline ExtReal zeta_trunc(std::uint64_t n_max, const Rational& s, double tol) {
  return detail::refine(tol, [&](Precision p) { return zeta_trunc_interval(n_max, s, p); });
}

/// Cumulative zeta_N(s) for N = 1..max at one precision.
class ZetaTable {
 public:
  ZetaTable(const Rational& s, std::uint64_t n_max, Precision prec) : s_(s), prec_(prec) {
    if (s <= 0) throw std::invalid_argument("zeta table needs s > 0");
    values_.reserve(n_max);
    Interval acc = Interval::from_long(0, prec);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      acc = acc + inverse_power(n, s, prec);
      values_.push_back(acc);
    }
  }

  const Interval& at(std::uint64_t n) const {
    if (n == 0 || n > values_.size()) {
      throw std::out_of_range("zeta table has no entry for N = " + std::to_string(n));
    }
    return values_[n - 1];
  }

  /// zeta_N(s) - 1, summed without the n = 1 term so no cancellation occurs.
  Interval tail_after_one(std::uint64_t n) const {
    Interval acc = Interval::from_long(0, prec_);
    for (std::uint64_t k = n; k >= 2; --k) acc = acc + inverse_power(k, s_, prec_);
    return acc;
  }

  std::uint64_t size() const { return values_.size(); }
  Precision precision() const { return prec_; }
  const Rational& s() const { return s_; }

 private:
  Rational s_;
  Precision prec_;
  std::vector<Interval> values_;
};

/// zeta(2) = pi^2 / 6.
inline Interval zeta2_interval(Precision prec) {
  const Interval pi = Interval::pi(prec);
  return pi * pi / Interval::from_long(6, prec);
}

// ---------------------------------------------------------------- gamma

inline Interval gamma_interval(const Rational& x, Precision prec) {
  if (x <= 0) {
    throw std::invalid_argument("gamma_pos needs x > 0, got " + x.get_str());
  }
  if (x.get_den() == 1 && x.get_num().fits_ulong_p()) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), x.get_num().get_ui() - 1);
    return Interval::from_int(f, prec);
  }
  const Interval arg = Interval::from_rational(x, prec);
  ExtReal vals[4] = {ExtReal(prec), ExtReal(prec), ExtReal(prec), ExtReal(prec)};
  mpfr_gamma(vals[0].get(), arg.lo().get(), MPFR_RNDD);
  mpfr_gamma(vals[1].get(), arg.lo().get(), MPFR_RNDU);
  mpfr_gamma(vals[2].get(), arg.hi().get(), MPFR_RNDD);
  mpfr_gamma(vals[3].get(), arg.hi().get(), MPFR_RNDU);
  Interval r{std::min(vals[0], vals[2]), std::max(vals[1], vals[3])};
  if (detail::exactly_representable(x, prec)) return r;
  // Gamma is not monotone below its minimum near 1.4616; widen by an ulp so a
  // turning point inside the (tiny) argument interval stays enclosed.
  return detail::nudge_out(std::move(r));
}

inline ExtReal gamma_pos(const Rational& x, double tol) {
  return detail::refine(tol, [&](Precision p) { return gamma_interval(x, p); });
}

// ---------------------------------------------------------------- Wright psi

struct WrightParams {
  Rational u;
  Rational v;

  WrightParams(Rational u_, Rational v_) : u(std::move(u_)), v(std::move(v_)) {
    u.canonicalize();
    v.canonicalize();
    if (u <= 0) throw std::invalid_argument("Wright parameter u must be positive");
    if (v < 0) throw std::invalid_argument("Wright parameter v must be non-negative");
  }
};

/// psi^v_u(z) = sum_n z^n / (n! Gamma(n u + v + 1)) for z >= 0.
///
/// Lower endpoint: partial sum at z.lo rounded down. Upper endpoint: partial
/// sum at z.hi rounded up plus a geometric tail bound. The term ratio
/// rho_n = z Gamma(nu+v+1) / ((n+1) Gamma((n+1)u+v+1)) is decreasing in n
/// (log-convexity of Gamma), so once rho < 1 the remaining terms are bounded
/// by t_n rho / (1 - rho).
inline Interval wright_psi_interval(const WrightParams& p, const Interval& z, Precision prec) {
  if (z.lo().sign() < 0) {
    throw std::invalid_argument("wright_psi needs z >= 0");
  }
  const ExtReal& z_lo = z.lo();
  const ExtReal& z_hi = z.hi();

  // Gamma(n u + v + 1): u = a/d, so the argument grows by the integer a every
  // d steps and Gamma(x + a) = Gamma(x) x (x+1) ... (x+a-1) exactly. The ring
  // holds the latest value for each residue of n mod d.
  const unsigned long step_num = p.u.get_num().get_ui();
  const unsigned long period = p.u.get_den().get_ui();
  std::vector<Interval> ring;
  ring.reserve(period);
  auto next_gamma = [&](std::uint64_t n) -> const Interval& {
    const Rational arg = p.u * static_cast<unsigned long>(n) + p.v + 1;
    if (n < period) {
      ring.push_back(gamma_interval(arg, prec));
      return ring.back();
    }
    const Rational base = arg - static_cast<long>(step_num);
    Rational factor = 1;
    for (unsigned long j = 0; j < step_num; ++j) factor *= base + static_cast<long>(j);
    Interval& slot = ring[n % period];
    slot = slot * Interval::from_rational(factor, prec);
    return slot;
  };

  ExtReal num_lo = ExtReal::from_long(1, prec);  // z^n / n! rounded down, at z.lo
  ExtReal num_hi = ExtReal::from_long(1, prec);  // rounded up, at z.hi
  const Interval& g0 = next_gamma(0);
  ExtReal term_lo = div(num_lo, g0.hi(), Round::down);
  ExtReal sum_lo = term_lo;
  ExtReal sum_hi = div(num_hi, g0.lo(), Round::up);
  if (z_hi.is_zero()) return {sum_lo, sum_hi};

  const ExtReal one = ExtReal::from_long(1, prec);
  constexpr std::uint64_t kMaxTerms = 1'000'000;
  for (std::uint64_t n = 1; n < kMaxTerms; ++n) {
    const ExtReal n_real = ExtReal::from_long(static_cast<long>(n), prec);
    num_lo = div(mul(num_lo, z_lo, Round::down), n_real, Round::down);
    num_hi = div(mul(num_hi, z_hi, Round::up), n_real, Round::up);
    const Interval& g = next_gamma(n);
    const ExtReal next_lo = div(num_lo, g.hi(), Round::down);
    const ExtReal next_hi = div(num_hi, g.lo(), Round::up);
    sum_lo = add(sum_lo, next_lo, Round::down);
    sum_hi = add(sum_hi, next_hi, Round::up);

    if (!term_lo.is_zero()) {
      const ExtReal rho = div(next_hi, term_lo, Round::up);
      if (rho < one) {
        const ExtReal tail = div(mul(next_hi, rho, Round::up), sub(one, rho, Round::down), Round::up);
        ExtReal threshold = sum_lo;
        mpfr_div_2si(threshold.get(), threshold.get(), static_cast<long>(prec) + 4, MPFR_RNDD);
        if (tail <= threshold) {
          return {sum_lo, add(sum_hi, tail, Round::up)};
        }
      }
    }
    term_lo = next_lo;
  }
  throw std::runtime_error("wright_psi: series did not settle within the term cap");
}

inline ExtReal wright_psi(const WrightParams& p, const ExtReal& z, double tol) {
  if (z.sign() < 0) throw std::invalid_argument("wright_psi needs z >= 0");
  return detail::refine(tol, [&](Precision prec) {
    return wright_psi_interval(p, Interval::point(z.with_precision(std::max(prec, z.precision()))), prec);
  });
}

// ---------------------------------------------------------------- Bessel

/// I_0(x) = psi^0_1(x^2 / 4).
inline Interval bessel_i0_interval(const Interval& x, Precision prec) {
  if (x.lo().sign() < 0) throw std::invalid_argument("bessel_i0 needs x >= 0");
  const Interval z = x * x / Interval::from_long(4, prec);
  return wright_psi_interval(WrightParams(1, 0), z, prec);
}

/// I_1(x) = (x / 2) psi^1_1(x^2 / 4).
inline Interval bessel_i1_interval(const Interval& x, Precision prec) {
  if (x.lo().sign() < 0) throw std::invalid_argument("bessel_i1 needs x >= 0");
  const Interval two = Interval::from_long(2, prec);
  const Interval z = x * x / Interval::from_long(4, prec);
  return x / two * wright_psi_interval(WrightParams(1, 1), z, prec);
}

inline ExtReal bessel_i0(const ExtReal& x, double tol) {
  if (x.sign() < 0) throw std::invalid_argument("bessel_i0 needs x >= 0");
  return detail::refine(tol, [&](Precision p) {
    return bessel_i0_interval(Interval::point(x.with_precision(std::max(p, x.precision()))), p);
  });
}

inline ExtReal bessel_i1(const ExtReal& x, double tol) {
  if (x.sign() < 0) throw std::invalid_argument("bessel_i1 needs x >= 0");
  if (x.is_zero()) return ExtReal(precision_for_tolerance(tol));
  return detail::refine(tol, [&](Precision p) {
    return bessel_i1_interval(Interval::point(x.with_precision(std::max(p, x.precision()))), p);
  });
}

/// d/dt I_0(2 sqrt(a t)) by the series sum_{m>=1} a^m t^{m-1} / (m! (m-1)!)
/// and by sqrt(a/t) I_1(2 sqrt(a t)). Throws std::logic_error when the two
/// routes disagree beyond 4 tol.
inline ExtReal d_dt_I0(const ExtReal& a, const ExtReal& t, double tol) {
  if (a.sign() <= 0 || t.sign() <= 0) throw std::invalid_argument("d_dt_I0 needs a > 0 and t > 0");
  const Precision prec = precision_for_tolerance(tol) + 32;
  const ExtReal aa = a.with_precision(std::max(prec, a.precision()));
  const ExtReal tt = t.with_precision(std::max(prec, t.precision()));

  // Route 1: term_m = a^m t^{m-1} / (m! (m-1)!), term_{m+1} = term_m a t / ((m+1) m).
  const ExtReal at = aa * tt;
  ExtReal term = aa;
  ExtReal series = term;
  for (long m = 1;; ++m) {
    term = term * at / ExtReal::from_long((m + 1) * m, prec);
    series = series + term;
    if (m > 4 && term < at && mpfr_cmpabs(term.get(), series.get()) < 0) {
      ExtReal scaled = series;
      mpfr_div_2si(scaled.get(), scaled.get(), static_cast<long>(prec), MPFR_RNDN);
      if (term < scaled) break;
    }
  }

  // Route 2.
  const ExtReal arg = ExtReal::from_long(2, prec) * sqrt(at);
  const ExtReal closed = sqrt(aa / tt) * bessel_i1(arg, tol / 8);

  const double rel = std::fabs((series - closed).to_double()) / closed.to_double();
  if (!(rel <= 4 * tol)) {
    throw std::logic_error("d_dt_I0 routes disagree: relative difference " + std::to_string(rel));
  }
  return series.with_precision(precision_for_tolerance(tol));
}

/// e^x / sqrt(2 pi x).
inline ExtReal i0_leading_asymptotic(const ExtReal& x) {
  if (x.sign() <= 0) throw std::invalid_argument("i0_leading_asymptotic needs x > 0");
  const Precision prec = x.precision();
  return exp(x) / sqrt(ExtReal::from_long(2, prec) * ExtReal::pi(prec) * x);
}

}  // namespace partition_lab::special
