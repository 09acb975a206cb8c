#pragma once

// Extended-precision real numbers (MPFR-backed) and outward-rounded intervals.
//
// ExtReal is a value type: copies carry their own precision, and every
// arithmetic result is rounded once at max(operand precisions). Interval keeps
// a lower and an upper ExtReal computed with directed rounding, so an interval
// result always encloses the exact real value of the expression.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace partition_lab {

using BigInt = mpz_class;
using Rational = mpq_class;
using Precision = mpfr_prec_t;

inline constexpr Precision kDefaultPrecision = 128;
inline constexpr Precision kMaxPrecision = 4096;

enum class Round { nearest, down, up };

inline mpfr_rnd_t to_mpfr(Round r) {
  switch (r) {
    case Round::down:
      return MPFR_RNDD;
    case Round::up:
      return MPFR_RNDU;
    case Round::nearest:
      break;
  }
  return MPFR_RNDN;
}

/// Default working precision in bits. PARTITION_LAB_PRECISION overrides it.
inline Precision default_precision() {
  if (const char* env = std::getenv("PARTITION_LAB_PRECISION")) {
    char* end = nullptr;
    const long bits = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && bits >= 32 && bits <= kMaxPrecision) {
      return static_cast<Precision>(bits);
    }
  }
  return kDefaultPrecision;
}

/// Bits needed to hit relative tolerance `tol`, plus 64 guard bits.
inline Precision precision_for_tolerance(double tol) {
  if (!(tol > 0.0) || tol >= 1.0) {
    throw std::invalid_argument("tolerance must lie in (0, 1)");
  }
  const auto bits = static_cast<Precision>(std::ceil(-std::log2(tol))) + 64;
  return std::clamp<Precision>(bits, 64, kMaxPrecision);
}

class ExtReal {
 public:
  ExtReal() : ExtReal(default_precision()) {}

  explicit ExtReal(Precision prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }

  ExtReal(const ExtReal& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  ExtReal(ExtReal&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }

  ExtReal& operator=(const ExtReal& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }

  ExtReal& operator=(ExtReal&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }

  ~ExtReal() { mpfr_clear(v_); }

  static ExtReal from_double(double d, Precision prec = default_precision()) {
    ExtReal r(prec);
    mpfr_set_d(r.v_, d, MPFR_RNDN);
    return r;
  }

  static ExtReal from_long(long v, Precision prec = default_precision(),
                           Round rnd = Round::nearest) {
    ExtReal r(prec);
    mpfr_set_si(r.v_, v, to_mpfr(rnd));
    return r;
  }

  static ExtReal from_int(const BigInt& v, Precision prec = default_precision(),
                          Round rnd = Round::nearest) {
    ExtReal r(prec);
    mpfr_set_z(r.v_, v.get_mpz_t(), to_mpfr(rnd));
    return r;
  }

  static ExtReal from_rational(const Rational& v, Precision prec = default_precision(),
                               Round rnd = Round::nearest) {
    ExtReal r(prec);
    mpfr_set_q(r.v_, v.get_mpq_t(), to_mpfr(rnd));
    return r;
  }

  /// Parses a decimal literal such as "1.5e-3".
  static ExtReal from_string(const std::string& text, Precision prec = default_precision(),
                             Round rnd = Round::nearest) {
    ExtReal r(prec);
    if (mpfr_set_str(r.v_, text.c_str(), 10, to_mpfr(rnd)) != 0) {
      throw std::invalid_argument("not a decimal number: " + text);
    }
    return r;
  }

  static ExtReal pi(Precision prec = default_precision(), Round rnd = Round::nearest) {
    ExtReal r(prec);
    mpfr_const_pi(r.v_, to_mpfr(rnd));
    return r;
  }

  static ExtReal infinity(int sign = 1, Precision prec = default_precision()) {
    ExtReal r(prec);
    mpfr_set_inf(r.v_, sign);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  Precision precision() const { return mpfr_get_prec(v_); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Base-2 exponent e with 2^(e-1) <= |x| < 2^e; 0 for zero.
  long binary_exponent() const { return mpfr_regular_p(v_) ? mpfr_get_exp(v_) : 0; }

  /// Natural log of |x| as a double; works far outside the double range.
  double log_abs() const {
    if (!mpfr_regular_p(v_)) {
      return is_zero() ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
    }
    long exp = 0;
    const double m = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
    return std::log(std::fabs(m)) + static_cast<double>(exp) * std::log(2.0);
  }

  /// Exact (mantissa, exponent) with value = mantissa * 2^exponent.
  std::pair<BigInt, long> mantissa_exponent() const {
    if (!mpfr_number_p(v_)) {
      throw std::domain_error("mantissa_exponent of a non-finite value");
    }
    BigInt m;
    if (is_zero()) {
      return {m, 0};
    }
    const long e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    return {m, e};
  }

  ExtReal with_precision(Precision prec, Round rnd = Round::nearest) const {
    ExtReal r(prec);
    mpfr_set(r.v_, v_, to_mpfr(rnd));
    return r;
  }

  /// Largest integer <= x.
  BigInt floor() const {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
  }

  /// Scientific rendering with `digits` significant digits, lowercase 'e', no
  /// '+' and no exponent padding: "2.27958530234e0", "-1.25000000000e-3".
  std::string to_scientific(int digits = 12) const {
    if (is_nan()) {
      return "nan";
    }
    if (mpfr_inf_p(v_)) {
      return sign() < 0 ? "-inf" : "inf";
    }
    if (is_zero()) {
      return "0." + std::string(static_cast<std::size_t>(std::max(digits - 1, 0)), '0') + "e0";
    }
    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits), v_, MPFR_RNDN);
    std::string body(raw);
    mpfr_free_str(raw);
    std::string out;
    if (!body.empty() && body[0] == '-') {
      out.push_back('-');
      body.erase(0, 1);
    }
    out.push_back(body[0]);
    if (body.size() > 1) {
      out.push_back('.');
      out.append(body, 1, std::string::npos);
    }
    out.push_back('e');
    out += std::to_string(static_cast<long>(exp10) - 1);
    return out;
  }

 private:
  mpfr_t v_;
};

namespace detail {

inline Precision joint(const ExtReal& a, const ExtReal& b) {
  return std::max(a.precision(), b.precision());
}

template <class Op>
ExtReal binary(const ExtReal& a, const ExtReal& b, Op op, Round rnd) {
  ExtReal r(joint(a, b));
  op(r.get(), a.get(), b.get(), to_mpfr(rnd));
  return r;
}

template <class Op>
ExtReal unary(const ExtReal& a, Op op, Round rnd) {
  ExtReal r(a.precision());
  op(r.get(), a.get(), to_mpfr(rnd));
  return r;
}

}  // namespace detail

// Rounded arithmetic with an explicit rounding direction.
inline ExtReal add(const ExtReal& a, const ExtReal& b, Round r = Round::nearest) {
  return detail::binary(a, b, mpfr_add, r);
}
inline ExtReal sub(const ExtReal& a, const ExtReal& b, Round r = Round::nearest) {
  return detail::binary(a, b, mpfr_sub, r);
}
inline ExtReal mul(const ExtReal& a, const ExtReal& b, Round r = Round::nearest) {
  return detail::binary(a, b, mpfr_mul, r);
}
inline ExtReal div(const ExtReal& a, const ExtReal& b, Round r = Round::nearest) {
  return detail::binary(a, b, mpfr_div, r);
}
inline ExtReal pow(const ExtReal& a, const ExtReal& b, Round r = Round::nearest) {
  return detail::binary(a, b, mpfr_pow, r);
}
inline ExtReal exp(const ExtReal& a, Round r = Round::nearest) {
  return detail::unary(a, mpfr_exp, r);
}
inline ExtReal log(const ExtReal& a, Round r = Round::nearest) {
  return detail::unary(a, mpfr_log, r);
}
inline ExtReal sqrt(const ExtReal& a, Round r = Round::nearest) {
  return detail::unary(a, mpfr_sqrt, r);
}
inline ExtReal abs(const ExtReal& a) { return detail::unary(a, mpfr_abs, Round::nearest); }

inline ExtReal operator+(const ExtReal& a, const ExtReal& b) { return add(a, b); }
inline ExtReal operator-(const ExtReal& a, const ExtReal& b) { return sub(a, b); }
inline ExtReal operator*(const ExtReal& a, const ExtReal& b) { return mul(a, b); }
inline ExtReal operator/(const ExtReal& a, const ExtReal& b) { return div(a, b); }
inline ExtReal operator-(const ExtReal& a) { return detail::unary(a, mpfr_neg, Round::nearest); }

inline int compare(const ExtReal& a, const ExtReal& b) { return mpfr_cmp(a.get(), b.get()); }
inline int compare(const ExtReal& a, const BigInt& b) { return mpfr_cmp_z(a.get(), b.get_mpz_t()); }

inline bool operator<(const ExtReal& a, const ExtReal& b) { return mpfr_less_p(a.get(), b.get()); }
inline bool operator>(const ExtReal& a, const ExtReal& b) { return mpfr_greater_p(a.get(), b.get()); }
inline bool operator<=(const ExtReal& a, const ExtReal& b) { return mpfr_lessequal_p(a.get(), b.get()); }
inline bool operator>=(const ExtReal& a, const ExtReal& b) { return mpfr_greaterequal_p(a.get(), b.get()); }
inline bool operator==(const ExtReal& a, const ExtReal& b) { return mpfr_equal_p(a.get(), b.get()); }

/// One unit in the last place of x at its own precision.
inline ExtReal ulp(const ExtReal& x) {
  ExtReal r(x.precision());
  if (x.is_zero() || !x.is_finite()) {
    mpfr_set_ui_2exp(r.get(), 1, mpfr_get_emin(), MPFR_RNDN);
    return r;
  }
  mpfr_set_ui_2exp(r.get(), 1, x.binary_exponent() - x.precision(), MPFR_RNDN);
  return r;
}

/// Closed interval [lo, hi] whose endpoints come from outward rounding.
class Interval {
 public:
  Interval() : lo_(), hi_() {}
  Interval(ExtReal lo, ExtReal hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ > hi_) {
      throw std::logic_error("interval with lo > hi");
    }
  }

  static Interval point(const ExtReal& x) { return {x, x}; }

  static Interval from_long(long v, Precision prec = default_precision()) {
    return {ExtReal::from_long(v, prec, Round::down), ExtReal::from_long(v, prec, Round::up)};
  }
  static Interval from_int(const BigInt& v, Precision prec = default_precision()) {
    return {ExtReal::from_int(v, prec, Round::down), ExtReal::from_int(v, prec, Round::up)};
  }
  static Interval from_rational(const Rational& v, Precision prec = default_precision()) {
    return {ExtReal::from_rational(v, prec, Round::down),
            ExtReal::from_rational(v, prec, Round::up)};
  }
  static Interval pi(Precision prec = default_precision()) {
    return {ExtReal::pi(prec, Round::down), ExtReal::pi(prec, Round::up)};
  }

  const ExtReal& lo() const { return lo_; }
  const ExtReal& hi() const { return hi_; }
  Precision precision() const { return std::max(lo_.precision(), hi_.precision()); }

  /// Midpoint rounded to nearest.
  ExtReal mid() const {
    ExtReal s = add(lo_, hi_);
    mpfr_div_2ui(s.get(), s.get(), 1, MPFR_RNDN);
    return s;
  }

  /// (hi - lo) / |mid| as a double; infinity if mid is zero and width is not.
  double relative_width() const {
    const ExtReal w = sub(hi_, lo_, Round::up);
    if (w.is_zero()) {
      return 0.0;
    }
    const ExtReal m = abs(mid());
    if (m.is_zero()) {
      return std::numeric_limits<double>::infinity();
    }
    return div(w, m).to_double();
  }

  bool contains(const BigInt& x) const { return compare(lo_, x) <= 0 && compare(hi_, x) >= 0; }
  bool contains(const ExtReal& x) const { return lo_ <= x && x <= hi_; }
  bool overlaps(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
  bool nonnegative() const { return lo_.sign() >= 0; }
  bool positive() const { return lo_.sign() > 0; }

 private:
  ExtReal lo_;
  ExtReal hi_;
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return {add(a.lo(), b.lo(), Round::down), add(a.hi(), b.hi(), Round::up)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return {sub(a.lo(), b.hi(), Round::down), sub(a.hi(), b.lo(), Round::up)};
}

inline Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  if (a.nonnegative() && b.nonnegative()) {
    return {mul(a.lo(), b.lo(), Round::down), mul(a.hi(), b.hi(), Round::up)};
  }
  const ExtReal* xs[2] = {&a.lo(), &a.hi()};
  const ExtReal* ys[2] = {&b.lo(), &b.hi()};
  ExtReal lo = mul(*xs[0], *ys[0], Round::down);
  ExtReal hi = mul(*xs[0], *ys[0], Round::up);
  for (const ExtReal* x : xs) {
    for (const ExtReal* y : ys) {
      ExtReal d = mul(*x, *y, Round::down);
      ExtReal u = mul(*x, *y, Round::up);
      if (d < lo) lo = std::move(d);
      if (u > hi) hi = std::move(u);
    }
  }
  return {std::move(lo), std::move(hi)};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo().sign() <= 0 && b.hi().sign() >= 0) {
    throw std::domain_error("interval division by an interval containing zero");
  }
  if (a.nonnegative() && b.positive()) {
    return {div(a.lo(), b.hi(), Round::down), div(a.hi(), b.lo(), Round::up)};
  }
  const ExtReal* xs[2] = {&a.lo(), &a.hi()};
  const ExtReal* ys[2] = {&b.lo(), &b.hi()};
  ExtReal lo = div(*xs[0], *ys[0], Round::down);
  ExtReal hi = div(*xs[0], *ys[0], Round::up);
  for (const ExtReal* x : xs) {
    for (const ExtReal* y : ys) {
      ExtReal d = div(*x, *y, Round::down);
      ExtReal u = div(*x, *y, Round::up);
      if (d < lo) lo = std::move(d);
      if (u > hi) hi = std::move(u);
    }
  }
  return {std::move(lo), std::move(hi)};
}

inline Interval exp(const Interval& a) { return {exp(a.lo(), Round::down), exp(a.hi(), Round::up)}; }

inline Interval log(const Interval& a) {
  if (!a.positive()) {
    throw std::domain_error("log of an interval that is not positive");
  }
  return {log(a.lo(), Round::down), log(a.hi(), Round::up)};
}

inline Interval sqrt(const Interval& a) {
  if (a.hi().sign() < 0) {
    throw std::domain_error("sqrt of a negative interval");
  }
  ExtReal lo = a.lo().sign() < 0 ? ExtReal(a.precision()) : sqrt(a.lo(), Round::down);
  return {std::move(lo), sqrt(a.hi(), Round::up)};
}

/// base^exponent for a positive base interval. The power is monotone in each
/// argument separately, so the extremes sit on the four corners.
inline Interval pow(const Interval& base, const Interval& exponent) {
  if (!base.positive()) {
    throw std::domain_error("pow requires a positive base interval");
  }
  const ExtReal* bs[2] = {&base.lo(), &base.hi()};
  const ExtReal* es[2] = {&exponent.lo(), &exponent.hi()};
  ExtReal lo = pow(*bs[0], *es[0], Round::down);
  ExtReal hi = pow(*bs[0], *es[0], Round::up);
  for (const ExtReal* b : bs) {
    for (const ExtReal* e : es) {
      ExtReal d = pow(*b, *e, Round::down);
      ExtReal u = pow(*b, *e, Round::up);
      if (d < lo) lo = std::move(d);
      if (u > hi) hi = std::move(u);
    }
  }
  return {std::move(lo), std::move(hi)};
}

}  // namespace partition_lab
