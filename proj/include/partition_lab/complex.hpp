#pragma once

// Minimal extended-precision complex arithmetic on top of ExtReal.

#include "partition_lab/ext_real.hpp"

namespace partition_lab {

struct MpComplex {
  ExtReal re;
  ExtReal im;

  MpComplex() = default;
  explicit MpComplex(Precision prec) : re(prec), im(prec) {}
  MpComplex(ExtReal r, ExtReal i) : re(std::move(r)), im(std::move(i)) {}

  static MpComplex real(const ExtReal& r) { return {r, ExtReal(r.precision())}; }

  Precision precision() const { return std::max(re.precision(), im.precision()); }
  MpComplex conj() const { return {re, -im}; }
};

inline MpComplex operator+(const MpComplex& a, const MpComplex& b) { return {a.re + b.re, a.im + b.im}; }
inline MpComplex operator-(const MpComplex& a, const MpComplex& b) { return {a.re - b.re, a.im - b.im}; }
inline MpComplex operator-(const MpComplex& a) { return {-a.re, -a.im}; }

inline MpComplex operator*(const MpComplex& a, const MpComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline MpComplex operator*(const MpComplex& a, const ExtReal& k) { return {a.re * k, a.im * k}; }

inline MpComplex operator/(const MpComplex& a, const MpComplex& b) {
  const ExtReal den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

inline MpComplex operator/(const MpComplex& a, const ExtReal& k) { return {a.re / k, a.im / k}; }

inline ExtReal abs(const MpComplex& z) {
  ExtReal r(z.precision());
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}

inline ExtReal arg(const MpComplex& z) {
  ExtReal r(z.precision());
  mpfr_atan2(r.get(), z.im.get(), z.re.get(), MPFR_RNDN);
  return r;
}

inline MpComplex exp(const MpComplex& z) {
  const Precision prec = z.precision();
  const ExtReal m = exp(z.re);
  ExtReal s(prec);
  ExtReal c(prec);
  mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
  return {m * c, m * s};
}

/// Principal branch.
inline MpComplex log(const MpComplex& z) { return {log(abs(z)), arg(z)}; }

/// z^e on the principal branch for real e.
inline MpComplex pow(const MpComplex& z, const ExtReal& e) { return exp(log(z) * e); }

}  // namespace partition_lab
