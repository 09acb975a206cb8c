#pragma once

// Numerical inverse Laplace transforms: the Perron step, inversion of
// exp(lambda(s)) / s^{v+1} for the symbols of Theorems A and B, and the
// Laplace transforms w'_k of the curves h and envelopes g_eps.
//
// Two contours are available. The Talbot contour wraps around the negative
// real axis and converges geometrically, but only for symbols analytic off
// that axis: sums of powers a s^{-u}. Piecewise-linear data introduce delay
// factors e^{-s k h_i}, which explode on the left half-plane, so those
// symbols are inverted on the vertical line Re s = c after subtracting the
// part whose inverse is known in closed form.

#include "partition_lab/complex.hpp"
#include "partition_lab/ext_real.hpp"
#include "partition_lab/functions.hpp"
#include "partition_lab/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace partition_lab::bromwich {

using Complex = std::complex<double>;

/// A contour integral whose error estimate stayed above tolerance.
class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InversionMethod { talbot, truncated_bromwich };

inline std::string to_string(InversionMethod m) {
  return m == InversionMethod::talbot ? "talbot" : "truncated_bromwich";
}

struct ContourSpec {
  InversionMethod method = InversionMethod::talbot;
  double c = 1.0;           // abscissa, or Talbot shift
  double T = 64.0;          // truncation height; initial height for adaptive line inversion
  int nodes = 16;           // initial Talbot node count
  double tol = 1e-8;        // target relative error
  int max_nodes = 2048;     // Talbot node-doubling cap
  double max_height = 4e6;  // line-inversion height cap
  bool auto_abscissa = true;

  void validate() const {
    if (!(c > 0)) throw std::invalid_argument("contour abscissa c must be positive");
    if (nodes < 8) throw std::invalid_argument("contour needs at least 8 nodes");
    if (!(tol > 0 && tol < 1)) throw std::invalid_argument("tolerance must lie in (0, 1)");
    if (method == InversionMethod::truncated_bromwich && T < 2 * c) {
      throw std::invalid_argument("truncation height T must satisfy T >= 2c");
    }
  }
};

struct InversionResult {
  ExtReal value;
  double error_estimate = 0.0;
  InversionMethod method = InversionMethod::talbot;
  int nodes = 0;        // Talbot nodes, or Gauss-Legendre panels on the line
  double height = 0.0;  // final truncation height (line only)
  double abscissa = 0.0;
  Precision precision = 0;
};

// ---------------------------------------------------------------- quadrature

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs n >= 1");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule& gauss16() {
  static const GaussRule rule = gauss_legendre(16);
  return rule;
}

template <class F>
double integrate_panel(F&& f, double a, double b) {
  const GaussRule& g = gauss16();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * f(mid + half * g.nodes[i]);
  return acc * half;
}

// ---------------------------------------------------------------- Perron

struct PerronResult {
  ExtReal value;
  double error_estimate = 0.0;
};

namespace detail {

/// (1/pi) int_0^T (c cos xy + y sin xy) / (c^2 + y^2) dy on panels of the given width.
inline double perron_integral(double x, double c, double height, double width) {
  const auto f = [x, c](double y) { return (c * std::cos(x * y) + y * std::sin(x * y)) / (c * c + y * y); };
  double acc = 0.0;
  for (double a = 0.0; a < height; a += width) acc += integrate_panel(f, a, std::min(a + width, height));
  return acc / std::numbers::pi;
}

}  // namespace detail

/// (1 / 2 pi i) int_{c-iT}^{c+iT} e^{sx} / s ds on the truncated vertical line.
inline PerronResult perron_step(double x, const ContourSpec& spec) {
  ContourSpec line = spec;
  line.method = InversionMethod::truncated_bromwich;
  line.validate();
  const double width = std::min({1.0, spec.c, std::fabs(x) > 0 ? 2.0 * std::numbers::pi / (4.0 * std::fabs(x)) : 1.0});
  const double coarse = detail::perron_integral(x, spec.c, spec.T, width);
  const double fine = detail::perron_integral(x, spec.c, spec.T, width / 2);
  const double scale = std::exp(spec.c * x);
  PerronResult r{ExtReal::from_double(scale * fine), scale * std::fabs(fine - coarse)};
  return r;
}

struct PerronSample {
  double x;
  double T;
  double magnitude;
  double bound_ratio;  // magnitude / e^{cx}
};

struct PerronBoundReport {
  double c = 0.0;
  double fitted_constant = 0.0;
  double allowed_constant = 4.0;
  bool pass = false;
  std::vector<PerronSample> samples;
  std::optional<PerronSample> worst;
};

/// Fits the smallest C with |int| <= C e^{cx} over the grid and checks C <= allowed.
inline PerronBoundReport perron_truncation_bound_check(const std::vector<double>& xs, double c,
                                                       const std::vector<double>& heights,
                                                       double allowed_constant = 4.0) {
  PerronBoundReport report;
  report.c = c;
  report.allowed_constant = allowed_constant;
  for (double height : heights) {
    ContourSpec spec;
    spec.c = c;
    spec.T = height;
    spec.method = InversionMethod::truncated_bromwich;
    for (double x : xs) {
      const PerronResult r = perron_step(x, spec);
      const double magnitude = std::fabs(r.value.to_double());
      const PerronSample s{x, height, magnitude, magnitude / std::exp(c * x)};
      if (!report.worst || s.bound_ratio > report.worst->bound_ratio) report.worst = s;
      report.samples.push_back(s);
    }
  }
  report.fitted_constant = report.worst ? report.worst->bound_ratio : 0.0;
  report.pass = report.fitted_constant <= allowed_constant;
  return report;
}

// ---------------------------------------------------------------- w'_k

namespace detail {

/// (1 - e^{-z}) / z without cancellation for small z.
inline Complex one_minus_exp_over(Complex z) {
  if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
  return (1.0 - std::exp(-z)) / z;
}

inline MpComplex one_minus_exp_over(const MpComplex& z) {
  const MpComplex one = MpComplex::real(ExtReal::from_long(1, z.precision()));
  return (one - exp(-z)) / z;
}

inline double to_d(const Rational& r) { return r.get_d(); }

}  // namespace detail

/// w'_k(s) = int_0^inf e^{-s k h(x)} dx for Re s > 0.
inline Complex w_prime(const FunctionSpecH& h, std::uint64_t k, Complex s) {
  if (!(s.real() > 0)) throw std::invalid_argument("w_prime needs Re s > 0");
  const Complex sigma = static_cast<double>(k) * s;
  if (h.kind() == FunctionSpecH::Kind::power) {
    const double iq = 1.0 / h.q();
    return std::tgamma(1.0 + iq) * std::pow(sigma, -iq);
  }
  const auto& curve = h.curve();
  const auto& knots = curve.knots();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < curve.segments(); ++i) {
    const double m = detail::to_d(curve.slope(i));
    if (!(m > 0)) throw std::invalid_argument("zero-slope segment in h");
    const double delta = detail::to_d(knots[i + 1].first - knots[i].first);
    const double hi = detail::to_d(knots[i].second);
    acc += std::exp(-sigma * hi) * delta * detail::one_minus_exp_over(sigma * m * delta);
  }
  const double m_last = detail::to_d(curve.final_slope());
  acc += std::exp(-sigma * detail::to_d(knots.back().second)) / (sigma * m_last);
  return acc;
}

inline MpComplex w_prime(const FunctionSpecH& h, std::uint64_t k, const MpComplex& s) {
  if (s.re.sign() <= 0) throw std::invalid_argument("w_prime needs Re s > 0");
  const Precision prec = s.precision();
  const MpComplex sigma = s * ExtReal::from_long(static_cast<long>(k), prec);
  if (h.kind() == FunctionSpecH::Kind::power) {
    const Rational iq(1, h.q());
    const ExtReal g = special::gamma_pos(1 + iq, std::ldexp(1.0, -static_cast<int>(prec) + 8));
    return pow(sigma, -ExtReal::from_rational(iq, prec)) * g.with_precision(prec);
  }
  const auto& curve = h.curve();
  const auto& knots = curve.knots();
  MpComplex acc(prec);
  for (std::size_t i = 0; i < curve.segments(); ++i) {
    const ExtReal m = ExtReal::from_rational(curve.slope(i), prec);
    if (m.sign() <= 0) throw std::invalid_argument("zero-slope segment in h");
    const ExtReal delta = ExtReal::from_rational(knots[i + 1].first - knots[i].first, prec);
    const ExtReal hi = ExtReal::from_rational(knots[i].second, prec);
    acc = acc + exp(-(sigma * hi)) * detail::one_minus_exp_over(sigma * (m * delta)) * delta;
  }
  const ExtReal m_last = ExtReal::from_rational(curve.final_slope(), prec);
  const ExtReal h_last = ExtReal::from_rational(knots.back().second, prec);
  return acc + exp(-(sigma * h_last)) / (sigma * m_last);
}

/// w^eps_k(s) = int_0^inf g_eps(x) e^{-s k x} dx for Re s > 0.
inline Complex envelope_transform(const FunctionSpecGSide& g, std::uint64_t k, Complex s) {
  if (!(s.real() > 0)) throw std::invalid_argument("envelope transform needs Re s > 0");
  const Complex sigma = static_cast<double>(k) * s;
  if (g.is_polynomial()) {
    Complex acc = 0.0;
    double factorial = 1.0;
    Complex power = sigma;
    const auto& c = g.polynomial_coefficients();
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j > 0) {
        factorial *= static_cast<double>(j);
        power *= sigma;
      }
      acc += c[j] * factorial / power;
    }
    return acc;
  }
  const auto& curve = g.curve();
  const auto& knots = curve.knots();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < curve.segments(); ++i) {
    const double x0 = detail::to_d(knots[i].first);
    const double delta = detail::to_d(knots[i + 1].first) - x0;
    const double gi = detail::to_d(knots[i].second);
    const double m = detail::to_d(curve.slope(i));
    const Complex e = std::exp(-sigma * delta);
    const Complex q = delta * detail::one_minus_exp_over(sigma * delta);  // (1 - E) / sigma
    acc += std::exp(-sigma * x0) * (gi * q + m * (q - delta * e) / sigma);
  }
  const double x_last = detail::to_d(knots.back().first);
  const double g_last = detail::to_d(knots.back().second);
  const double m_last = detail::to_d(curve.final_slope());
  acc += std::exp(-sigma * x_last) * (g_last / sigma + m_last / (sigma * sigma));
  return acc;
}

// ---------------------------------------------------------------- symbols

/// exp(lambda(s)) / s^{v+1} with lambda(s) = sum_i a_i s^{-u_i}.
struct PowerSum {
  std::function<std::vector<ExtReal>(Precision)> coefficients;
  std::vector<Rational> exponents;
  Rational v = 0;
};

/// The Laplace-domain symbol exp(lambda(s)) / s^{v+1} of an inversion.
class LaplaceSymbol {
 public:
  enum class Kind { explicit_power, theorem_A, theorem_B };

  /// e^{a s^{-u}} / s^{v+1}.
  static LaplaceSymbol explicit_power(const ExtReal& a, const Rational& u, const Rational& v) {
    if (a.sign() < 0) throw std::invalid_argument("explicit power symbol needs a >= 0");
    if (u <= 0 || v < 0) throw std::invalid_argument("explicit power symbol needs u > 0 and v >= 0");
    LaplaceSymbol sym(Kind::explicit_power, 0);
    sym.power_ = PowerSum{[a](Precision p) { return std::vector<ExtReal>{a.with_precision(std::max(p, a.precision()))}; },
                          {u},
                          v};
    sym.alpha_ = u.get_d();
    sym.d_ = a.to_double();
    return sym;
  }

  /// lambda(s) = sum_{k<=N} w'_k(s) / k for the curve h.
  static LaplaceSymbol theorem_A(const FunctionSpecH& h, std::uint64_t n, double c_ref = 1.0) {
    if (n == 0) throw std::invalid_argument("theorem A symbol needs N >= 1");
    LaplaceSymbol sym(Kind::theorem_A, n);
    sym.h_ = h;
    if (h.kind() == FunctionSpecH::Kind::power) {
      // w'_k(s) = k^{-1/q} w'_1(s), so lambda = w'_1(s) zeta_N(1 + 1/q).
      const Rational iq(1, h.q());
      sym.power_ = PowerSum{[h, n, iq](Precision p) {
                              const double tol = std::ldexp(1.0, -static_cast<int>(p) + 8);
                              const ExtReal g = special::gamma_pos(1 + iq, tol);
                              const ExtReal z = special::zeta_trunc(n, 1 + iq, tol);
                              return std::vector<ExtReal>{(g * z).with_precision(p)};
                            },
                            {iq},
                            0};
      sym.alpha_ = iq.get_d();
      sym.d_ = std::tgamma(1.0 + iq.get_d());
    } else {
      sym.alpha_ = 1.0;
      sym.d_ = 1.25 * sym.sup_scaled_transform(c_ref);
    }
    return sym;
  }

  /// lambda(s) = sum_{k<=N} w^eps_k(s) / k for the envelope g_eps.
  static LaplaceSymbol theorem_B(const FunctionSpecGSide& g, std::uint64_t n, double c_ref = 1.0) {
    if (n == 0) throw std::invalid_argument("theorem B symbol needs N >= 1");
    LaplaceSymbol sym(Kind::theorem_B, n);
    sym.g_ = g;
    if (g.is_polynomial()) {
      const auto& c = g.polynomial_coefficients();
      std::vector<std::size_t> degrees;
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] != 0.0) degrees.push_back(j);
      }
      if (degrees.empty()) throw std::invalid_argument("envelope is identically zero");
      std::vector<Rational> exponents;
      for (std::size_t j : degrees) exponents.emplace_back(static_cast<long>(j + 1));
      // w^eps_k = sum_j c_j j! (ks)^{-(j+1)}, so lambda = sum_j c_j j! zeta_N(j+2) s^{-(j+1)}.
      sym.power_ = PowerSum{[c, degrees, n](Precision p) {
                              std::vector<ExtReal> out;
                              for (std::size_t j : degrees) {
                                BigInt f;
                                mpz_fac_ui(f.get_mpz_t(), j);
                                const Interval z = special::zeta_trunc_interval(n, static_cast<long>(j + 2), p);
                                out.push_back(ExtReal::from_double(c[j], p) * ExtReal::from_int(f, p) * z.mid());
                              }
                              return out;
                            },
                            std::move(exponents),
                            0};
      const double alpha = static_cast<double>(degrees.front() + 1);
      double d = 0.0;
      for (std::size_t j : degrees) {
        d += std::fabs(c[j]) * std::tgamma(static_cast<double>(j) + 1.0) * std::pow(c_ref, -(static_cast<double>(j) + 1.0 - alpha));
      }
      sym.alpha_ = alpha;
      sym.d_ = d;
    } else {
      sym.alpha_ = 1.0;
      sym.d_ = 1.25 * sym.sup_scaled_transform(c_ref);
    }
    return sym;
  }

  Kind kind() const { return kind_; }
  std::uint64_t n() const { return n_; }
  double alpha() const { return alpha_; }
  double D() const { return d_; }
  bool talbot_compatible() const { return power_.has_value(); }
  const std::optional<PowerSum>& power_sum() const { return power_; }
  double v() const { return power_ ? power_->v.get_d() : 0.0; }

  /// The k-th transform entering lambda (w'_k, w^eps_k, or a_1 (ks)^{-u} for the explicit kind).
  Complex transform(std::uint64_t k, Complex s) const {
    switch (kind_) {
      case Kind::theorem_A:
        return w_prime(*h_, k, s);
      case Kind::theorem_B:
        return envelope_transform(*g_, k, s);
      case Kind::explicit_power:
        break;
    }
    return d_ * std::pow(static_cast<double>(k) * s, -alpha_);
  }

  Complex lambda(Complex s) const {
    if (power_) {
      const auto coeffs = power_->coefficients(53);
      Complex acc = 0.0;
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        acc += coeffs[i].to_double() * std::pow(s, -power_->exponents[i].get_d());
      }
      return acc;
    }
    Complex acc = 0.0;
    for (std::uint64_t k = 1; k <= n_; ++k) acc += transform(k, s) / static_cast<double>(k);
    return acc;
  }

  /// Inverse transform of (1 + lambda(s)) / s^{v+1} at x > 0.
  double leading_inverse(double x) const {
    if (power_) {
      const auto coeffs = power_->coefficients(53);
      const double v = power_->v.get_d();
      double acc = std::pow(x, v) / std::tgamma(v + 1.0);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double u = power_->exponents[i].get_d();
        acc += coeffs[i].to_double() * std::pow(x, u + v) / std::tgamma(u + v + 1.0);
      }
      return acc;
    }
    // L^{-1}[w'_k / s](x) = h^{-1}(x / k); L^{-1}[w^eps_k / s](x) = int_0^{x/k} g_eps.
    double acc = 1.0;
    for (std::uint64_t k = 1; k <= n_; ++k) {
      const double xk = x / static_cast<double>(k);
      acc += (kind_ == Kind::theorem_A ? h_->inverse(xk) : g_->integral(xk)) / static_cast<double>(k);
    }
    return acc;
  }

  /// Largest k h_i (or k x_i) whose delay factor is not negligible at abscissa c.
  double max_delay_frequency(double c) const {
    std::vector<double> offsets;
    if (kind_ == Kind::theorem_A && h_->kind() == FunctionSpecH::Kind::piecewise_linear) {
      for (const auto& [x, hx] : h_->curve().knots()) offsets.push_back(hx.get_d());
    } else if (kind_ == Kind::theorem_B && !g_->is_polynomial()) {
      for (const auto& [x, gx] : g_->curve().knots()) offsets.push_back(x.get_d());
    }
    double omega = 0.0;
    for (std::uint64_t k = 1; k <= n_; ++k) {
      for (double o : offsets) {
        const double f = static_cast<double>(k) * o;
        if (c * f <= 45.0) omega = std::max(omega, f);
      }
    }
    return omega;
  }

  struct DecayViolation {
    std::uint64_t k;
    Complex s;
    double magnitude;
    double bound;
  };

  /// Samples |transform_k(s)| <= D |k s|^{-alpha} on Re s = c for k <= N.
  std::optional<DecayViolation> verify_decay(double c, int samples = 1000) const {
    const std::uint64_t k_max = std::max<std::uint64_t>(n_, 1);
    for (int i = 0; i < samples; ++i) {
      const double y = i == 0 ? 0.0 : std::pow(10.0, -3.0 + 7.0 * (i - 1) / std::max(1, samples - 2));
      for (int sign : {1, -1}) {
        const Complex s(c, sign * y);
        for (std::uint64_t k = 1; k <= k_max; ++k) {
          const double magnitude = std::abs(transform(k, s));
          const double bound = d_ * std::pow(std::abs(static_cast<double>(k) * s), -alpha_);
          if (magnitude > bound * (1 + 1e-9)) return DecayViolation{k, s, magnitude, bound};
        }
      }
    }
    return std::nullopt;
  }

 private:
  LaplaceSymbol(Kind kind, std::uint64_t n) : kind_(kind), n_(n) {}

  /// sup over sampled s = k (c + iy), k <= N, of |s transform_1(s)|.
  double sup_scaled_transform(double c) const {
    double sup = 0.0;
    for (std::uint64_t k = 1; k <= n_; ++k) {
      for (int i = 0; i < 400; ++i) {
        const double y = i == 0 ? 0.0 : std::pow(10.0, -3.0 + 7.0 * (i - 1) / 398.0);
        const Complex s = static_cast<double>(k) * Complex(c, y);
        sup = std::max(sup, std::abs(s * transform(1, s)));
      }
    }
    return sup;
  }

  Kind kind_;
  std::uint64_t n_;
  double alpha_ = 1.0;
  double d_ = 1.0;
  std::optional<PowerSum> power_;
  std::optional<FunctionSpecH> h_;
  std::optional<FunctionSpecGSide> g_;
};

// ---------------------------------------------------------------- Talbot

namespace detail {

struct TalbotSum {
  ExtReal value;
  double condition;  // max |term| / |value|
};

/// Fixed Talbot rule with M nodes: f(t) ~ (r/M)[e^{ts_0}F(s_0)/2 + sum_k Re(e^{ts_k}F(s_k)(1 + i sigma_k))],
/// s(theta) = c + r theta (cot theta + i), sigma(theta) = theta + (theta cot theta - 1) cot theta, r = 2M/(5t).
inline TalbotSum talbot_sum(const PowerSum& ps, double t, int m, double shift, Precision prec) {
  const std::vector<ExtReal> coeffs = ps.coefficients(prec);
  std::vector<ExtReal> exps;
  for (const auto& u : ps.exponents) exps.push_back(ExtReal::from_rational(u, prec));
  const ExtReal v1 = ExtReal::from_rational(ps.v + 1, prec);
  const ExtReal tt = ExtReal::from_double(t, prec);
  const ExtReal r = ExtReal::from_long(2 * m, prec) / (ExtReal::from_long(5, prec) * tt);
  const ExtReal c = ExtReal::from_double(shift, prec);
  const ExtReal pi = ExtReal::pi(prec);
  const ExtReal one = ExtReal::from_long(1, prec);

  // log(e^{ts} F(s)) = t s + sum_i a_i e^{-u_i log s} - (v+1) log s
  auto log_integrand = [&](const MpComplex& s) {
    const MpComplex ls = log(s);
    MpComplex acc = s * tt - ls * v1;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc = acc + exp(-(ls * exps[i])) * coeffs[i];
    return acc;
  };

  ExtReal sum(prec);
  ExtReal max_term(prec);
  {
    const MpComplex s0 = MpComplex::real(c + r);
    ExtReal term = exp(log_integrand(s0)).re;
    mpfr_div_2ui(term.get(), term.get(), 1, MPFR_RNDN);
    sum = term;
    max_term = abs(term);
  }
  for (int k = 1; k < m; ++k) {
    const ExtReal theta = pi * ExtReal::from_long(k, prec) / ExtReal::from_long(m, prec);
    ExtReal cot(prec);
    mpfr_cot(cot.get(), theta.get(), MPFR_RNDN);
    const MpComplex s{c + r * theta * cot, r * theta};
    const ExtReal sigma = theta + (theta * cot - one) * cot;
    const MpComplex w = exp(log_integrand(s));
    const ExtReal term = w.re - w.im * sigma;  // Re(w (1 + i sigma))
    sum = sum + term;
    const ExtReal a = abs(term);
    if (a > max_term) max_term = a;
  }
  const ExtReal value = sum * r / ExtReal::from_long(m, prec);
  const ExtReal scaled_max = max_term * r / ExtReal::from_long(m, prec);
  const double cond = value.is_zero() ? 1e300 : std::exp(scaled_max.log_abs() - value.log_abs());
  return {value, cond};
}

inline InversionResult talbot_invert(const PowerSum& ps, double t, const ContourSpec& spec) {
  int m = spec.nodes;
  std::optional<ExtReal> previous;
  Precision extra = 0;
  while (true) {
    if (m > spec.max_nodes) {
      throw QuadratureFailure("Talbot inversion at t = " + std::to_string(t) + " did not reach tolerance " +
                              std::to_string(spec.tol) + " within " + std::to_string(spec.max_nodes) + " nodes");
    }
    const Precision prec =
        std::min<Precision>(kMaxPrecision, precision_for_tolerance(spec.tol) + (6 * m) / 10 + extra);
    const TalbotSum est = talbot_sum(ps, t, m, spec.c, prec);
    const double lost_bits = std::log2(std::max(est.condition, 1.0));
    if (lost_bits + std::log2(1.0 / spec.tol) + 16 > static_cast<double>(prec) && prec < kMaxPrecision) {
      extra += static_cast<Precision>(lost_bits) + 32;
      continue;
    }
    if (previous) {
      const double err = std::fabs((est.value - *previous).to_double());
      const double mag = std::fabs(est.value.to_double());
      if (err <= spec.tol * mag) {
        InversionResult res;
        res.value = est.value;
        res.error_estimate = err;
        res.method = InversionMethod::talbot;
        res.nodes = m;
        res.abscissa = spec.c;
        res.precision = prec;
        return res;
      }
    }
    previous = est.value;
    m *= 2;
  }
}

// ---------------------------------------------------------------- vertical line

/// c > 0 minimizing c x + lambda(c) - (v+1) log c, the log-size of the integrand.
inline double saddle_abscissa(const LaplaceSymbol& sym, double x) {
  const double v1 = sym.v() + 1.0;
  auto cost = [&](double lc) {
    const double c = std::exp(lc);
    return c * x + sym.lambda(Complex(c, 0.0)).real() - v1 * lc;
  };
  double a = std::log(1e-3);
  double b = std::log(50.0);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = cost(x1);
  double f2 = cost(x2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = cost(x2);
    }
  }
  return std::exp(0.5 * (a + b));
}

/// (e^lambda - 1 - lambda) without cancellation for small lambda.
inline Complex expm1_minus(Complex l) {
  if (std::abs(l) < 1e-2) {
    const Complex l2 = l * l;
    return l2 / 2.0 + l2 * l / 6.0 + l2 * l2 / 24.0 + l2 * l2 * l / 120.0;
  }
  return std::exp(l) - 1.0 - l;
}

inline InversionResult line_invert(const LaplaceSymbol& sym, double x, const ContourSpec& spec) {
  const double c = spec.auto_abscissa ? saddle_abscissa(sym, x) : spec.c;
  const double v1 = sym.v() + 1.0;
  const double omega = sym.max_delay_frequency(c);
  const double osc_width = 2.0 * std::numbers::pi / (x + omega + 1.0);

  auto remainder = [&](double y) {
    const Complex s(c, y);
    return expm1_minus(sym.lambda(s)) * std::pow(s, -v1);
  };
  auto signed_part = [&](double y) { return (remainder(y) * std::exp(Complex(0.0, x * y))).real(); };
  auto abs_part = [&](double y) { return std::abs(remainder(y)); };

  int panels = 0;
  auto integrate = [&](double from, double to, double& signed_acc, double& abs_acc) {
    double y = from;
    while (y < to) {
      const double width = std::min(osc_width, 0.2 * std::hypot(c, y) + 1e-3);
      const double next = std::min(to, y + width);
      signed_acc += integrate_panel(signed_part, y, next);
      abs_acc += integrate_panel(abs_part, y, next);
      y = next;
      ++panels;
    }
  };

  const double scale = std::exp(c * x) / std::numbers::pi;
  const double leading = sym.leading_inverse(x);
  double total = 0.0;
  double abs_total = 0.0;
  double height = std::max(spec.T, 2.0 * c);
  integrate(0.0, height, total, abs_total);
  double previous_chunk = -1.0;
  while (true) {
    double chunk = 0.0;
    double abs_chunk = 0.0;
    integrate(height, 2.0 * height, chunk, abs_chunk);
    total += chunk;
    height *= 2.0;
    // |R| ~ y^{-p}: chunk(Y) / chunk(2Y) = 2^{p-1}, tail beyond 2Y = chunk / (2^{p-1} - 1).
    double decay = 2.0;
    if (previous_chunk > 0 && abs_chunk > 0) decay = std::max(previous_chunk / abs_chunk, std::pow(2.0, 0.1));
    const double tail = scale * abs_chunk / (decay - 1.0);
    const double value = leading + scale * total;
    if (previous_chunk > 0 && tail <= spec.tol * std::fabs(value)) {
      InversionResult res;
      res.value = ExtReal::from_double(value);
      res.error_estimate = tail;
      res.method = InversionMethod::truncated_bromwich;
      res.nodes = panels;
      res.height = height;
      res.abscissa = c;
      res.precision = 53;
      return res;
    }
    if (2.0 * height > spec.max_height) {
      throw QuadratureFailure("line inversion at x = " + std::to_string(x) + " did not reach tolerance " +
                              std::to_string(spec.tol) + " below height " + std::to_string(spec.max_height) +
                              " (tail estimate " + std::to_string(tail / std::fabs(value)) + ")");
    }
    previous_chunk = abs_chunk;
  }
}

/// The symbol must satisfy F(conj s) = conj F(s) for the result to be real.
inline void check_conjugate_symmetry(const LaplaceSymbol& sym, double c) {
  for (double y : {0.7, 3.1, 41.0}) {
    const Complex a = sym.lambda(Complex(c, y));
    const Complex b = sym.lambda(Complex(c, -y));
    if (std::abs(a - std::conj(b)) > 1e-10 * (1.0 + std::abs(a))) {
      throw QuadratureFailure("symbol is not conjugate-symmetric; imaginary residue at y = " + std::to_string(y));
    }
  }
}

}  // namespace detail

/// (1/2 pi i) int exp(lambda(s)) e^{xs} / s^{v+1} ds at x > 0. Talbot is used
/// when requested and the symbol allows it; otherwise the vertical line.
inline InversionResult invert(const LaplaceSymbol& sym, double x, const ContourSpec& spec) {
  spec.validate();
  if (!(x > 0)) throw std::invalid_argument("inversion needs x > 0");
  detail::check_conjugate_symmetry(sym, spec.c);
  if (spec.method == InversionMethod::talbot && sym.talbot_compatible()) {
    return detail::talbot_invert(*sym.power_sum(), x, spec);
  }
  return detail::line_invert(sym, x, spec);
}

/// (1/2 pi i) int e^{a s^{-u}} s^{-(v+1)} e^{ts} ds; equals psi^v_u(a t^u) t^v.
inline InversionResult invert_power_symbol(const ExtReal& a, const Rational& u, const Rational& v, double t,
                                           const ContourSpec& spec) {
  if (!(a.sign() > 0)) throw std::invalid_argument("invert_power_symbol needs a > 0");
  return invert(LaplaceSymbol::explicit_power(a, u, v), t, spec);
}

/// phi_h(x) = (1/2 pi i) int exp(lambda(s)) e^{xs} / s ds with lambda = sum_{k<=N} w'_k / k.
inline InversionResult phi_h(const FunctionSpecH& h, std::uint64_t n, double x, const ContourSpec& spec) {
  const LaplaceSymbol sym = LaplaceSymbol::theorem_A(h, n, spec.c);
  if (auto bad = sym.verify_decay(spec.c, 200)) {
    throw QuadratureFailure("decay hypothesis fails for " + h.describe() + " at k = " + std::to_string(bad->k));
  }
  return invert(sym, x, spec);
}

/// phi^{g_eps}(x) with lambda = sum_{k<=N} w^eps_k / k.
inline InversionResult phi_g(const FunctionSpecGSide& g, std::uint64_t n, double x, const ContourSpec& spec) {
  if (auto at = g.find_envelope_violation(std::max(x, 1.0))) {
    throw std::invalid_argument("envelope " + g.describe() + " violates its side condition at x = " +
                                std::to_string(*at));
  }
  const LaplaceSymbol sym = LaplaceSymbol::theorem_B(g, n, spec.c);
  if (auto bad = sym.verify_decay(spec.c, 200)) {
    throw QuadratureFailure("decay hypothesis fails for " + g.describe() + " at k = " + std::to_string(bad->k));
  }
  return invert(sym, x, spec);
}

}  // namespace partition_lab::bromwich
