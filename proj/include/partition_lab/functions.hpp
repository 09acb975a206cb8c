#pragma once

// Descriptors of the functions that parameterize the counting families:
//   FunctionSpecH      strictly increasing h with h(0) = 0 (parts are h(1), h(2), ...)
//   FunctionSpecG      integer weight g on positive integers (exponent of (1 - z^n))
//   FunctionSpecGSide  an integrable envelope g_+ >= g(ceil x) or g_- <= g(ceil x)

#include "partition_lab/ext_real.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partition_lab {

/// Input problem reported back to the user with the offending location.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::size_t line, const std::string& what)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses "12", "-3", "1.25", "7/2" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) {
    throw std::invalid_argument("empty number");
  }
  if (text.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) {
      throw std::invalid_argument("bad rational: " + text);
    }
    q.canonicalize();
    return q;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  BigInt numerator = 0;
  BigInt denominator = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch == '.') {
      if (seen_point) throw std::invalid_argument("bad number: " + text);
      seen_point = true;
      continue;
    }
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("bad number: " + text);
    }
    seen_digit = true;
    numerator = numerator * 10 + (ch - '0');
    if (seen_point) denominator *= 10;
  }
  if (!seen_digit) {
    throw std::invalid_argument("bad number: " + text);
  }
  Rational q(negative ? BigInt(-numerator) : numerator, denominator);
  q.canonicalize();
  return q;
}

/// Continuous piecewise-linear function through increasing knots, continued
/// past the last knot with the final segment's slope.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  explicit PiecewiseLinear(std::vector<std::pair<Rational, Rational>> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
      throw std::invalid_argument("piecewise-linear function needs at least two knots");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (knots_[i].first <= knots_[i - 1].first) {
        throw ValidationError(0, "knot abscissae must be strictly increasing");
      }
    }
  }

  const std::vector<std::pair<Rational, Rational>>& knots() const { return knots_; }
  std::size_t segments() const { return knots_.size() - 1; }

  Rational slope(std::size_t segment) const {
    const auto& a = knots_[segment];
    const auto& b = knots_[segment + 1];
    return (b.second - a.second) / (b.first - a.first);
  }
  Rational final_slope() const { return slope(segments() - 1); }

  Rational at(const Rational& x) const {
    std::size_t seg = 0;
    while (seg + 1 < segments() && x > knots_[seg + 1].first) {
      ++seg;
    }
    return knots_[seg].second + slope(seg) * (x - knots_[seg].first);
  }

  double at(double x) const {
    std::size_t seg = 0;
    while (seg + 1 < segments() && x > knots_[seg + 1].first.get_d()) {
      ++seg;
    }
    const double x0 = knots_[seg].first.get_d();
    return knots_[seg].second.get_d() + slope(seg).get_d() * (x - x0);
  }

 private:
  std::vector<std::pair<Rational, Rational>> knots_;
};

class FunctionSpecH {
 public:
  enum class Kind { power, piecewise_linear };

  static FunctionSpecH power(unsigned q) {
    if (q == 0) {
      throw std::invalid_argument("power h needs q >= 1");
    }
    FunctionSpecH h;
    h.kind_ = Kind::power;
    h.q_ = q;
    return h;
  }

  /// Validates h(0) = 0 and strict monotonicity (final slope > 0 included).
  static FunctionSpecH piecewise_linear(std::vector<std::pair<Rational, Rational>> knots) {
    if (knots.empty() || knots.front().first != 0 || knots.front().second != 0) {
      throw ValidationError(1, "first knot must be (0, 0)");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (knots[i].first <= knots[i - 1].first) {
        throw ValidationError(i + 1, "x column must be strictly increasing");
      }
      if (knots[i].second <= knots[i - 1].second) {
        throw ValidationError(i + 1, "h column must be strictly increasing");
      }
    }
    FunctionSpecH h;
    h.kind_ = Kind::piecewise_linear;
    h.curve_ = PiecewiseLinear(std::move(knots));
    return h;
  }

  Kind kind() const { return kind_; }
  unsigned q() const { return q_; }
  const PiecewiseLinear& curve() const { return curve_; }

  std::string describe() const {
    if (kind_ == Kind::power) {
      return "x^" + std::to_string(q_);
    }
    return "piecewise_linear(" + std::to_string(curve_.knots().size()) + " knots)";
  }

  double at(double x) const {
    if (kind_ == Kind::power) {
      return std::pow(x, static_cast<double>(q_));
    }
    return curve_.at(x);
  }

  Rational at(const Rational& x) const {
    if (kind_ == Kind::power) {
      Rational r = 1;
      for (unsigned i = 0; i < q_; ++i) r *= x;
      return r;
    }
    return curve_.at(x);
  }

  /// h(n) at a non-negative integer; throws ValidationError when not integral.
  BigInt at_integer(std::uint64_t n) const {
    const Rational v = at(Rational(BigInt(static_cast<unsigned long>(n))));
    if (v.get_den() != 1) {
      throw ValidationError(0, "h(" + std::to_string(n) + ") = " + v.get_str() + " is not an integer");
    }
    return v.get_num();
  }

  /// Parts h(1) < h(2) < ... that do not exceed `bound`.
  std::vector<std::uint64_t> parts_up_to(std::uint64_t bound) const {
    std::vector<std::uint64_t> parts;
    for (std::uint64_t i = 1;; ++i) {
      const BigInt v = at_integer(i);
      if (v > static_cast<unsigned long>(bound)) break;
      parts.push_back(v.get_ui());
    }
    return parts;
  }

  /// Measure of {y >= 0 : h(y) <= value}, i.e. the inverse function.
  double inverse(double value) const {
    if (value <= 0.0) return 0.0;
    if (kind_ == Kind::power) {
      return std::pow(value, 1.0 / static_cast<double>(q_));
    }
    const auto& knots = curve_.knots();
    for (std::size_t seg = 0; seg < curve_.segments(); ++seg) {
      const double h1 = knots[seg + 1].second.get_d();
      if (value <= h1 || seg + 1 == curve_.segments()) {
        const double x0 = knots[seg].first.get_d();
        const double h0 = knots[seg].second.get_d();
        return x0 + (value - h0) / curve_.slope(seg).get_d();
      }
    }
    return 0.0;
  }

 private:
  FunctionSpecH() = default;

  Kind kind_ = Kind::power;
  unsigned q_ = 1;
  PiecewiseLinear curve_;
};

/// Reads the two-column "x h(x)" table format: blank lines and '#' comments are
/// skipped, the first row must be "0 0", both columns strictly increase, and
/// h must be integral at every integer abscissa up to the last knot.
inline FunctionSpecH parse_h_table(std::istream& in) {
  std::vector<std::pair<Rational, Rational>> knots;
  std::vector<std::size_t> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream fields(raw);
    std::string xs;
    std::string hs;
    std::string extra;
    if (!(fields >> xs)) continue;
    if (!(fields >> hs) || (fields >> extra)) {
      throw ValidationError(line_no, "expected two columns \"x h(x)\"");
    }
    try {
      knots.emplace_back(parse_rational(xs), parse_rational(hs));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(line_no, e.what());
    }
    lines.push_back(line_no);
    const std::size_t i = knots.size() - 1;
    if (i == 0 && (knots[0].first != 0 || knots[0].second != 0)) {
      throw ValidationError(line_no, "first row must be \"0 0\"");
    }
    if (i > 0 && knots[i].first <= knots[i - 1].first) {
      throw ValidationError(line_no, "x column is not strictly increasing");
    }
    if (i > 0 && knots[i].second <= knots[i - 1].second) {
      throw ValidationError(line_no, "h column is not strictly increasing");
    }
  }
  if (knots.size() < 2) {
    throw ValidationError(line_no, "need at least two rows");
  }
  FunctionSpecH h = FunctionSpecH::piecewise_linear(knots);
  // Integer check: every integer abscissa inside segment i is reported on the
  // row that closes that segment.
  for (std::size_t i = 1; i < knots.size(); ++i) {
    BigInt n = knots[i - 1].first.get_num() / knots[i - 1].first.get_den();
    for (; Rational(n) <= knots[i].first; ++n) {
      if (Rational(n) < knots[i - 1].first) continue;
      if (h.at(Rational(n)).get_den() != 1) {
        throw ValidationError(lines[i], "h(" + n.get_str() + ") is not an integer");
      }
    }
  }
  return h;
}

/// Integer weight g on the positive integers. Polynomial weights also carry
/// their coefficients so that envelopes can be derived from them.
class FunctionSpecG {
 public:
  using Fn = std::function<BigInt(std::uint64_t)>;

  FunctionSpecG(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static FunctionSpecG constant(long c) {
    return polynomial({c});
  }

  /// g(n) = c0 + c1 n + c2 n^2 + ...
  static FunctionSpecG polynomial(std::vector<long> coeffs) {
    std::string name = "poly(";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      name += (i ? "," : "") + std::to_string(coeffs[i]);
    }
    name += ")";
    FunctionSpecG g(name, [coeffs](std::uint64_t n) {
      BigInt acc = 0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * static_cast<unsigned long>(n) + *it;
      }
      return acc;
    });
    g.coeffs_ = std::move(coeffs);
    return g;
  }

  /// 1 on perfect q-th powers, 0 elsewhere.
  static FunctionSpecG qth_powers(unsigned q) {
    if (q == 0) throw std::invalid_argument("q must be positive");
    return FunctionSpecG("qth_powers(" + std::to_string(q) + ")", [q](std::uint64_t n) {
      BigInt root;
      const BigInt value(static_cast<unsigned long>(n));
      mpz_root(root.get_mpz_t(), value.get_mpz_t(), q);
      BigInt back;
      mpz_pow_ui(back.get_mpz_t(), root.get_mpz_t(), q);
      return BigInt(back == value ? 1 : 0);
    });
  }

  /// Multiplicity of n in {h(1), h(2), ...}; 0 or 1 since h is strictly increasing.
  static FunctionSpecG image_of(const FunctionSpecH& h, std::uint64_t bound) {
    auto parts = h.parts_up_to(bound);
    return FunctionSpecG("image_of(" + h.describe() + ")", [parts](std::uint64_t n) {
      return BigInt(std::binary_search(parts.begin(), parts.end(), n) ? 1 : 0);
    });
  }

  BigInt operator()(std::uint64_t n) const { return fn_(n); }
  const std::string& name() const { return name_; }
  const std::optional<std::vector<long>>& coefficients() const { return coeffs_; }

 private:
  std::string name_;
  Fn fn_;
  std::optional<std::vector<long>> coeffs_;
};

/// Envelope g_eps of a weight g for one side of the comparison g(ceil x) vs g_eps(x).
class FunctionSpecGSide {
 public:
  enum class Side { plus, minus };
  enum class Envelope { shift_rule, polynomial, user_piecewise_linear };

  /// g_+(x) = g(x + 1) or g_-(x) = g(x - 1); g must be a polynomial weight.
  static FunctionSpecGSide shift_rule(const FunctionSpecG& g, Side side) {
    if (!g.coefficients()) {
      throw std::invalid_argument("shift rule needs a polynomial weight");
    }
    FunctionSpecGSide e(g, side);
    e.envelope_ = Envelope::shift_rule;
    e.poly_ = shift_polynomial(*g.coefficients(), side == Side::plus ? 1 : -1);
    return e;
  }

  /// Envelope given directly as a polynomial with real coefficients.
  static FunctionSpecGSide polynomial(const FunctionSpecG& g, Side side, std::vector<double> coeffs) {
    FunctionSpecGSide e(g, side);
    e.envelope_ = Envelope::polynomial;
    e.poly_ = std::move(coeffs);
    return e;
  }

  static FunctionSpecGSide piecewise(const FunctionSpecG& g, Side side, PiecewiseLinear curve) {
    FunctionSpecGSide e(g, side);
    e.envelope_ = Envelope::user_piecewise_linear;
    e.curve_ = std::move(curve);
    return e;
  }

  const FunctionSpecG& weight() const { return g_; }
  Side side() const { return side_; }
  Envelope envelope() const { return envelope_; }
  bool is_polynomial() const { return envelope_ != Envelope::user_piecewise_linear; }
  const std::vector<double>& polynomial_coefficients() const { return poly_; }
  const PiecewiseLinear& curve() const { return curve_; }

  double at(double x) const {
    if (!is_polynomial()) return curve_.at(x);
    double acc = 0.0;
    for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  /// Integral of the envelope over [0, x].
  double integral(double x) const {
    if (x <= 0.0) return 0.0;
    if (is_polynomial()) {
      double acc = 0.0;
      for (std::size_t j = poly_.size(); j-- > 0;) acc = acc * x + poly_[j] / static_cast<double>(j + 1);
      return acc * x;
    }
    const auto& knots = curve_.knots();
    double total = 0.0;
    for (std::size_t seg = 0;; ++seg) {
      const double x0 = knots[seg].first.get_d();
      const bool last = seg + 1 == curve_.segments();
      const double x1 = last ? x : std::min(x, knots[seg + 1].first.get_d());
      if (x1 > x0) total += 0.5 * (curve_.at(x0) + curve_.at(x1)) * (x1 - x0);
      if (last || x <= knots[seg + 1].first.get_d()) break;
    }
    return total;
  }

  /// Samples the envelope condition (and g_eps >= 0) on a grid of step 1/8
  /// over [0, x_max]; returns the first violating abscissa.
  std::optional<double> find_envelope_violation(double x_max) const {
    for (int i = 0; i <= static_cast<int>(x_max * 8.0); ++i) {
      const double x = i / 8.0;
      const double env = at(x);
      const double g_ceil = g_(static_cast<std::uint64_t>(std::ceil(x))).get_d();
      const bool ok = side_ == Side::plus ? env >= g_ceil : env <= g_ceil;
      if (!ok || env < 0.0) return x;
    }
    return std::nullopt;
  }

  std::string describe() const {
    std::string s = g_.name() + (side_ == Side::plus ? "+" : "-");
    if (!is_polynomial()) return s + "[piecewise]";
    s += "[";
    for (std::size_t i = 0; i < poly_.size(); ++i) {
      std::ostringstream c;
      c << poly_[i];
      s += (i ? "," : "") + c.str();
    }
    return s + "]";
  }

 private:
  FunctionSpecGSide(FunctionSpecG g, Side side) : g_(std::move(g)), side_(side) {}

  static std::vector<double> shift_polynomial(const std::vector<long>& c, long shift) {
    // Coefficients of p(x + shift) via the binomial expansion.
    std::vector<double> out(c.size(), 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      double binom = 1.0;
      double power = 1.0;
      for (std::size_t i = 0; i <= j; ++i) {
        // term C(j, i) shift^(j-i) x^i, walking i downward from j
        const std::size_t deg = j - i;
        out[deg] += static_cast<double>(c[j]) * binom * power;
        binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
        power *= static_cast<double>(shift);
      }
    }
    return out;
  }

  FunctionSpecG g_;
  Side side_;
  Envelope envelope_ = Envelope::shift_rule;
  std::vector<double> poly_;
  PiecewiseLinear curve_;
};

}  // namespace partition_lab
