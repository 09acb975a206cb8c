#include "partition_lab/bromwich.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace partition_lab;
using namespace partition_lab::bromwich;

namespace {

using oracle::gamma_string;
using oracle::times;
using oracle::z_string;

double rel(const ExtReal& value, const std::string& reference) {
  return oracle::relative_error(value.to_scientific(30), reference);
}

ContourSpec talbot_spec(double tol = 1e-9) {
  ContourSpec s;
  s.tol = tol;
  return s;
}

ContourSpec line_spec(double tol = 1e-9) {
  ContourSpec s;
  s.method = InversionMethod::truncated_bromwich;
  s.tol = tol;
  return s;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussRule g = gauss_legendre(16);
  for (int deg = 0; deg <= 31; ++deg) {
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += g.weights[i] * std::pow(g.nodes[i], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    EXPECT_NEAR(acc, exact, 1e-14) << deg;
  }
}

TEST(ContourSpecTest, Validation) {
  ContourSpec s = line_spec();
  s.c = 1.0;
  s.T = 2.0;
  EXPECT_NO_THROW(s.validate());
  s.T = 1.999;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.T = 10;
  s.c = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.c = 1;
  s.nodes = 7;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(PerronStep, Examples) {
  ContourSpec s = line_spec();
  s.c = 1.0;
  s.T = 1e3;
  EXPECT_NEAR(perron_step(1.0, s).value.to_double(), 1.0, 0.05);
  EXPECT_NEAR(perron_step(-1.0, s).value.to_double(), 0.0, 0.05);
  for (double c : {0.5, 1.0, 3.0}) {
    s.c = c;
    EXPECT_NEAR(perron_step(0.0, s).value.to_double(), 0.5, 0.05) << c;
  }
  s.c = 1.0;
  s.T = 1.5;
  EXPECT_THROW(perron_step(1.0, s), std::invalid_argument);
  s.T = 2.0;
  EXPECT_NO_THROW(perron_step(1.0, s));
}

TEST(PerronStep, ErrorEstimateIsSmall) {
  ContourSpec s = line_spec();
  s.T = 1e3;
  for (double x : {-2.0, 0.5, 3.0}) EXPECT_LT(perron_step(x, s).error_estimate, 1e-6) << x;
}

TEST(PerronStep, TruncationBound) {
  std::vector<double> xs;
  for (int x = -5; x <= 5; ++x) xs.push_back(x);
  const auto report = perron_truncation_bound_check(xs, 1.0, {2.0, 10.0, 100.0});
  EXPECT_TRUE(report.pass) << report.fitted_constant;
  EXPECT_LE(report.fitted_constant, 4.0);
  EXPECT_EQ(report.samples.size(), 33u);
  ASSERT_TRUE(report.worst.has_value());

  const auto far = perron_truncation_bound_check({-10.0}, 1.0, {2.0, 10.0, 100.0, 1000.0});
  EXPECT_LE(far.fitted_constant, 4.0);
  for (const auto& sample : far.samples) EXPECT_LE(sample.magnitude, 4.0 * std::exp(-10.0));
}

TEST(PerronStep, ViolationReportsOffendingPoint) {
  const auto report = perron_truncation_bound_check({-3.0, 0.0, 2.0}, 1.0, {2.0, 50.0}, 1e-6);
  EXPECT_FALSE(report.pass);
  ASSERT_TRUE(report.worst.has_value());
  EXPECT_GT(report.worst->bound_ratio, 1e-6);
}

TEST(InvertPowerSymbol, Examples) {
  const ContourSpec s = talbot_spec();
  const auto i0 = invert_power_symbol(ExtReal::from_long(1), 1, 0, 1.0, s);
  EXPECT_LT(rel(i0.value, "2.2795853023360672674372044408115"), 1e-8);
  EXPECT_EQ(i0.method, InversionMethod::talbot);

  const auto psi2 = invert_power_symbol(ExtReal::from_long(1), 2, 0, 1.0, s);
  EXPECT_LT(rel(psi2.value, oracle::wright_psi(2, 1, 0, "1")), 1e-8);

  const auto tiny = invert_power_symbol(ExtReal::from_double(1e-8), 1, 0, 1.0, s);
  EXPECT_NEAR(tiny.value.to_double(), 1.0, 1e-6);

  EXPECT_THROW(invert_power_symbol(ExtReal::from_long(0), 1, 0, 1.0, s), std::invalid_argument);
  EXPECT_THROW(invert_power_symbol(ExtReal::from_long(1), 0, 0, 1.0, s), std::invalid_argument);
  EXPECT_THROW(invert_power_symbol(ExtReal::from_long(1), 1, -1, 1.0, s), std::invalid_argument);
  EXPECT_THROW(invert_power_symbol(ExtReal::from_long(1), 1, 0, 0.0, s), std::invalid_argument);
}

TEST(InvertPowerSymbol, NodeCapIsReported) {
  ContourSpec s = talbot_spec(1e-30);
  s.nodes = 16;
  s.max_nodes = 16;
  EXPECT_THROW(invert_power_symbol(ExtReal::from_long(1), 1, 0, 1.0, s), QuadratureFailure);
}

TEST(InvertPowerSymbol, AgreesWithWrightSeriesOnGrid) {
  const ContourSpec s = talbot_spec(1e-8);
  const std::vector<std::pair<long, long>> us = {{1, 3}, {1, 2}, {1, 1}, {2, 1}};
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    for (auto [un, ud] : us) {
      for (long v : {0L, 1L}) {
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
          const auto r = invert_power_symbol(ExtReal::from_double(a), Rational(un, ud), v, t, s);
          const std::string z = z_string(a, 0, 0, 1, t, un, ud);
          const std::string reference = times(oracle::wright_psi(un, ud, v, z), oracle::decimal(std::pow(t, v)));
          EXPECT_LT(rel(r.value, reference), 1e-6) << a << " " << un << "/" << ud << " " << v << " " << t;
        }
      }
    }
  }
}

TEST(InvertPowerSymbol, LineMethodAgreesWithTalbot) {
  const auto talbot = invert_power_symbol(ExtReal::from_long(1), 1, 0, 2.0, talbot_spec());
  const auto line = invert_power_symbol(ExtReal::from_long(1), 1, 0, 2.0, line_spec(1e-8));
  EXPECT_EQ(line.method, InversionMethod::truncated_bromwich);
  EXPECT_LT(std::fabs(line.value.to_double() / talbot.value.to_double() - 1), 1e-7);
}

TEST(InvertPowerSymbol, IndependentOfAbscissa) {
  for (double c : {0.5, 1.0, 2.0}) {
    ContourSpec s = talbot_spec();
    s.c = c;
    ContourSpec s2 = s;
    s2.c = 2 * c;
    const double a = invert_power_symbol(ExtReal::from_long(2), Rational(1, 2), 1, 1.5, s).value.to_double();
    const double b = invert_power_symbol(ExtReal::from_long(2), Rational(1, 2), 1, 1.5, s2).value.to_double();
    EXPECT_LT(std::fabs(a / b - 1), 2e-9) << c;
  }
  for (double c : {0.5, 1.0}) {
    ContourSpec s = line_spec(1e-8);
    s.auto_abscissa = false;
    s.c = c;
    ContourSpec s2 = s;
    s2.c = 2 * c;
    const double a = invert_power_symbol(ExtReal::from_long(1), 1, 0, 2.0, s).value.to_double();
    const double b = invert_power_symbol(ExtReal::from_long(1), 1, 0, 2.0, s2).value.to_double();
    EXPECT_LT(std::fabs(a / b - 1), 2e-8) << c;
  }
}

TEST(WPrime, Examples) {
  const auto x1 = FunctionSpecH::power(1);
  const auto x2 = FunctionSpecH::power(2);
  for (double c : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(w_prime(x1, 1, Complex(c, 0)).real(), 1.0 / c, 1e-15);
    EXPECT_NEAR(w_prime(x2, 1, Complex(c, 0)).real(), std::sqrt(std::numbers::pi) / 2 / std::sqrt(c), 1e-14);
  }
  const auto linear = FunctionSpecH::piecewise_linear({{0, 0}, {1, 1}});
  for (Complex s : {Complex(1, 0), Complex(0.5, 3), Complex(2, -40), Complex(1e-3, 1e-4)}) {
    for (std::uint64_t k : {1u, 3u}) {
      const Complex a = w_prime(linear, k, s);
      const Complex b = w_prime(x1, k, s);
      EXPECT_LT(std::abs(a - b), 1e-12 * std::abs(b)) << s << " " << k;
    }
  }
  EXPECT_THROW(w_prime(x1, 1, Complex(0, 1)), std::invalid_argument);
}

TEST(WPrime, PiecewiseMatchesQuadrature) {
  const auto h = FunctionSpecH::piecewise_linear({{0, 0}, {1, 1}, {2, 3}, {4, 4}});
  const Complex s(0.7, 1.3);
  for (std::uint64_t k : {1u, 2u}) {
    // midpoint rule on [0, 60] for int e^{-s k h(x)} dx
    Complex acc = 0;
    const int steps = 600000;
    const double width = 60.0 / steps;
    for (int i = 0; i < steps; ++i) {
      const double x = (i + 0.5) * width;
      acc += std::exp(-s * static_cast<double>(k) * h.at(x)) * width;
    }
    EXPECT_LT(std::abs(w_prime(h, k, s) - acc), 1e-8) << k;
  }
}

TEST(WPrime, ExtendedPrecisionAgreesWithDouble) {
  const auto h = FunctionSpecH::piecewise_linear({{0, 0}, {1, 2}, {3, 3}});
  const MpComplex s(ExtReal::from_double(0.8, 200), ExtReal::from_double(2.5, 200));
  const MpComplex w = w_prime(h, 2, s);
  const Complex d = w_prime(h, 2, Complex(0.8, 2.5));
  EXPECT_NEAR(w.re.to_double(), d.real(), 1e-14);
  EXPECT_NEAR(w.im.to_double(), d.imag(), 1e-14);
  const MpComplex p = w_prime(FunctionSpecH::power(3), 1, s);
  const Complex pd = w_prime(FunctionSpecH::power(3), 1, Complex(0.8, 2.5));
  EXPECT_NEAR(p.re.to_double(), pd.real(), 1e-14);
  EXPECT_NEAR(p.im.to_double(), pd.imag(), 1e-14);
}

TEST(LaplaceSymbolTest, DecayHypothesisForPowerCurves) {
  for (unsigned q : {1u, 2u, 3u}) {
    const auto sym = LaplaceSymbol::theorem_A(FunctionSpecH::power(q), 6);
    EXPECT_DOUBLE_EQ(sym.alpha(), 1.0 / q);
    EXPECT_DOUBLE_EQ(sym.D(), std::tgamma(1.0 + 1.0 / q));
    EXPECT_FALSE(sym.verify_decay(1.0, 1000).has_value()) << q;
    EXPECT_TRUE(sym.talbot_compatible());
  }
}

TEST(LaplaceSymbolTest, DecayHypothesisForPiecewiseData) {
  const auto h = FunctionSpecH::piecewise_linear({{0, 0}, {1, 1}, {2, 4}, {3, 9}});
  const auto a = LaplaceSymbol::theorem_A(h, 4);
  EXPECT_DOUBLE_EQ(a.alpha(), 1.0);
  EXPECT_FALSE(a.verify_decay(1.0, 1000).has_value());
  EXPECT_FALSE(a.talbot_compatible());

  const auto g = FunctionSpecG::polynomial({0, 1});
  const auto env = FunctionSpecGSide::piecewise(g, FunctionSpecGSide::Side::plus,
                                                PiecewiseLinear({{0, 1}, {1, 2}, {5, 6}}));
  const auto b = LaplaceSymbol::theorem_B(env, 3);
  EXPECT_FALSE(b.verify_decay(1.0, 1000).has_value());
}

TEST(LaplaceSymbolTest, DecayViolationIsReported) {
  // D shrunk below the true constant must fail the sampled check.
  const auto sym = LaplaceSymbol::explicit_power(ExtReal::from_long(1), 1, 0);
  EXPECT_FALSE(sym.verify_decay(1.0, 100).has_value());
  const auto poly = LaplaceSymbol::theorem_B(
      FunctionSpecGSide::polynomial(FunctionSpecG::constant(1), FunctionSpecGSide::Side::plus, {1.0}), 2);
  EXPECT_DOUBLE_EQ(poly.alpha(), 1.0);
  EXPECT_DOUBLE_EQ(poly.D(), 1.0);
  EXPECT_FALSE(poly.verify_decay(1.0, 100).has_value());
}

TEST(LaplaceSymbolTest, PlaneEnvelopeSymbol) {
  // g_eps(x) = x + 1: lambda = zeta_2(3) s^-2 + zeta_2(2) s^-1
  const auto env = FunctionSpecGSide::shift_rule(FunctionSpecG::polynomial({0, 1}), FunctionSpecGSide::Side::plus);
  const auto sym = LaplaceSymbol::theorem_B(env, 2);
  for (Complex s : {Complex(1, 0), Complex(0.5, 2), Complex(3, -7)}) {
    const Complex expected = 1.125 / (s * s) + 1.25 / s;
    EXPECT_LT(std::abs(sym.lambda(s) - expected), 1e-14 * std::abs(expected));
  }
}

TEST(PhiH, PowerCurveExamples) {
  const ContourSpec s = talbot_spec();
  const auto a = phi_h(FunctionSpecH::power(1), 5, 5.0, s);
  EXPECT_LT(rel(a.value, oracle::wright_psi(1, 1, 0, z_string(1.0, 5, 2, 1, 5.0, 1, 1))), 1e-8);

  const auto b = phi_h(FunctionSpecH::power(2), 4, 4.0, s);
  const std::string z = times(gamma_string(3, 2), z_string(1.0, 4, 3, 2, 4.0, 1, 2));
  EXPECT_LT(rel(b.value, oracle::wright_psi(1, 2, 0, z)), 1e-8);
}

TEST(PhiH, PiecewiseIdentityMatchesPowerCurve) {
  const auto linear = FunctionSpecH::piecewise_linear({{0, 0}, {1, 1}});
  const auto line = phi_h(linear, 5, 5.0, line_spec(1e-10));
  EXPECT_EQ(line.method, InversionMethod::truncated_bromwich);
  const auto talbot = phi_h(FunctionSpecH::power(1), 5, 5.0, talbot_spec(1e-12));
  EXPECT_LT(std::fabs(line.value.to_double() / talbot.value.to_double() - 1), 1e-8);
}

TEST(PhiH, PiecewiseCurveIndependentOfAbscissa) {
  const auto h = FunctionSpecH::piecewise_linear({{0, 0}, {1, 1}, {2, 4}, {3, 9}});
  ContourSpec s = line_spec(1e-7);
  s.auto_abscissa = false;
  s.c = 0.6;
  const double a = phi_h(h, 3, 6.0, s).value.to_double();
  s.c = 1.2;
  const double b = phi_h(h, 3, 6.0, s).value.to_double();
  EXPECT_LT(std::fabs(a / b - 1), 1e-6);
}

TEST(PhiH, PowerCurvesAgreeWithClosedFormProperty) {
  oracle::Gen gen(4242);
  for (int trial = 0; trial < 12; ++trial) {
    const unsigned q = static_cast<unsigned>(gen.uniform(1, 3));
    const long n = gen.uniform(1, 50);
    const double x = static_cast<double>(gen.uniform(1, 50));
    const auto r = phi_h(FunctionSpecH::power(q), n, x, talbot_spec(1e-8));
    const long qq = static_cast<long>(q);
    const std::string z = times(gamma_string(qq + 1, qq), z_string(1.0, n, qq + 1, qq, x, 1, qq));
    EXPECT_LT(rel(r.value, oracle::wright_psi(1, qq, 0, z)), 1e-6) << q << " " << n << " " << x;
  }
}

TEST(PhiG, Examples) {
  const auto g = FunctionSpecG::polynomial({0, 1});
  const auto minus = FunctionSpecGSide::polynomial(g, FunctionSpecGSide::Side::minus, {0.0, 1.0});
  const auto r = phi_g(minus, 3, 3.0, talbot_spec());
  EXPECT_LT(rel(r.value, oracle::wright_psi(2, 1, 0, z_string(1.0, 3, 3, 1, 3.0, 2, 1))), 1e-8);

  // constant envelope 1 has the symbol of h = x
  const auto one = FunctionSpecGSide::polynomial(FunctionSpecG::constant(1), FunctionSpecGSide::Side::plus, {1.0});
  const auto a = phi_g(one, 4, 3.0, talbot_spec());
  const auto b = phi_h(FunctionSpecH::power(1), 4, 3.0, talbot_spec());
  EXPECT_LT(std::fabs(a.value.to_double() / b.value.to_double() - 1), 1e-9);
}

TEST(PhiG, ShiftedEnvelopeCrossMethod) {
  const auto plus = FunctionSpecGSide::shift_rule(FunctionSpecG::polynomial({0, 1}), FunctionSpecGSide::Side::plus);
  const auto talbot = phi_g(plus, 2, 2.0, talbot_spec(1e-12));
  const auto line = phi_g(plus, 2, 2.0, line_spec(1e-10));
  EXPECT_EQ(talbot.method, InversionMethod::talbot);
  EXPECT_EQ(line.method, InversionMethod::truncated_bromwich);
  EXPECT_LT(std::fabs(line.value.to_double() / talbot.value.to_double() - 1), 1e-8);
}

TEST(PhiG, PiecewiseEnvelopeMatchesPolynomial) {
  // x + 1 written as a piecewise-linear envelope
  const auto g = FunctionSpecG::polynomial({0, 1});
  const auto pw = FunctionSpecGSide::piecewise(g, FunctionSpecGSide::Side::plus, PiecewiseLinear({{0, 1}, {1, 2}}));
  const auto poly = FunctionSpecGSide::shift_rule(g, FunctionSpecGSide::Side::plus);
  const double a = phi_g(pw, 3, 4.0, line_spec(1e-9)).value.to_double();
  const double b = phi_g(poly, 3, 4.0, talbot_spec(1e-12)).value.to_double();
  EXPECT_LT(std::fabs(a / b - 1), 1e-7);
}

TEST(PhiG, EnvelopeViolationRejected) {
  const auto g = FunctionSpecG::polynomial({0, 1});
  const auto bad = FunctionSpecGSide::polynomial(g, FunctionSpecGSide::Side::plus, {0.0, 1.0});
  EXPECT_THROW(phi_g(bad, 3, 3.0, talbot_spec()), std::invalid_argument);
}
