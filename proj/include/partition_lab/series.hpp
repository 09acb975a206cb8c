#pragma once

// Exact truncated power series over big integers: the universe of the prefix
// sum operator I[f](N) = a_0 + ... + a_N.

#include "partition_lab/ext_real.hpp"
#include "partition_lab/functions.hpp"

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace partition_lab::series {

/// Coefficients a_0..a_N of a power series truncated after z^N.
class TruncatedSeries {
 public:
  /// The zero series of order N.
  explicit TruncatedSeries(std::size_t order) : coeffs_(order + 1) {}

  explicit TruncatedSeries(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
      throw std::invalid_argument("a truncated series needs at least one coefficient");
    }
  }

  TruncatedSeries(std::initializer_list<long> coeffs) {
    if (coeffs.size() == 0) {
      throw std::invalid_argument("a truncated series needs at least one coefficient");
    }
    coeffs_.reserve(coeffs.size());
    for (long c : coeffs) coeffs_.emplace_back(c);
  }

  static TruncatedSeries one(std::size_t order) {
    TruncatedSeries s(order);
    s.coeffs_[0] = 1;
    return s;
  }

  std::size_t order() const { return coeffs_.size() - 1; }
  const BigInt& operator[](std::size_t n) const { return coeffs_.at(n); }
  std::span<const BigInt> coeffs() const { return coeffs_; }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  std::vector<BigInt> coeffs_;
};

/// Series with rational coefficients; only used on the exp cross-check path.
using RationalSeries = std::vector<Rational>;

inline void require_same_order(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.order() != b.order()) {
    throw std::invalid_argument("truncation orders differ: " + std::to_string(a.order()) + " vs " +
                                std::to_string(b.order()));
  }
}

/// w_k(z) = z^k + z^{2k} + ... truncated at N.
inline TruncatedSeries make_gap_series(std::uint64_t k, std::size_t order) {
  if (k == 0) {
    throw std::invalid_argument("gap series needs k >= 1");
  }
  std::vector<BigInt> c(order + 1);
  for (std::uint64_t m = k; m <= order; m += k) c[m] = 1;
  return TruncatedSeries(std::move(c));
}

inline TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_order(a, b);
  std::vector<BigInt> c(a.order() + 1);
  for (std::size_t n = 0; n <= a.order(); ++n) c[n] = a[n] + b[n];
  return TruncatedSeries(std::move(c));
}

/// Cauchy product truncated at the common order.
inline TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_order(a, b);
  const std::size_t order = a.order();
  std::vector<BigInt> c(order + 1);
  for (std::size_t i = 0; i <= order; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j <= order; ++j) {
      if (b[j] != 0) c[i + j] += a[i] * b[j];
    }
  }
  return TruncatedSeries(std::move(c));
}

inline TruncatedSeries power(const TruncatedSeries& base, unsigned exponent) {
  TruncatedSeries result = TruncatedSeries::one(base.order());
  for (unsigned i = 0; i < exponent; ++i) result = mul(result, base);
  return result;
}

/// c_j = sum over d | j of d * g(d), for j = 1..N (index 0 unused).
class DivisorWeightCache {
 public:
  DivisorWeightCache(const FunctionSpecG& g, std::size_t order) : weights_(order + 1) {
    for (std::size_t d = 1; d <= order; ++d) {
      const BigInt gd = g(d);
      if (gd < 0) {
        throw std::invalid_argument(g.name() + " is negative at " + std::to_string(d));
      }
      if (gd == 0) continue;
      const BigInt term = gd * static_cast<unsigned long>(d);
      for (std::size_t j = d; j <= order; j += d) weights_[j] += term;
    }
  }

  /// Raw weights c_0..c_N; c_0 is ignored.
  static DivisorWeightCache from_weights(std::vector<BigInt> weights) {
    if (weights.empty()) throw std::invalid_argument("empty weight list");
    DivisorWeightCache c;
    c.weights_ = std::move(weights);
    return c;
  }

  const BigInt& operator[](std::size_t j) const { return weights_.at(j); }
  std::size_t order() const { return weights_.size() - 1; }

 private:
  DivisorWeightCache() = default;

  std::vector<BigInt> weights_;
};

/// prod_{n>=1} (1 - z^n)^{-g(n)} through the log-derivative recurrence
/// m a_m = sum_{j=1}^m c_j a_{m-j}. Each division must be exact.
inline TruncatedSeries euler_product_series(const DivisorWeightCache& c) {
  const std::size_t order = c.order();
  std::vector<BigInt> a(order + 1);
  a[0] = 1;
  BigInt acc;
  for (std::size_t m = 1; m <= order; ++m) {
    acc = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      if (c[j] != 0) acc += c[j] * a[m - j];
    }
    if (mpz_divisible_ui_p(acc.get_mpz_t(), m) == 0) {
      throw std::logic_error("inexact division at m = " + std::to_string(m) + " (corrupted weight cache)");
    }
    mpz_divexact_ui(a[m].get_mpz_t(), acc.get_mpz_t(), m);
  }
  return TruncatedSeries(std::move(a));
}

inline TruncatedSeries euler_product_series(const FunctionSpecG& g, std::size_t order) {
  return euler_product_series(DivisorWeightCache(g, order));
}

/// sum_{k=1}^{K} w_k / k truncated at `order`: the logarithm of the partition
/// generating function restricted to k <= K.
inline RationalSeries partition_log_series(std::size_t k_max, std::size_t order) {
  RationalSeries x(order + 1);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const Rational inv(1, static_cast<unsigned long>(k));
    for (std::size_t m = k; m <= order; m += k) x[m] += inv;
  }
  return x;
}

/// exp(x) over exact rationals via m E_m = sum_j j x_j E_{m-j}; the result
/// must come out integral.
inline TruncatedSeries exp_series(const RationalSeries& x) {
  if (x.empty()) {
    throw std::invalid_argument("empty series");
  }
  if (x[0] != 0) {
    throw std::invalid_argument("exp_series needs a zero constant term");
  }
  const std::size_t order = x.size() - 1;
  std::vector<Rational> e(order + 1);
  e[0] = 1;
  for (std::size_t m = 1; m <= order; ++m) {
    Rational acc = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      if (x[j] != 0) acc += Rational(static_cast<unsigned long>(j)) * x[j] * e[m - j];
    }
    e[m] = acc / Rational(static_cast<unsigned long>(m));
  }
  std::vector<BigInt> out(order + 1);
  for (std::size_t m = 0; m <= order; ++m) {
    if (e[m].get_den() != 1) {
      throw std::domain_error("exp_series: coefficient " + std::to_string(m) + " is not an integer (" +
                              e[m].get_str() + ")");
    }
    out[m] = e[m].get_num();
  }
  return TruncatedSeries(std::move(out));
}

/// I[x](N) = x_0 + ... + x_N.
inline BigInt prefix_sum_I(const TruncatedSeries& x, std::size_t n) {
  if (n > x.order()) {
    throw std::out_of_range("prefix sum beyond truncation order");
  }
  BigInt sum = 0;
  for (std::size_t i = 0; i <= n; ++i) sum += x[i];
  return sum;
}

}  // namespace partition_lab::series
