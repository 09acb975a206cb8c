#pragma once

// Named counting functions (p, p_q, p^g, PL) and their prefix and
// convolution sums.

#include "partition_lab/functions.hpp"
#include "partition_lab/series.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace partition_lab::counts {

using series::TruncatedSeries;

class CountFamily {
 public:
  enum class Kind { plain, power_q, weighted, plane, series };

  static CountFamily plain(std::size_t order) {
    return CountFamily(Kind::plain, "plain", 1, series::euler_product_series(FunctionSpecG::constant(1), order));
  }

  static CountFamily power(unsigned q, std::size_t order) {
    return CountFamily(Kind::power_q, "qpower" + std::to_string(q), q,
                       series::euler_product_series(FunctionSpecG::qth_powers(q), order));
  }

  static CountFamily weighted(const FunctionSpecG& g, std::size_t order) {
    return CountFamily(Kind::weighted, "weighted:" + g.name(), 0, series::euler_product_series(g, order));
  }

  static CountFamily plane(std::size_t order) {
    return CountFamily(Kind::plane, "plane", 0,
                       series::euler_product_series(FunctionSpecG::polynomial({0, 1}), order));
  }

  /// Partitions into parts h(1), h(2), ...
  static CountFamily from_h(const FunctionSpecH& h, std::size_t order) {
    return CountFamily(Kind::weighted, "h:" + h.describe(), 0,
                       series::euler_product_series(FunctionSpecG::image_of(h, order), order));
  }

  /// Wraps an arbitrary coefficient sequence (e.g. the divisor series).
  static CountFamily from_series(std::string name, TruncatedSeries s) {
    return CountFamily(Kind::series, std::move(name), 0, std::move(s));
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  unsigned q() const { return q_; }
  std::size_t order() const { return series_->order(); }
  const TruncatedSeries& coefficients() const { return *series_; }

  const BigInt& count(std::size_t n) const {
    check(n);
    return (*series_)[n];
  }

  BigInt prefix(std::size_t n) const {
    check(n);
    return series::prefix_sum_I(*series_, n);
  }

  /// sum_{n<=N} (N - n) count(n), by direct summation and as I[w_1 f](N);
  /// throws std::logic_error when the two routes disagree.
  BigInt weighted_prefix(std::size_t big_n) const {
    check(big_n);
    BigInt direct = 0;
    for (std::size_t n = 0; n <= big_n; ++n) {
      direct += (*series_)[n] * static_cast<unsigned long>(big_n - n);
    }
    const TruncatedSeries truncated(
        std::vector<BigInt>(series_->coeffs().begin(), series_->coeffs().begin() + big_n + 1));
    const BigInt via_series =
        series::prefix_sum_I(series::mul(series::make_gap_series(1, big_n), truncated), big_n);
    if (direct != via_series) {
      throw std::logic_error("weighted_prefix routes disagree for " + name_ + " at N = " +
                             std::to_string(big_n));
    }
    return direct;
  }

 private:
  CountFamily(Kind kind, std::string name, unsigned q, TruncatedSeries s)
      : kind_(kind), name_(std::move(name)), q_(q), series_(std::make_shared<const TruncatedSeries>(std::move(s))) {}

  void check(std::size_t n) const {
    if (n > order()) {
      throw std::out_of_range(name_ + ": n = " + std::to_string(n) + " exceeds truncation order " +
                              std::to_string(order()));
    }
  }

  Kind kind_;
  std::string name_;
  unsigned q_;
  std::shared_ptr<const TruncatedSeries> series_;
};

/// Coefficient n is d(n), built as w_1 + ... + w_N.
inline TruncatedSeries divisor_series(std::size_t order) {
  TruncatedSeries acc(order);
  for (std::size_t k = 1; k <= order; ++k) acc = series::add(acc, series::make_gap_series(k, order));
  return acc;
}

/// d(0..N) by a sieve (d(0) = 0).
inline std::vector<unsigned> divisor_sieve(std::size_t order) {
  std::vector<unsigned> d(order + 1, 0);
  for (std::size_t k = 1; k <= order; ++k) {
    for (std::size_t m = k; m <= order; m += k) ++d[m];
  }
  return d;
}

/// sum over n_1 + ... + n_r <= N of prod count_i(n_i).
inline BigInt convolution_prefix(const std::vector<CountFamily>& families, std::size_t big_n) {
  if (families.empty()) {
    throw std::invalid_argument("convolution_prefix needs at least one family");
  }
  auto head = [big_n](const CountFamily& f) {
    if (f.order() < big_n) {
      throw std::out_of_range(f.name() + " is truncated below N = " + std::to_string(big_n));
    }
    const auto c = f.coefficients().coeffs();
    return TruncatedSeries(std::vector<BigInt>(c.begin(), c.begin() + big_n + 1));
  };
  TruncatedSeries acc = head(families.front());
  for (std::size_t i = 1; i < families.size(); ++i) acc = series::mul(acc, head(families[i]));
  return series::prefix_sum_I(acc, big_n);
}

}  // namespace partition_lab::counts
