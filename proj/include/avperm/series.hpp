#pragma once

// Exact truncated power series over the rationals. Used as an independent
// oracle route for the ballot numbers via B(z) = (1 - sqrt(1-4z))/2.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "avperm/exact.hpp"

namespace avperm {

class TruncatedSeries {
 public:
  static constexpr long kDefaultOrder = 64;

  explicit TruncatedSeries(long order = kDefaultOrder) : order_(check_order(order)), coeff_(static_cast<size_t>(order) + 1) {}

  TruncatedSeries(std::vector<Rat> coeff, long order) : order_(check_order(order)), coeff_(std::move(coeff)) {
    coeff_.resize(static_cast<size_t>(order_) + 1);
  }

  long order() const { return order_; }

  const Rat& operator[](long n) const {
    if (n < 0 || n > order_) throw std::out_of_range("TruncatedSeries: coefficient beyond truncation order");
    return coeff_[static_cast<size_t>(n)];
  }
  Rat& at(long n) {
    if (n < 0 || n > order_) throw std::out_of_range("TruncatedSeries: coefficient beyond truncation order");
    return coeff_[static_cast<size_t>(n)];
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r(std::min(a.order_, b.order_));
    for (long n = 0; n <= r.order_; ++n) r.at(n) = a[n] + b[n];
    return r;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r(std::min(a.order_, b.order_));
    for (long n = 0; n <= r.order_; ++n) r.at(n) = a[n] - b[n];
    return r;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r(std::min(a.order_, b.order_));
    for (long i = 0; i <= r.order_; ++i) {
      if (a[i] == 0) continue;
      for (long j = 0; i + j <= r.order_; ++j) {
        if (b[j] == 0) continue;
        r.at(i + j) += a[i] * b[j];
      }
    }
    return r;
  }
  friend TruncatedSeries operator*(const Rat& c, const TruncatedSeries& a) {
    TruncatedSeries r(a.order_);
    for (long n = 0; n <= a.order_; ++n) r.at(n) = c * a[n];
    return r;
  }

  TruncatedSeries pow(long e) const {
    if (e < 0) throw std::invalid_argument("TruncatedSeries::pow: negative exponent");
    TruncatedSeries r = one(order_);
    TruncatedSeries base = *this;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  // 1/f for series with nonzero constant term.
  TruncatedSeries reciprocal() const {
    if (coeff_[0] == 0) throw std::invalid_argument("TruncatedSeries::reciprocal: zero constant term");
    TruncatedSeries r(order_);
    r.at(0) = Rat(1) / coeff_[0];
    for (long n = 1; n <= order_; ++n) {
      Rat acc = 0;
      for (long j = 1; j <= n; ++j) acc += (*this)[j] * r[n - j];
      r.at(n) = -acc / coeff_[0];
    }
    return r;
  }

  static TruncatedSeries one(long order) {
    TruncatedSeries r(order);
    r.at(0) = 1;
    return r;
  }

  // sqrt(1-4z) via the binomial series: coefficients of (1+u)^{1/2} at u=-4z.
  static TruncatedSeries sqrt_one_minus_4z(long order) {
    TruncatedSeries r(order);
    Rat c = 1;  // binom(1/2, k) * (-4)^k, built incrementally
    r.at(0) = 1;
    for (long k = 1; k <= order; ++k) {
      // binom(1/2,k) = binom(1/2,k-1) * (1/2 - (k-1)) / k
      c *= Rat(Int(1) - Int(2) * (k - 1), Int(2) * k);
      c *= -4;
      r.at(k) = c;
    }
    return r;
  }

  // B(z) = (1 - sqrt(1-4z))/2 = sum_{n>=1} C_{n-1} z^n
  static TruncatedSeries ballot_base(long order) {
    TruncatedSeries s = sqrt_one_minus_4z(order);
    TruncatedSeries r(order);
    for (long n = 0; n <= order; ++n) r.at(n) = (Rat((n == 0) ? 1 : 0) - s[n]) / 2;
    return r;
  }

 private:
  static long check_order(long order) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries: negative order");
    return order;
  }

  long order_;
  std::vector<Rat> coeff_;
};

// [z^n] B(z)^r, computed purely by truncated-series arithmetic.
inline Rat series_ballot_coeff(long n, long r) {
  if (n < 1 || r < 1) throw std::invalid_argument("series_ballot_coeff: n, r must be >= 1");
  return TruncatedSeries::ballot_base(n).pow(r)[n];
}

}  // namespace avperm
