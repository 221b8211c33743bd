#pragma once

// Exact integer/rational combinatorics: Catalan numbers, ballot numbers,
// descendant counts f(N,r), the Delta_s alternating operator and the
// closed-form expected insertion-position ratio.

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace avperm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double rat_to_double(const Rat& q) {
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  bool neg = num < 0;
  if (neg) num = -num;
  // keep operands in double range by shifting both sides equally
  auto bits = [](const Int& v) -> long { return v == 0 ? 0 : static_cast<long>(msb(v)) + 1; };
  long excess = std::max(bits(num), bits(den)) - 512;
  if (excess > 0) {
    num >>= excess;
    den >>= excess;
    if (den == 0) den = 1;
  }
  double r = num.convert_to<double>() / den.convert_to<double>();
  return neg ? -r : r;
}

// C(n,k) by the multiplicative formula; every intermediate division is exact.
inline Int binomial(long n, long k) {
  if (k < 0 || k > n || n < 0) return 0;
  if (k > n - k) k = n - k;
  Int r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    if (r % i != 0) throw std::logic_error("binomial: inexact intermediate division");
    r /= i;
  }
  return r;
}

// C_n = binom(2n,n)/(n+1)
inline Int catalan(long n) {
  if (n < 0) throw std::invalid_argument("catalan: n must be >= 0");
  Int b = binomial(2 * n, n);
  if (b % (n + 1) != 0) throw std::logic_error("catalan: inexact division");
  return b / (n + 1);
}

// Prefix table C_0..C_n, built once and immutable afterwards.
class CatalanTable {
 public:
  explicit CatalanTable(long n_max) {
    c_.reserve(static_cast<size_t>(n_max) + 1);
    c_.push_back(1);
    // C_{n+1} = C_n * 2(2n+1)/(n+2)
    for (long n = 0; n < n_max; ++n) {
      Int next = c_.back() * 2 * (2 * n + 1);
      if (next % (n + 2) != 0) throw std::logic_error("catalan recurrence: inexact division");
      c_.push_back(next / (n + 2));
    }
  }
  const Int& operator[](long n) const { return c_.at(static_cast<size_t>(n)); }
  long max_index() const { return static_cast<long>(c_.size()) - 1; }

 private:
  std::vector<Int> c_;
};

// q_{n,r} = ((r-1)/n) * binom(2n-r, n-1); the number of length-n vertices of
// the Catalan tree with r children. Zero outside 2 <= r <= n+1 so that sums
// over free ranges are safe.
inline Int ballot(long n, long r) {
  if (n < 1) throw std::invalid_argument("ballot: n must be >= 1");
  if (r < 2 || r > n + 1) return 0;
  Int b = (r - 1) * binomial(2 * n - r, n - 1);
  if (b % n != 0) throw std::logic_error("ballot: inexact division");
  return b / n;
}

// f(N,r): number of leaves N-1 levels below a vertex with r children,
// counting the vertex itself at N = 1. f(1,r) := 1 (zero remaining levels);
// for N >= 2, f(N,r) = (r/(N-1)) * binom(2N+r-3, N-2).
inline Int descendants(long n_levels, long r) {
  if (n_levels < 1) throw std::invalid_argument("descendants: N must be >= 1");
  if (r < 2) throw std::invalid_argument("descendants: r must be >= 2");
  if (n_levels == 1) return 1;
  Int b = r * binomial(2 * n_levels + r - 3, n_levels - 2);
  if (b % (n_levels - 1) != 0) throw std::logic_error("descendants: inexact division");
  return b / (n_levels - 1);
}

// Memoized f(N,r) lookups for the sampling kernel. Grown on demand; not
// thread-safe, so each worker owns one (or shares a fully pre-built one).
class DescendantTable {
 public:
  const Int& f(long n_levels, long r) {
    if (n_levels < 1 || r < 2) throw std::invalid_argument("DescendantTable: bad index");
    auto ur = static_cast<size_t>(r - 2);
    auto un = static_cast<size_t>(n_levels - 1);
    if (ur >= table_.size()) table_.resize(ur + 1);
    auto& col = table_[ur];
    while (col.size() <= un) {
      long next_n = static_cast<long>(col.size()) + 1;
      col.push_back(descendants(next_n, r));
    }
    return col[un];
  }

 private:
  std::vector<std::vector<Int>> table_;
};

// Delta_s(a_n) = sum_{i=0}^{floor((s-2)/2)} (-1)^i binom(s-i-2, i) a_{n-i},
// with the window holding a_n, a_{n-1}, ... in descending index order.
inline Int delta(long s, std::span<const Int> window) {
  if (s < 2) throw std::invalid_argument("delta: s must be >= 2");
  long terms = (s - 2) / 2 + 1;
  if (static_cast<long>(window.size()) < terms) throw std::invalid_argument("delta: insufficient history");
  Int acc = 0;
  for (long i = 0; i < terms; ++i) {
    Int term = binomial(s - i - 2, i) * window[static_cast<size_t>(i)];
    if (i % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

inline Int delta(long s, const std::vector<Int>& window) {
  return delta(s, std::span<const Int>(window.data(), window.size()));
}

// (2m+s+2)(2m+s+1) / ((m+s+1)(m+2)); equals ballot(m+s+1,s)/ballot(m+s,s).
inline Rat expected_positions(long m, long s) {
  if (m < 1) throw std::invalid_argument("expected_positions: m must be >= 1");
  if (s < 2) throw std::invalid_argument("expected_positions: s must be >= 2");
  Rat num(Int(2 * m + s + 2) * (2 * m + s + 1));
  Rat den(Int(m + s + 1) * (m + 2));
  return num / den;
}

// Level-n branch-count census of the tree grown from a root with s children
// (root at level 0, its children at level 1). Vertices are determined by
// their branch count, so the census is the level multiset evolved by
// r -> {2,...,r+1}. Returns the count of level-n vertices with k branches.
inline Int generalized_ballot_oracle(long n, long k, long s) {
  if (n < 0 || s < 2) throw std::invalid_argument("generalized_ballot_oracle: bad arguments");
  std::vector<Int> level;  // index i holds count of vertices with branch count i+2
  auto at = [&](long q) -> Int& {
    auto idx = static_cast<size_t>(q - 2);
    if (idx >= level.size()) level.resize(idx + 1);
    return level[idx];
  };
  at(s) = 1;
  for (long step = 0; step < n; ++step) {
    std::vector<Int> next(level.size() + 1);
    for (size_t i = 0; i < level.size(); ++i) {
      if (level[i] == 0) continue;
      long q = static_cast<long>(i) + 2;
      for (long child = 2; child <= q + 1; ++child) next[static_cast<size_t>(child - 2)] += level[i];
    }
    level = std::move(next);
  }
  if (k < 2 || static_cast<size_t>(k - 2) >= level.size()) return 0;
  return level[static_cast<size_t>(k - 2)];
}

}  // namespace avperm
