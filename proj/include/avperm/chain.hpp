#pragma once

// The ballot symbolic chain: exact path counts and first-return counts for
// the adjacency i -> {2,...,i+1}, generating-function partial sums, the
// normalized transfer-operator power iteration, and the homogeneous /
// inhomogeneous transition kernels.

#include <cmath>
#include <map>
#include <vector>

#include "avperm/exact.hpp"
#include "avperm/rng.hpp"

namespace avperm {

// Probability vector over states {2..v_max}; weights[j-2] is the mass at j.
struct SimplexVector {
  int v_max = 0;
  std::vector<double> weights;

  static SimplexVector point_mass(int state, int v_max) {
    if (state < 2 || state > v_max) throw std::invalid_argument("SimplexVector: state out of range");
    SimplexVector w;
    w.v_max = v_max;
    w.weights.assign(static_cast<size_t>(v_max - 1), 0.0);
    w.weights[static_cast<size_t>(state - 2)] = 1.0;
    return w;
  }

  double l1() const {
    double s = 0;
    for (double x : weights) s += x;
    return s;
  }
};

// (wA)_j = sum_{i >= max(j-1,2)} w_i for j in {2..v_max+1}; the j = v_max+1
// component is truncated and reported as lost mass.
struct AdjacencyImage {
  std::vector<double> weights;  // over {2..v_max}, unnormalized
  double lost = 0.0;            // truncated beyond v_max
  double norm = 0.0;            // l1 of the kept part
};

inline AdjacencyImage adjacency_apply(const SimplexVector& w) {
  int v_max = w.v_max;
  AdjacencyImage out;
  out.weights.assign(static_cast<size_t>(v_max - 1), 0.0);
  double suffix = 0.0;
  // new_(j) = suffix sum from max(j-1,2); walk j downwards
  out.lost = w.weights[static_cast<size_t>(v_max - 2)];  // j = v_max+1 keeps suffix from v_max
  for (int j = v_max; j >= 3; --j) {
    suffix += w.weights[static_cast<size_t>(j - 1 - 2)];  // add w_{j-1}
    out.weights[static_cast<size_t>(j - 2)] = suffix;
  }
  suffix += w.weights[0];  // include w_2 for j = 2
  out.weights[0] = suffix;
  for (double x : out.weights) out.norm += x;
  return out;
}

struct IterationResult {
  SimplexVector fixed_point;
  double growth_factor = 0.0;  // last normalization constant ||wA||_1
  int iterations = 0;
  bool converged = false;
  double lost_mass = 0.0;  // cumulative truncated fraction
};

inline IterationResult normalize_iterate(SimplexVector w0, double tol, int max_iters) {
  if (tol <= 0) throw std::invalid_argument("normalize_iterate: tol must be > 0");
  IterationResult res;
  SimplexVector w = std::move(w0);
  for (int it = 1; it <= max_iters; ++it) {
    AdjacencyImage img = adjacency_apply(w);
    double change = 0.0;
    for (size_t i = 0; i < img.weights.size(); ++i) {
      double nw = img.weights[i] / img.norm;
      change += std::abs(nw - w.weights[i]);
      w.weights[i] = nw;
    }
    res.growth_factor = img.norm;
    res.lost_mass += img.lost / img.norm;
    res.iterations = it;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.fixed_point = std::move(w);
  return res;
}

// ---------------------------------------------------------------------------
// Exact path counting. States grow by at most one per step, so sizing the
// state space as n + max(i,j) + 1 makes truncation a non-issue.

// t_ij(n): number of length-n paths i -> j.
inline Int matrix_power_entry(int i, int j, int n) {
  if (i < 2 || j < 2 || n < 0) throw std::invalid_argument("matrix_power_entry: bad arguments");
  int v_max = n + std::max(i, j) + 1;
  // w[s-2] = number of length-t paths i -> s
  std::vector<Int> w(static_cast<size_t>(v_max - 1));
  w[static_cast<size_t>(i - 2)] = 1;
  int top = i;
  for (int t = 0; t < n; ++t) {
    int new_top = std::min(top + 1, v_max);
    // new_w_s = suffix_{max(s-1,2)}; descending in-place update
    if (new_top > top) w[static_cast<size_t>(new_top - 2)] = 0;
    for (int s = new_top; s >= 4; --s) {
      Int& dst = w[static_cast<size_t>(s - 2)];
      dst = (s == new_top ? Int(0) : w[static_cast<size_t>(s - 1)]) + w[static_cast<size_t>(s - 3)];
    }
    // s = 3 and s = 2 share the suffix from 2
    w[1] = (new_top >= 4 ? w[2] : Int(0)) + w[0];
    w[0] = w[1];
    top = new_top;
  }
  return w[static_cast<size_t>(j - 2)];
}

// f_ij(n): length-n paths i -> j avoiding j before the last step.
// f_ij(0) = 0, f_ij(1) = A(i,j), f_ij(n+1) = sum_{k != j} A(i,k) f_kj(n).
inline Int first_return(int i, int j, int n) {
  if (i < 2 || j < 2 || n < 0) throw std::invalid_argument("first_return: bad arguments");
  if (n == 0) return 0;
  int v_max = n + std::max(i, j) + 1;
  // g[m][k-2] = f_kj(m), built upward in m over all start states k
  std::vector<Int> cur(static_cast<size_t>(v_max - 1)), next(static_cast<size_t>(v_max - 1));
  for (int k = 2; k <= v_max; ++k) cur[static_cast<size_t>(k - 2)] = (j <= k + 1) ? 1 : 0;  // f_kj(1) = A(k,j)
  for (int m = 1; m < n; ++m) {
    for (int k = 2; k <= v_max; ++k) {
      Int acc = 0;
      for (int l = 2; l <= std::min(k + 1, v_max); ++l)
        if (l != j) acc += cur[static_cast<size_t>(l - 2)];
      next[static_cast<size_t>(k - 2)] = std::move(acc);
    }
    std::swap(cur, next);
  }
  return cur[static_cast<size_t>(i - 2)];
}

inline Int first_return(int i, int n) { return first_return(i, i, n); }

// sum_{n=0}^{N} t_ii(n) z^n, exact. The path counts come from the same
// in-place suffix-sum dynamic program as matrix_power_entry.
inline Rat path_series_partial(int i, const Rat& z, int n_terms) {
  if (i < 2 || n_terms < 0) throw std::invalid_argument("path_series_partial: bad arguments");
  Int znum = boost::multiprecision::numerator(z);
  Int zden = boost::multiprecision::denominator(z);
  // accumulate sum z^n t(n) = (sum_n t(n) znum^n zden^{N-n}) / zden^N
  Int acc_num = 1;  // t(0) = 1
  std::vector<Int> w(static_cast<size_t>(n_terms + i + 2));
  w[static_cast<size_t>(i - 2)] = 1;
  int top = i;
  for (int t = 1; t <= n_terms; ++t) {
    int new_top = top + 1;
    w[static_cast<size_t>(new_top - 2)] = 0;
    for (int s = new_top; s >= 4; --s) {
      Int& dst = w[static_cast<size_t>(s - 2)];
      dst = (s == new_top ? Int(0) : w[static_cast<size_t>(s - 1)]) + w[static_cast<size_t>(s - 3)];
    }
    w[1] = (new_top >= 4 ? w[2] : Int(0)) + w[0];
    w[0] = w[1];
    top = new_top;
    acc_num = acc_num * zden + w[static_cast<size_t>(i - 2)] * pow_int(znum, t);
  }
  return Rat(acc_num, pow_int(zden, n_terms));
}

inline Int pow_int(const Int& base, long e) {
  Int r = 1, b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Transition kernels on child-counts.

// limiting kernel p(r,i) = i / (r * 2^{r-i+2}) for i in {2..r+1}
inline Rat homogeneous_probability(long r, long i) {
  if (r < 2) throw std::invalid_argument("homogeneous_probability: r must be >= 2");
  if (i < 2 || i > r + 1) return Rat(0);
  return Rat(Int(i), Int(r) * (Int(1) << static_cast<unsigned>(r - i + 2)));
}

// finite-horizon kernel p^N(i|r) = f(N,i)/f(N+1,r) for i in {2..r+1}
inline Rat inhomogeneous_probability(long n_remaining, long r, long i, DescendantTable& table) {
  if (r < 2 || n_remaining < 1) throw std::invalid_argument("inhomogeneous_probability: bad arguments");
  if (i < 2 || i > r + 1) return Rat(0);
  return Rat(table.f(n_remaining, i), table.f(n_remaining + 1, r));
}

// Exact inverse-CDF draw: integer weights w_i over a common denominator.
inline long draw_by_weights(const std::vector<Int>& cumulative, Rng& rng) {
  const Int& total = cumulative.back();
  Int u = rng.below_big(total);
  size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (u < cumulative[mid])
      hi = mid;
    else
      lo = mid + 1;
  }
  return static_cast<long>(lo);
}

// one step of the limiting chain from state r: returns i in {2..r+1}
inline long homogeneous_step(long r, Rng& rng) {
  if (r < 2) throw std::invalid_argument("homogeneous_step: r must be >= 2");
  // weights i * 2^i over the common denominator r * 2^{r+2}
  std::vector<Int> cum;
  Int acc = 0;
  for (long i = 2; i <= r + 1; ++i) {
    acc += Int(i) << static_cast<unsigned>(i);
    cum.push_back(acc);
  }
  return 2 + draw_by_weights(cum, rng);
}

// one step of the finite-horizon chain: i with probability f(N,i)/f(N+1,r)
inline long inhomogeneous_step(long r, long n_remaining, Rng& rng, DescendantTable& table) {
  if (r < 2 || n_remaining < 1) throw std::invalid_argument("inhomogeneous_step: bad arguments");
  std::vector<Int> cum;
  Int acc = 0;
  for (long i = 2; i <= r + 1; ++i) {
    acc += table.f(n_remaining, i);
    cum.push_back(acc);
  }
  if (acc != table.f(n_remaining + 1, r)) throw std::logic_error("inhomogeneous_step: row does not sum to f(N+1,r)");
  return 2 + draw_by_weights(cum, rng);
}

struct ReturnTimeStats {
  long start_state = 0;
  long trials = 0;
  std::vector<long> horizons;
  std::vector<double> return_fraction;             // by each horizon
  std::vector<double> mean_conditional_return;     // over returns within horizon
};

// Monte Carlo on the limiting chain: fraction of trials returning to the
// start state by each horizon, and the conditional mean return time.
inline ReturnTimeStats return_time_stats(long r0, const std::vector<long>& horizons, long trials, Rng& rng) {
  if (r0 < 2) throw std::invalid_argument("return_time_stats: start state must be >= 2");
  ReturnTimeStats out;
  out.start_state = r0;
  out.trials = trials;
  out.horizons = horizons;
  long max_h = 0;
  for (long h : horizons) max_h = std::max(max_h, h);
  std::vector<long> return_times;
  return_times.reserve(static_cast<size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    long state = r0;
    long ret = -1;
    for (long step = 1; step <= max_h; ++step) {
      state = homogeneous_step(state, rng);
      if (state == r0) {
        ret = step;
        break;
      }
    }
    return_times.push_back(ret);
  }
  for (long h : horizons) {
    long count = 0;
    long long sum = 0;
    for (long rt : return_times)
      if (rt > 0 && rt <= h) {
        ++count;
        sum += rt;
      }
    out.return_fraction.push_back(static_cast<double>(count) / static_cast<double>(trials));
    out.mean_conditional_return.push_back(count ? static_cast<double>(sum) / static_cast<double>(count) : 0.0);
  }
  return out;
}

}  // namespace avperm
