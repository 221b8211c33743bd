#pragma once

// Permutations, 321-avoidance, the rightmost-descent insertion process and
// tail-configuration boxes.

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "avperm/exact.hpp"

namespace avperm {

struct Permutation {
  std::vector<int> values;  // one-line notation, a bijection on 1..n

  Permutation() = default;
  explicit Permutation(std::vector<int> v) : values(std::move(v)) { validate(); }

  int size() const { return static_cast<int>(values.size()); }
  int at(int pos) const { return values.at(static_cast<size_t>(pos - 1)); }  // 1-based

  static Permutation identity(int n) {
    std::vector<int> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i + 1;
    return Permutation(std::move(v));
  }

  void validate() const {
    int n = size();
    if (n < 1) throw std::invalid_argument("permutation must have length >= 1");
    std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
    for (int v : values) {
      if (v < 1 || v > n || seen[static_cast<size_t>(v)]) throw std::invalid_argument("not a permutation of 1..n");
      seen[static_cast<size_t>(v)] = true;
    }
  }

  bool operator==(const Permutation& o) const { return values == o.values; }
  bool operator<(const Permutation& o) const { return values < o.values; }

  std::string str() const {
    std::ostringstream os;
    for (int i = 0; i < size(); ++i) {
      if (i) os << ' ';
      os << values[static_cast<size_t>(i)];
    }
    return os.str();
  }
};

// Text formats: space- or comma-separated one-line notation ("2 4 1 3"),
// plus the compact digit form for n <= 9 ("2413").
inline Permutation parse_permutation(const std::string& text) {
  std::vector<int> vals;
  bool has_sep = text.find(' ') != std::string::npos || text.find(',') != std::string::npos;
  if (has_sep) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    int v;
    while (is >> v) vals.push_back(v);
    if (!is.eof()) throw std::invalid_argument("bad permutation text: " + text);
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') throw std::invalid_argument("bad permutation text: " + text);
      vals.push_back(c - '0');
    }
  }
  if (vals.empty()) throw std::invalid_argument("empty permutation text");
  return Permutation(std::move(vals));
}

// True iff some index subsequence of perm is order-isomorphic to pattern.
inline bool contains_pattern(const Permutation& perm, const Permutation& pattern) {
  int n = perm.size(), m = pattern.size();
  if (m > n) throw std::invalid_argument("contains_pattern: pattern longer than permutation");
  std::vector<int> chosen;  // values picked so far
  std::function<bool(int)> search = [&](int start) -> bool {
    int got = static_cast<int>(chosen.size());
    if (got == m) return true;
    for (int i = start; i <= n - (m - got); ++i) {
      int v = perm.values[static_cast<size_t>(i)];
      bool ok = true;
      for (int j = 0; j < got && ok; ++j) {
        bool pat_less = pattern.values[static_cast<size_t>(j)] < pattern.values[static_cast<size_t>(got)];
        if ((chosen[static_cast<size_t>(j)] < v) != pat_less) ok = false;
      }
      if (!ok) continue;
      chosen.push_back(v);
      if (search(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return search(0);
}

// Direct check: no j is both preceded by a larger value and followed by a
// smaller one. Linear scan with prefix max / suffix min.
inline bool is_321_avoiding(const Permutation& perm) {
  int n = perm.size();
  std::vector<int> suffix_min(static_cast<size_t>(n) + 1, n + 1);
  for (int i = n - 1; i >= 0; --i)
    suffix_min[static_cast<size_t>(i)] = std::min(suffix_min[static_cast<size_t>(i) + 1], perm.values[static_cast<size_t>(i)]);
  int prefix_max = 0;
  for (int j = 0; j < n; ++j) {
    int v = perm.values[static_cast<size_t>(j)];
    if (prefix_max > v && suffix_min[static_cast<size_t>(j) + 1] < v) return false;
    prefix_max = std::max(prefix_max, v);
  }
  return true;
}

// Largest i with pi_i > pi_{i+1}; 0 if the permutation is increasing.
inline int rightmost_descent(const Permutation& perm) {
  for (int i = perm.size() - 1; i >= 1; --i)
    if (perm.at(i) > perm.at(i + 1)) return i;
  return 0;
}

struct InsertionSlot {
  int pj;        // j for P_j; 0 means R
  int position;  // 1-based index of the new entry in the grown permutation

  bool is_r() const { return pj == 0; }
  std::string label() const { return is_r() ? "R" : "P" + std::to_string(pj); }
  bool operator==(const InsertionSlot& o) const { return pj == o.pj && position == o.position; }
};

// Legal positions for n+1: every position strictly right of the rightmost
// descent, labelled P_1..P_m left to right plus the terminal slot R.
inline std::vector<InsertionSlot> insertion_slots(const Permutation& perm) {
  if (!is_321_avoiding(perm)) throw std::invalid_argument("insertion_slots: permutation contains 321");
  int n = perm.size();
  int rd = rightmost_descent(perm);
  std::vector<InsertionSlot> slots;
  for (int j = 1; j <= n - rd; ++j) slots.push_back(InsertionSlot{j, rd + j});
  slots.push_back(InsertionSlot{0, n + 1});
  return slots;
}

inline int q_statistic(const Permutation& perm) {
  if (!is_321_avoiding(perm)) throw std::invalid_argument("q_statistic: permutation contains 321");
  return perm.size() - rightmost_descent(perm) + 1;
}

inline Permutation insert_max(const Permutation& perm, const InsertionSlot& slot) {
  int n = perm.size();
  int rd = rightmost_descent(perm);
  bool legal = slot.is_r() ? slot.position == n + 1
                           : (slot.pj >= 1 && slot.pj <= n - rd && slot.position == rd + slot.pj);
  if (!legal) throw std::invalid_argument("insert_max: illegal slot " + slot.label());
  std::vector<int> v = perm.values;
  v.insert(v.begin() + (slot.position - 1), n + 1);
  return Permutation(std::move(v));
}

// Depth-first enumeration of AV_n(321) by tree growth, slots visited
// P_1, ..., P_m, R. Deterministic order for golden tests.
inline void enumerate_avoiders(int n, const std::function<void(const Permutation&)>& fn, int max_n = 14) {
  if (n < 1) throw std::invalid_argument("enumerate_avoiders: n must be >= 1");
  if (n > max_n) throw std::invalid_argument("enumerate_avoiders: n exceeds configured bound");
  std::function<void(const Permutation&)> grow = [&](const Permutation& p) {
    if (p.size() == n) {
      fn(p);
      return;
    }
    for (const auto& slot : insertion_slots(p)) grow(insert_max(p, slot));
  };
  grow(Permutation::identity(1));
}

inline std::vector<Permutation> collect_avoiders(int n, int max_n = 14) {
  std::vector<Permutation> out;
  enumerate_avoiders(n, [&](const Permutation& p) { out.push_back(p); }, max_n);
  return out;
}

// ---------------------------------------------------------------------------
// Tail configurations

using Entry = std::pair<int, int>;  // (position, value)

struct TailConfiguration {
  int k = 0;
  int source_length = 0;
  std::vector<std::vector<Entry>> boxes;  // psi_1..psi_k, each sorted by position

  int box_size(int i) const { return static_cast<int>(boxes.at(static_cast<size_t>(i - 1)).size()); }
  int total_size() const {
    int t = 0;
    for (const auto& b : boxes) t += static_cast<int>(b.size());
    return t;
  }

  // Relative-order normal form: positions and values of the box union are
  // renumbered 1..|union|, box membership kept. Configurations of equal k
  // compare as equivalence-class keys through this.
  TailConfiguration normal_form() const {
    std::vector<int> positions, values;
    for (const auto& b : boxes)
      for (const auto& [p, v] : b) {
        positions.push_back(p);
        values.push_back(v);
      }
    std::sort(positions.begin(), positions.end());
    std::sort(values.begin(), values.end());
    auto rank = [](const std::vector<int>& sorted, int x) {
      return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) + 1;
    };
    TailConfiguration nf;
    nf.k = k;
    nf.source_length = static_cast<int>(positions.size());
    nf.boxes.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
      for (const auto& [p, v] : boxes[static_cast<size_t>(i)])
        nf.boxes[static_cast<size_t>(i)].push_back({rank(positions, p), rank(values, v)});
    return nf;
  }

  std::string key() const {
    std::ostringstream os;
    os << k;
    for (const auto& b : boxes) {
      os << '|';
      for (const auto& [p, v] : b) os << p << ',' << v << ';';
    }
    return os.str();
  }

  bool operator==(const TailConfiguration& o) const { return k == o.k && boxes == o.boxes; }
};

// The k-box decomposition. psi_1 = entries strictly right of the rightmost
// descent (everything when there is none); psi_2 = entries outside psi_1
// whose value exceeds some psi_1 value; then inductively phi_{2i} = entries
// outside earlier boxes inverted by a later entry, psi_{2i-1} = entries
// outside earlier boxes positioned after every phi_{2i} entry, and psi_{2i} =
// phi_{2i} entries exceeding some psi_{2i-1} value. When phi_{2i} is empty
// all later boxes stay empty.
inline TailConfiguration tail_configuration(const Permutation& perm, int k) {
  if (k < 1) throw std::invalid_argument("tail_configuration: k must be >= 1");
  if (!is_321_avoiding(perm)) throw std::invalid_argument("tail_configuration: permutation contains 321");
  int n = perm.size();
  TailConfiguration cfg;
  cfg.k = k;
  cfg.source_length = n;
  cfg.boxes.resize(static_cast<size_t>(k));

  std::vector<bool> assigned(static_cast<size_t>(n) + 1, false);
  auto put = [&](int box, int pos) {
    cfg.boxes[static_cast<size_t>(box - 1)].push_back({pos, perm.at(pos)});
    assigned[static_cast<size_t>(pos)] = true;
  };

  int rd = rightmost_descent(perm);
  for (int p = rd + 1; p <= n; ++p) put(1, p);

  if (k >= 2) {
    int min_psi1 = perm.at(rd + 1);  // psi_1 is increasing; its first entry is minimal
    for (int p = 1; p <= rd; ++p)
      if (perm.at(p) > min_psi1) put(2, p);
  }

  // has_later_smaller[p]: some entry after p has a smaller value
  std::vector<int> suffix_min(static_cast<size_t>(n) + 2, n + 1);
  for (int p = n; p >= 1; --p) suffix_min[static_cast<size_t>(p)] = std::min(suffix_min[static_cast<size_t>(p) + 1], perm.at(p));

  for (int i = 2; 2 * i - 1 <= k; ++i) {
    std::vector<int> phi;  // positions, ascending
    for (int p = 1; p <= n; ++p)
      if (!assigned[static_cast<size_t>(p)] && suffix_min[static_cast<size_t>(p) + 1] < perm.at(p)) phi.push_back(p);
    if (phi.empty()) break;

    int odd_box = 2 * i - 1;
    int max_phi_pos = phi.back();
    int min_odd_val = n + 1;
    for (int p = max_phi_pos + 1; p <= n; ++p)
      if (!assigned[static_cast<size_t>(p)]) {
        put(odd_box, p);
        min_odd_val = std::min(min_odd_val, perm.at(p));
      }

    if (2 * i <= k && min_odd_val <= n) {
      for (int p : phi)
        if (perm.at(p) > min_odd_val) put(2 * i, p);
    }
  }
  return cfg;
}

// Configuration of perm (+) slot. For R the update is local; otherwise the
// boxes are recomputed on the standalone pattern formed by the box union,
// which the commuting-square tests check against full recomputation.
inline TailConfiguration tail_insert(const TailConfiguration& cfg, const InsertionSlot& slot, int new_value) {
  int n = cfg.source_length;
  int m = cfg.box_size(1);
  if (new_value != n + 1) throw std::invalid_argument("tail_insert: new value must be source_length + 1");
  if (!slot.is_r() && (slot.pj < 1 || slot.pj > m)) throw std::invalid_argument("tail_insert: slot inconsistent with |psi_1|");

  if (slot.is_r()) {
    if (slot.position != n + 1) throw std::invalid_argument("tail_insert: R slot must be terminal");
    TailConfiguration out = cfg;
    out.source_length = n + 1;
    out.boxes[0].push_back({n + 1, n + 1});
    return out;
  }

  // absolute position of the new entry: just left of psi_1's j-th element
  const auto& psi1 = cfg.boxes[0];
  int abs_pos = psi1[static_cast<size_t>(slot.pj - 1)].first;
  if (slot.position != abs_pos) throw std::invalid_argument("tail_insert: slot position inconsistent with configuration");

  // Build the union pattern, insert the new maximum, recompute boxes there.
  std::vector<Entry> uni;
  for (const auto& b : cfg.boxes) uni.insert(uni.end(), b.begin(), b.end());
  std::sort(uni.begin(), uni.end());
  int u = static_cast<int>(uni.size());
  std::vector<int> sorted_vals;
  for (const auto& [p, v] : uni) sorted_vals.push_back(v);
  std::sort(sorted_vals.begin(), sorted_vals.end());
  auto vrank = [&](int x) {
    return static_cast<int>(std::lower_bound(sorted_vals.begin(), sorted_vals.end(), x) - sorted_vals.begin()) + 1;
  };

  std::vector<int> pat;  // union pattern in one-line notation
  for (int idx = 0; idx < u; ++idx) pat.push_back(vrank(uni[static_cast<size_t>(idx)].second));
  // union entries at absolute positions >= abs_pos sit right of the new entry
  size_t insert_at = 0;
  while (insert_at < uni.size() && uni[insert_at].first < abs_pos) ++insert_at;
  pat.insert(pat.begin() + static_cast<long>(insert_at), u + 1);
  TailConfiguration local = tail_configuration(Permutation(std::move(pat)), cfg.k);

  // Map pattern coordinates back to absolute ones; pattern value u+1 is the
  // new entry, everything else indexes into `uni` (skipping the new slot).
  TailConfiguration out;
  out.k = cfg.k;
  out.source_length = n + 1;
  out.boxes.resize(static_cast<size_t>(cfg.k));
  for (int b = 0; b < cfg.k; ++b) {
    for (const auto& [pp, pv] : local.boxes[static_cast<size_t>(b)]) {
      if (pv == u + 1) {
        out.boxes[static_cast<size_t>(b)].push_back({abs_pos, n + 1});
      } else {
        int orig_idx = (pp - 1 < static_cast<int>(insert_at)) ? pp - 1 : pp - 2;
        const Entry& e = uni[static_cast<size_t>(orig_idx)];
        int abs_p = e.first >= abs_pos ? e.first + 1 : e.first;
        out.boxes[static_cast<size_t>(b)].push_back({abs_p, e.second});
      }
    }
    std::sort(out.boxes[static_cast<size_t>(b)].begin(), out.boxes[static_cast<size_t>(b)].end());
  }
  return out;
}

}  // namespace avperm
