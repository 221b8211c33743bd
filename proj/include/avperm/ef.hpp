#pragma once

// Ehrenfeucht–Fraisse games on finite relational structures with binary
// relations, and k-elementary-equivalence classification built on them.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "avperm/perm.hpp"

namespace avperm {

struct RelationalStructure {
  int n = 0;
  std::vector<std::string> relation_names;
  std::vector<std::vector<bool>> relations;  // one n*n row-major matrix per name

  bool rel(int r, int a, int b) const { return relations[static_cast<size_t>(r)][static_cast<size_t>((a - 1) * n + (b - 1))]; }

  // single strict linear order "<" on 1..n — the only case where game values
  // depend just on the gap profile of the chosen tuples
  bool is_plain_linear_order() const {
    if (relation_names.size() != 1 || relation_names[0] != "<") return false;
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b)
        if (rel(0, a, b) != (a < b)) return false;
    return true;
  }
};

inline RelationalStructure permutation_structure(const Permutation& perm) {
  RelationalStructure s;
  s.n = perm.size();
  s.relation_names = {"<P", "<V"};
  s.relations.assign(2, std::vector<bool>(static_cast<size_t>(s.n) * static_cast<size_t>(s.n), false));
  for (int a = 1; a <= s.n; ++a)
    for (int b = 1; b <= s.n; ++b) {
      size_t idx = static_cast<size_t>((a - 1) * s.n + (b - 1));
      s.relations[0][idx] = a < b;
      s.relations[1][idx] = perm.at(a) < perm.at(b);
    }
  return s;
}

inline RelationalStructure linear_order_structure(int n) {
  if (n < 1) throw std::invalid_argument("linear_order_structure: n must be >= 1");
  RelationalStructure s;
  s.n = n;
  s.relation_names = {"<"};
  s.relations.assign(1, std::vector<bool>(static_cast<size_t>(n) * static_cast<size_t>(n), false));
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) s.relations[0][static_cast<size_t>((a - 1) * n + (b - 1))] = a < b;
  return s;
}

using PartialMap = std::vector<std::pair<int, int>>;

// Well-defined injective map preserving every relation both ways.
inline bool partial_isomorphism(const RelationalStructure& A, const RelationalStructure& B, const PartialMap& map) {
  if (A.relation_names != B.relation_names) throw std::invalid_argument("partial_isomorphism: relation names differ");
  for (size_t i = 0; i < map.size(); ++i) {
    for (size_t j = 0; j < map.size(); ++j) {
      const auto& [ai, bi] = map[i];
      const auto& [aj, bj] = map[j];
      if (ai == aj && bi != bj) return false;
      if (bi == bj && ai != aj) return false;
      for (size_t r = 0; r < A.relation_names.size(); ++r)
        if (A.rel(static_cast<int>(r), ai, aj) != B.rel(static_cast<int>(r), bi, bj)) return false;
    }
  }
  return true;
}

// Memoized minimax for EF_k[A,B]. Positions are keyed by the set of chosen
// pairs (their order is irrelevant to the rest of the game) plus rounds left;
// for plain linear orders the key is the gap profile instead, which
// identifies translated positions without assuming anything about thresholds.
class EfSolver {
 public:
  EfSolver(const RelationalStructure& a, const RelationalStructure& b) : a_(a), b_(b) {
    if (a.relation_names != b.relation_names) throw std::invalid_argument("EfSolver: relation names differ");
    linear_ = a.is_plain_linear_order() && b.is_plain_linear_order();
  }

  bool duplicator_wins(int rounds) {
    if (rounds < 0) throw std::invalid_argument("EfSolver: rounds must be >= 0");
    PartialMap empty;
    return wins(empty, rounds);
  }

 private:
  bool extend_ok(const PartialMap& map, int x, int y) const {
    for (const auto& [ai, bi] : map) {
      if (ai == x && bi != y) return false;
      if (bi == y && ai != x) return false;
      if (ai == x && bi == y) return true;
      for (size_t r = 0; r < a_.relation_names.size(); ++r) {
        int ri = static_cast<int>(r);
        if (a_.rel(ri, ai, x) != b_.rel(ri, bi, y)) return false;
        if (a_.rel(ri, x, ai) != b_.rel(ri, y, bi)) return false;
      }
    }
    for (size_t r = 0; r < a_.relation_names.size(); ++r)
      if (a_.rel(static_cast<int>(r), x, x) != b_.rel(static_cast<int>(r), y, y)) return false;
    return true;
  }

  std::string memo_key(const PartialMap& map, int rounds) const {
    PartialMap sorted = map;
    std::sort(sorted.begin(), sorted.end());
    std::string key;
    key.push_back(static_cast<char>(rounds));
    if (linear_) {
      // gap profile: (#unchosen before/between/after) on each side
      int prev_a = 0, prev_b = 0;
      for (const auto& [x, y] : sorted) {
        key.push_back(static_cast<char>(x - prev_a - 1));
        key.push_back(static_cast<char>(y - prev_b - 1));
        prev_a = x;
        prev_b = y;
      }
      key.push_back(static_cast<char>(a_.n - prev_a));
      key.push_back(static_cast<char>(b_.n - prev_b));
    } else {
      for (const auto& [x, y] : sorted) {
        key.push_back(static_cast<char>(x));
        key.push_back(static_cast<char>(y));
      }
    }
    return key;
  }

  // map is assumed consistent (a partial isomorphism) on entry
  bool wins(const PartialMap& map, int rounds) {
    if (rounds == 0) return true;
    std::string key = memo_key(map, rounds);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    bool result = true;
    // spoiler side 0: pick x in A, duplicator answers y in B; side 1 mirrored
    for (int side = 0; side < 2 && result; ++side) {
      int spoiler_n = side == 0 ? a_.n : b_.n;
      for (int x = 1; x <= spoiler_n && result; ++x) {
        bool reply_found = false;
        int dup_n = side == 0 ? b_.n : a_.n;
        for (int y = 1; y <= dup_n && !reply_found; ++y) {
          int xa = side == 0 ? x : y;
          int yb = side == 0 ? y : x;
          if (!extend_ok(map, xa, yb)) continue;
          PartialMap next = map;
          next.push_back({xa, yb});
          if (wins(next, rounds - 1)) reply_found = true;
        }
        if (!reply_found) result = false;
      }
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  const RelationalStructure& a_;
  const RelationalStructure& b_;
  bool linear_ = false;
  std::unordered_map<std::string, bool> memo_;
};

inline bool ef_win(const RelationalStructure& a, const RelationalStructure& b, int rounds) {
  return EfSolver(a, b).duplicator_wins(rounds);
}

// Partition by the equivalence closure of ef_win(.,.,k), comparing each
// structure to existing class representatives only. Returns the class index
// per structure.
inline std::vector<int> equiv_classes(const std::vector<RelationalStructure>& structures, int k) {
  std::vector<int> cls(structures.size(), -1);
  std::vector<size_t> reps;
  for (size_t i = 0; i < structures.size(); ++i) {
    for (size_t c = 0; c < reps.size(); ++c) {
      if (ef_win(structures[i], structures[reps[c]], k)) {
        cls[i] = static_cast<int>(c);
        break;
      }
    }
    if (cls[i] < 0) {
      cls[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }
  return cls;
}

}  // namespace avperm
