#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sktlab {

/// Binomial coefficients up to n = 32, enough for dim 2n <= 20 exterior powers.
inline std::uint64_t binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 33>, 33> c{};
    for (int i = 0; i <= 32; ++i) {
      c[i][0] = 1;
      for (int j = 1; j <= i; ++j)
        c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
    return c;
  }();
  return table[n][k];
}

/// Strictly increasing multi-indices of length k over {0,...,n-1} in
/// lexicographic order, with rank/unrank.
class Combinations {
 public:
  Combinations(int n, int k) : n_(n), k_(k), count_(binom(n, k)) {}

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t count() const { return count_; }

  std::size_t rank(std::span<const int> idx) const {
    std::size_t r = 0;
    int prev = -1;
    for (int i = 0; i < k_; ++i) {
      for (int v = prev + 1; v < idx[i]; ++v) r += binom(n_ - 1 - v, k_ - 1 - i);
      prev = idx[i];
    }
    return r;
  }

  void unrank(std::size_t r, std::span<int> out) const {
    int v = 0;
    for (int i = 0; i < k_; ++i) {
      while (true) {
        const std::uint64_t block = binom(n_ - 1 - v, k_ - 1 - i);
        if (r < block) break;
        r -= block;
        ++v;
      }
      out[i] = v++;
    }
  }

  /// Writes the first combination (0,1,...,k-1). Returns false when k > n.
  bool first(std::span<int> idx) const {
    if (k_ > n_) return false;
    for (int i = 0; i < k_; ++i) idx[i] = i;
    return true;
  }

  /// Advances to the next combination in lex order; false when exhausted.
  bool next(std::span<int> idx) const {
    for (int i = k_ - 1; i >= 0; --i) {
      if (idx[i] < n_ - k_ + i) {
        ++idx[i];
        for (int j = i + 1; j < k_; ++j) idx[j] = idx[j - 1] + 1;
        return true;
      }
    }
    return false;
  }

 private:
  int n_, k_;
  std::size_t count_;
};

/// Sorts `idx` in place, returning the permutation sign (+1/-1), or 0 when a
/// repeated entry makes the wedge vanish.
inline int sort_with_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {  // insertion sort, tiny k
    int v = idx[i];
    std::size_t j = i;
    while (j > 0 && idx[j - 1] > v) {
      idx[j] = idx[j - 1];
      --j;
      sign = -sign;
    }
    idx[j] = v;
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

/// Merges two disjoint increasing index lists, returning merge sign and
/// writing the merged list; sign 0 when they share an index.
inline int merge_with_sign(std::span<const int> a, std::span<const int> b,
                           std::vector<int>& merged) {
  merged.clear();
  merged.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      merged.push_back(a[i++]);
    } else {
      // b[j] crosses the remaining entries of a
      if ((a.size() - i) % 2 == 1) sign = -sign;
      merged.push_back(b[j++]);
    }
  }
  while (i < a.size()) merged.push_back(a[i++]);
  while (j < b.size()) merged.push_back(b[j++]);
  return sign;
}

}  // namespace sktlab
