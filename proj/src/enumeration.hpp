#pragma once

#include <numeric>
#include <vector>

namespace cex::detail {

/// Calls fn once per size-k index combination of {0..n-1}, in lexicographic
/// order. fn returns false to abort; the function then returns false.
template <typename Fn>
bool for_each_combination(int n, int k, Fn&& fn) {
  if (k > n) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) return fn(idx);
  while (true) {
    if (!fn(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Mixed-radix odometer: fn per value tuple in lexicographic order; radixes
/// indexed by position. fn returns false to abort.
template <typename Fn>
bool for_each_tuple(const std::vector<int>& radixes, Fn&& fn) {
  std::vector<int> tuple(radixes.size(), 0);
  while (true) {
    if (!fn(tuple)) return false;
    int pos = static_cast<int>(radixes.size()) - 1;
    while (pos >= 0) {
      auto& d = tuple[static_cast<std::size_t>(pos)];
      if (++d < radixes[static_cast<std::size_t>(pos)]) break;
      d = 0;
      --pos;
    }
    if (pos < 0) return true;
  }
}

}  // namespace cex::detail
