#include "flagcalc/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace flagcalc {

std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / j;
  return r;
}

std::uint64_t colex_rank(std::span<const int> tuple) {
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j) r += choose(tuple[j], static_cast<int>(j) + 1);
  return r;
}

void colex_unrank(std::uint64_t rank, int arity, std::vector<int>& out) {
  out.assign(arity, 0);
  for (int j = arity - 1; j >= 0; --j) {
    int v = j;  // smallest value with C(v, j+1) >= 1
    while (choose(v + 1, j + 1) <= rank) ++v;
    out[j] = v;
    rank -= choose(v, j + 1);
  }
}

const std::vector<std::vector<int>>& permutations_of(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> all;
  do {
    all.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return cache.emplace(n, std::move(all)).first->second;
}

int perm_lex_rank(std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (perm[j] < perm[i]) ++smaller;
    int f = 1;
    for (int j = 2; j <= n - 1 - i; ++j) f *= j;
    rank += smaller * f;
  }
  return rank;
}

bool next_subset(std::vector<int>& subset, int n) {
  const int k = static_cast<int>(subset.size());
  for (int i = k - 1; i >= 0; --i) {
    if (subset[i] < n - (k - i)) {
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace flagcalc
