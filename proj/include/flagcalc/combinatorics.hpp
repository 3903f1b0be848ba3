#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flagcalc {

// Small exact binomial in machine words; callers stay far below overflow.
std::uint64_t choose(int n, int k);

// Increasing tuples are indexed in colex order: rank(s_0<...<s_{i-1}) =
// sum_j C(s_j, j+1).  All tuples whose maximum vertex is v occupy the
// contiguous rank range [C(v,i), C(v+1,i)), so a model's color data grows
// by appending one block per added vertex.  Every canonical-form, orderly
// enumeration and evaluation routine relies on that layout.
std::uint64_t colex_rank(std::span<const int> tuple);
void colex_unrank(std::uint64_t rank, int arity, std::vector<int>& out);

// All permutations of {0..n-1} in lexicographic order; perms[0] is id.
const std::vector<std::vector<int>>& permutations_of(int n);
int perm_lex_rank(std::span<const int> perm);

// Advance a sorted k-subset of {0..n-1}; false when exhausted.
bool next_subset(std::vector<int>& subset, int n);

}  // namespace flagcalc
