#include "flagcalc/enumerate.hpp"

#include <algorithm>

namespace flagcalc {

namespace {

// Colors assignable to the tuples a new vertex brings in: one mixed-radix
// counter over those tuples.
struct BlockCounter {
  std::vector<std::pair<int, std::uint64_t>> slots;  // (arity, colex rank)
  std::vector<std::uint32_t> digits;
  std::vector<std::uint32_t> radix;

  bool advance() {
    for (std::size_t j = 0; j < digits.size(); ++j) {
      if (++digits[j] < radix[j]) return true;
      digits[j] = 0;
    }
    return false;
  }
};

BlockCounter new_block(const Theory& theory, int m, const Limits& limits) {
  BlockCounter counter;
  std::uint64_t branch = 1;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i) || m < i) continue;
    for (std::uint64_t r = choose(m - 1, i); r < choose(m, i); ++r) {
      counter.slots.emplace_back(i, r);
      counter.radix.push_back(theory.color_count(i));
      branch *= theory.color_count(i);
      if (branch > limits.max_branch)
        throw resource_error("vertex extension branches beyond the configured cap");
    }
  }
  counter.digits.assign(counter.slots.size(), 0);
  return counter;
}

// Does any forbidden submodel appear among the subsets containing the
// newest vertex?  Older subsets were already vetted in the parent.
bool new_vertex_clean(const Theory& theory, const Model& child,
                      const std::vector<std::string>& forbidden_keys) {
  const int m = child.n;
  for (std::size_t f = 0; f < theory.forbidden().size(); ++f) {
    const Model& bad = theory.forbidden()[f];
    if (bad.n > m || bad.n == 0) continue;
    std::vector<int> rest(bad.n - 1);
    for (int j = 0; j < bad.n - 1; ++j) rest[j] = j;
    std::vector<int> subset(bad.n);
    for (;;) {
      std::copy(rest.begin(), rest.end(), subset.begin());
      subset[bad.n - 1] = m - 1;
      const Model sub = induced_submodel(theory, child, subset);
      if (canonical_form(theory, sub).encoding == forbidden_keys[f]) return false;
      if (bad.n == 1 || !next_subset(rest, m - 1)) break;
    }
  }
  return true;
}

}  // namespace

std::vector<CanonicalModel> enumerate_extensions(const Theory& theory, const Model& seed,
                                                 int fixed_prefix, int n,
                                                 const Limits& limits) {
  if (seed.n != fixed_prefix)
    throw input_error("extension seed must consist of exactly the fixed prefix");
  if (n < seed.n) throw input_error("target size below seed size");
  if (n > limits.max_vertices)
    throw resource_error("enumeration size " + std::to_string(n) +
                         " exceeds the configured cap of " + std::to_string(limits.max_vertices));
  validate_model(theory, seed);

  std::vector<std::string> forbidden_keys;
  forbidden_keys.reserve(theory.forbidden().size());
  for (const Model& bad : theory.forbidden())
    forbidden_keys.push_back(bad.n == 0 ? std::string() : canonical_form(theory, bad).encoding);

  std::vector<Model> current;
  if (satisfies_theory(theory, seed)) current.push_back(seed);

  for (int m = seed.n + 1; m <= n; ++m) {
    std::vector<Model> grown;
    BlockCounter counter = new_block(theory, m, limits);
    for (const Model& parent : current) {
      Model child = parent;
      child.n = m;
      for (int i = 1; i <= theory.arity_bound(); ++i)
        if (theory.has_arity(i)) child.colors[i].resize(choose(m, i), 0);
      std::fill(counter.digits.begin(), counter.digits.end(), 0);
      do {
        for (std::size_t j = 0; j < counter.slots.size(); ++j)
          child.colors[counter.slots[j].first][counter.slots[j].second] = counter.digits[j];
        if (!new_vertex_clean(theory, child, forbidden_keys)) continue;
        if (canonical_form(theory, child, fixed_prefix, limits).encoding ==
            encode(theory, child, fixed_prefix))
          grown.push_back(child);
      } while (counter.advance());
    }
    current = std::move(grown);
  }

  std::vector<CanonicalModel> result;
  result.reserve(current.size());
  for (Model& m : current) {
    CanonicalModel cm;
    cm.encoding = encode(theory, m, fixed_prefix);
    cm.witness.resize(m.n);
    for (int v = 0; v < m.n; ++v) cm.witness[v] = v;
    cm.model = std::move(m);
    result.push_back(std::move(cm));
  }
  std::sort(result.begin(), result.end(),
            [](const CanonicalModel& a, const CanonicalModel& b) { return a.encoding < b.encoding; });
  return result;
}

std::vector<CanonicalModel> enumerate_models(const Theory& theory, int n, const Limits& limits) {
  return enumerate_extensions(theory, make_empty_model(theory, 0), 0, n, limits);
}

}  // namespace flagcalc
