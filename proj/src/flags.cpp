#include "flagcalc/flags.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "flagcalc/enumerate.hpp"

namespace flagcalc {

namespace {

void check_common_root(const Theory& theory, const Flag& a, const Flag& b) {
  if (a.root_size != b.root_size) throw input_error("flags have different root sizes");
  if (root_of(theory, a) != root_of(theory, b))
    throw input_error("flags are rooted on different types");
}

// Subset-vs-pattern tester with a memo keyed on the labeled color data of
// the induced subset, so canonicalization runs once per distinct labeled
// form; density scans over large hosts see only a handful of forms.  When
// the joint color space of the pattern's tuples is small the memo is a
// flat mixed-radix table (the usual case: a few bits per subset), else a
// hash map on the packed colors.
class PatternMatcher {
 public:
  PatternMatcher(const Theory& theory, const Flag& pattern, const Limits& limits)
      : theory_(theory),
        limits_(limits),
        root_size_(pattern.root_size),
        size_(pattern.model.n),
        want_(canonical_form(theory, pattern.model, pattern.root_size, limits).encoding) {
    std::uint64_t states = 1;
    bool small = true;
    for (int i = 1; i <= theory.arity_bound(); ++i) {
      if (!theory.has_arity(i) || i > size_) continue;
      std::vector<int> pick(i);
      std::iota(pick.begin(), pick.end(), 0);
      do {
        slots_.push_back({i, pick, states});
        if (small) {
          states *= theory.color_count(i);
          small = states <= kFlatCap;
        }
      } while (next_subset(pick, size_));
      verts_.resize(std::max(verts_.size(), static_cast<std::size_t>(i)));
    }
    if (small) flat_.assign(states, 0);
  }

  // subset: sorted host vertices, root prefix included.
  bool matches(const Model& host, std::span<const int> subset) {
    if (!flat_.empty()) {
      std::uint64_t state = 0;
      for (const Slot& s : slots_) {
        for (int j = 0; j < s.arity; ++j) verts_[j] = subset[s.pick[j]];
        state += s.place *
                 host.colors[s.arity][colex_rank(std::span(verts_.data(), s.arity))];
      }
      std::uint8_t& cell = flat_[state];
      if (cell == 0) cell = decide(host, subset) ? 2 : 1;
      return cell == 2;
    }
    key_.clear();
    for (const Slot& s : slots_) {
      for (int j = 0; j < s.arity; ++j) verts_[j] = subset[s.pick[j]];
      const std::uint32_t c =
          host.colors[s.arity][colex_rank(std::span(verts_.data(), s.arity))];
      key_.push_back(static_cast<char>(c & 0xff));
      key_.push_back(static_cast<char>((c >> 8) & 0xff));
    }
    const auto it = memo_.find(key_);
    if (it != memo_.end()) return it->second;
    const bool ok = decide(host, subset);
    memo_.emplace(key_, ok);
    return ok;
  }

 private:
  static constexpr std::uint64_t kFlatCap = 1ull << 22;
  struct Slot {
    int arity;
    std::vector<int> pick;
    std::uint64_t place;  // mixed-radix place value (flat mode only)
  };

  bool decide(const Model& host, std::span<const int> subset) {
    const Model sub = induced_submodel(theory_, host, subset);
    return canonical_form(theory_, sub, root_size_, limits_).encoding == want_;
  }

  const Theory& theory_;
  const Limits& limits_;
  int root_size_;
  int size_;
  std::string want_;
  std::vector<Slot> slots_;
  std::string key_;
  std::vector<int> verts_;
  std::vector<std::uint8_t> flat_;
  std::unordered_map<std::string, bool> memo_;
};

// Shared counting core for subflag_density and empirical_density: how many
// (m-k)-subsets of the host's non-root vertices induce the pattern class.
// Returns (hits, total).
std::pair<Integer, Integer> count_pattern_subsets(const Theory& theory, const Flag& pattern,
                                                  const Model& host, int root_size,
                                                  const Limits& limits) {
  const int k = root_size;
  const int m = pattern.model.n;
  PatternMatcher matcher(theory, pattern, limits);
  Integer hits = 0;
  std::vector<int> pick(m - k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<int> subset(m);
  for (int j = 0; j < k; ++j) subset[j] = j;
  if (m == k) {
    return {matcher.matches(host, std::span<const int>(subset.data(), k)) ? 1 : 0, 1};
  }
  do {
    for (int j = 0; j < m - k; ++j) subset[k + j] = k + pick[j];
    if (matcher.matches(host, subset)) ++hits;
  } while (next_subset(pick, host.n - k));
  return {hits, binomial(host.n - k, m - k)};
}

}  // namespace

TypeSigma::TypeSigma(const Theory& theory, Model model, const Limits& limits) {
  validate_model(theory, model);
  if (model.n > limits.max_vertices) throw resource_error("type exceeds the size cap");
  if (!satisfies_theory(theory, model)) throw input_error("type violates the theory");
  model_ = std::move(model);
}

Flag make_flag(const Theory& theory, Model model, int root_size, const Limits& limits) {
  validate_model(theory, model);
  if (root_size < 0 || root_size > model.n) throw input_error("flag root size out of range");
  if (model.n > limits.max_vertices) throw resource_error("flag exceeds the size cap");
  if (!satisfies_theory(theory, model)) throw input_error("flag violates the theory");
  return Flag{std::move(model), root_size};
}

Model root_of(const Theory& theory, const Flag& flag) {
  std::vector<int> root(flag.root_size);
  std::iota(root.begin(), root.end(), 0);
  return induced_submodel(theory, flag.model, root);
}

FlagBasis enumerate_flags(const Theory& theory, const TypeSigma& sigma, int level,
                          const Limits& limits) {
  if (level < sigma.size()) throw input_error("flag level below the type size");
  FlagBasis basis;
  basis.sigma = sigma.model();
  basis.level = level;
  for (CanonicalModel& cm : enumerate_extensions(theory, sigma.model(), sigma.size(), level, limits)) {
    basis.index.emplace(cm.encoding, basis.flags.size());
    basis.flags.push_back(Flag{std::move(cm.model), sigma.size()});
  }
  return basis;
}

std::size_t classify(const Theory& theory, const FlagBasis& basis, const Model& flag_model,
                     const Limits& limits) {
  if (flag_model.n != basis.level)
    throw consistency_error("flag size does not match the basis level");
  const std::string key = canonical_form(theory, flag_model, basis.sigma.n, limits).encoding;
  const auto it = basis.index.find(key);
  if (it == basis.index.end())
    throw consistency_error("model is not a flag of this basis (root or theory mismatch)");
  return it->second;
}

Rational subflag_density(const Theory& theory, const Flag& fine, const Flag& coarse,
                         const Limits& limits) {
  check_common_root(theory, fine, coarse);
  if (fine.model.n > coarse.model.n) throw input_error("fine flag larger than coarse flag");
  const auto [hits, total] =
      count_pattern_subsets(theory, fine, coarse.model, coarse.root_size, limits);
  return Rational(hits) / Rational(total);
}

Rational joint_subflag_density(const Theory& theory, const Flag& a, const Flag& b,
                               const Flag& coarse, const Limits& limits) {
  check_common_root(theory, a, coarse);
  check_common_root(theory, b, coarse);
  const int k = coarse.root_size;
  const int free_count = coarse.model.n - k;
  const int na = a.model.n - k;
  const int nb = b.model.n - k;
  if (na + nb > free_count) throw input_error("joint density needs |a|+|b|-k <= |coarse|");
  const std::string want_a = canonical_form(theory, a.model, k, limits).encoding;
  const std::string want_b = canonical_form(theory, b.model, k, limits).encoding;

  Integer hits = 0;
  std::vector<int> pick_a(na);
  std::iota(pick_a.begin(), pick_a.end(), 0);
  std::vector<int> subset(std::max(a.model.n, b.model.n));
  for (int j = 0; j < k; ++j) subset[j] = j;
  // Ordered pairs of disjoint subsets, drawn in sequence: first the
  // a-part among all free vertices, then the b-part among the rest.
  do {
    for (int j = 0; j < na; ++j) subset[k + j] = k + pick_a[j];
    const Model sub_a =
        induced_submodel(theory, coarse.model, std::span<const int>(subset.data(), a.model.n));
    if (canonical_form(theory, sub_a, k, limits).encoding != want_a) continue;

    std::vector<int> rest;
    for (int v = 0; v < free_count; ++v)
      if (std::find(pick_a.begin(), pick_a.end(), v) == pick_a.end()) rest.push_back(v);
    std::vector<int> pick_b(nb);
    std::iota(pick_b.begin(), pick_b.end(), 0);
    do {
      for (int j = 0; j < nb; ++j) subset[k + j] = k + rest[pick_b[j]];
      std::sort(subset.begin() + k, subset.begin() + b.model.n);
      const Model sub_b =
          induced_submodel(theory, coarse.model, std::span<const int>(subset.data(), b.model.n));
      if (canonical_form(theory, sub_b, k, limits).encoding == want_b) ++hits;
    } while (nb > 0 && next_subset(pick_b, free_count - na));
  } while (na > 0 && next_subset(pick_a, free_count));

  const Integer total = binomial(free_count, na) * binomial(free_count - na, nb);
  return Rational(hits) / Rational(total);
}

Rational averaging_factor(const Theory& theory, const Flag& flag, int new_root,
                          const Limits& limits) {
  const int k = flag.root_size;
  const int n = flag.model.n;
  if (new_root < 0 || new_root > k) throw input_error("new root size out of range");
  if (new_root == k) return 1;
  const std::string want = canonical_form(theory, flag.model, k, limits).encoding;
  const int redraw = k - new_root;

  Integer good = 0;
  Integer total = 0;
  std::vector<int> pool(n - new_root);
  std::iota(pool.begin(), pool.end(), new_root);
  std::vector<int> pick(redraw);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<int> newpos(n);
  do {
    for (const std::vector<int>& order : permutations_of(redraw)) {
      ++total;
      // Root positions new_root..k-1 are re-drawn as pool[pick[order]];
      // everything else keeps its relative order behind the root.
      std::fill(newpos.begin(), newpos.end(), -1);
      for (int v = 0; v < new_root; ++v) newpos[v] = v;
      for (int j = 0; j < redraw; ++j) newpos[pool[pick[order[j]]]] = new_root + j;
      int next = k;
      for (int v = 0; v < n; ++v)
        if (newpos[v] < 0) newpos[v] = next++;
      const Model relabeled = apply_perm(theory, flag.model, newpos);
      if (canonical_form(theory, relabeled, k, limits).encoding == want) ++good;
    }
  } while (next_subset(pick, n - new_root));

  return Rational(good) / Rational(total);
}

Rational empirical_density(const Theory& theory, const Flag& pattern, const Model& host,
                           const Limits& limits) {
  const int k = pattern.root_size;
  if (host.n < pattern.model.n) throw input_error("host smaller than the pattern");
  std::vector<int> root(k);
  std::iota(root.begin(), root.end(), 0);
  if (induced_submodel(theory, host, root) != root_of(theory, pattern))
    throw input_error("host does not extend the pattern's root");
  const auto [hits, total] = count_pattern_subsets(theory, pattern, host, k, limits);
  return Rational(hits) / Rational(total);
}

Estimate empirical_density_mc(const Theory& theory, const Flag& pattern, const Model& host,
                              long subsets, SampleSeed seed, const Limits& limits) {
  const int k = pattern.root_size;
  const int m = pattern.model.n;
  if (subsets <= 0) throw input_error("subset sample count must be positive");
  if (host.n < m) throw input_error("host smaller than the pattern");
  std::vector<int> root(k);
  std::iota(root.begin(), root.end(), 0);
  if (induced_submodel(theory, host, root) != root_of(theory, pattern))
    throw input_error("host does not extend the pattern's root");

  PatternMatcher matcher(theory, pattern, limits);
  std::mt19937_64 eng = make_engine(seed);
  std::vector<int> free_vertices(host.n - k);
  std::iota(free_vertices.begin(), free_vertices.end(), k);
  std::vector<int> subset(m);
  for (int j = 0; j < k; ++j) subset[j] = j;

  long hits = 0;
  for (long t = 0; t < subsets; ++t) {
    // Partial Fisher-Yates: a uniform (m-k)-subset of the free vertices.
    for (int j = 0; j < m - k; ++j) {
      const std::size_t swap_with =
          j + static_cast<std::size_t>(uniform_below(eng, free_vertices.size() - j));
      std::swap(free_vertices[j], free_vertices[swap_with]);
      subset[k + j] = free_vertices[j];
    }
    std::sort(subset.begin() + k, subset.end());
    if (matcher.matches(host, subset)) ++hits;
  }

  Estimate est;
  est.value = Rational(hits, subsets);
  est.value.canonicalize();
  est.trials = subsets;
  const double p = est.value.get_d();
  est.stderr_ = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(subsets));
  return est;
}

}  // namespace flagcalc
