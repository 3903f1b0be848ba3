#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "flagcalc/builtin.hpp"
#include "flagcalc/canonical.hpp"
#include "flagcalc/enumerate.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/rng.hpp"

using namespace flagcalc;

namespace {

// Independent counting oracles: structures as bitmasks over an explicit
// slot list, one bit per tuple, orbits counted by minimizing the remapped
// mask over all relabelings.  No shared code with the library.

long count_graphs(int n, bool forbid_triangle) {
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) slots.emplace_back(a, b);
  const auto slot_of = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s] == std::pair{a, b}) return s;
    return slots.size();
  };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::uint64_t> classes;
  for (std::uint64_t mask = 0; mask < (1ULL << slots.size()); ++mask) {
    if (forbid_triangle) {
      bool tri = false;
      for (int a = 0; a < n && !tri; ++a)
        for (int b = a + 1; b < n && !tri; ++b)
          for (int c = b + 1; c < n && !tri; ++c)
            tri = (mask >> slot_of(a, b) & 1) && (mask >> slot_of(a, c) & 1) &&
                  (mask >> slot_of(b, c) & 1);
      if (tri) continue;
    }
    std::uint64_t best = ~0ULL;
    std::vector<int> p = perm;
    do {
      std::uint64_t remapped = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1) remapped |= 1ULL << slot_of(p[slots[s].first], p[slots[s].second]);
      best = std::min(best, remapped);
    } while (std::next_permutation(p.begin(), p.end()));
    classes.insert(best);
  }
  return static_cast<long>(classes.size());
}

long count_digraphs(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) slots.emplace_back(a, b);
  const auto slot_of = [&](int a, int b) {
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s] == std::pair{a, b}) return s;
    return slots.size();
  };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::uint64_t> classes;
  for (std::uint64_t mask = 0; mask < (1ULL << slots.size()); ++mask) {
    std::uint64_t best = ~0ULL;
    std::vector<int> p = perm;
    do {
      std::uint64_t remapped = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1) remapped |= 1ULL << slot_of(p[slots[s].first], p[slots[s].second]);
      best = std::min(best, remapped);
    } while (std::next_permutation(p.begin(), p.end()));
    classes.insert(best);
  }
  return static_cast<long>(classes.size());
}

long count_hypergraphs3(int n) {
  std::vector<std::array<int, 3>> slots;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) slots.push_back({a, b, c});
  const auto slot_of = [&](std::array<int, 3> t) {
    std::sort(t.begin(), t.end());
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s] == t) return s;
    return slots.size();
  };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::uint64_t> classes;
  for (std::uint64_t mask = 0; mask < (1ULL << slots.size()); ++mask) {
    std::uint64_t best = ~0ULL;
    std::vector<int> p = perm;
    do {
      std::uint64_t remapped = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1)
          remapped |= 1ULL << slot_of({p[slots[s][0]], p[slots[s][1]], p[slots[s][2]]});
      best = std::min(best, remapped);
    } while (std::next_permutation(p.begin(), p.end()));
    classes.insert(best);
  }
  return static_cast<long>(classes.size());
}

Model digraph_model(const Theory& theory, int n,
                    const std::vector<std::pair<int, int>>& arcs) {
  Model m = make_empty_model(theory, n);
  for (const auto& [u, v] : arcs) {
    const int a = std::min(u, v);
    const int b = std::max(u, v);
    const std::vector<int> sup{a, b};
    // ordering bits follow the lex rank of the support ordering:
    // (a,b) -> bit 0, (b,a) -> bit 1
    m.colors[2][colex_rank(sup)] |= (u < v) ? 1u : 2u;
  }
  return m;
}

Model hyper_model(const Theory& theory, int n, const std::vector<std::array<int, 3>>& triples) {
  Model m = make_empty_model(theory, n);
  for (std::array<int, 3> t : triples) {
    std::sort(t.begin(), t.end());
    m.colors[3][colex_rank(t)] = 1;
  }
  return m;
}

Model random_graph(const Theory& theory, int n, std::mt19937_64& eng) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (uniform_below(eng, 2)) edges.emplace_back(a, b);
  return builtin::graph(theory, n, edges);
}

}  // namespace

TEST_CASE("model counts match the bitmask oracle") {
  const Theory g = builtin::graphs();
  CHECK(enumerate_models(g, 0).size() == 1);
  CHECK(enumerate_models(g, 1).size() == 1);
  CHECK(enumerate_models(g, 2).size() == 2);
  CHECK(enumerate_models(g, 3).size() == 4);
  CHECK(enumerate_models(g, 4).size() == 11);
  CHECK(count_graphs(3, false) == 4);
  CHECK(count_graphs(4, false) == 11);

  const Theory tf = builtin::triangle_free_graphs();
  CHECK(enumerate_models(tf, 3).size() == 3);
  CHECK(static_cast<long>(enumerate_models(tf, 4).size()) == count_graphs(4, true));
  CHECK(count_graphs(4, true) == 7);

  const Theory d = builtin::digraphs();
  CHECK(static_cast<long>(enumerate_models(d, 2).size()) == count_digraphs(2));
  CHECK(static_cast<long>(enumerate_models(d, 3).size()) == count_digraphs(3));
  CHECK(count_digraphs(2) == 3);
  CHECK(count_digraphs(3) == 16);

  const Theory h = builtin::hypergraphs3();
  CHECK(enumerate_models(h, 3).size() == 2);
  CHECK(static_cast<long>(enumerate_models(h, 4).size()) == count_hypergraphs3(4));
  CHECK(count_hypergraphs3(4) == 5);
}

TEST_CASE("canonical form: idempotent, witnessed, relabeling-invariant") {
  const Theory g = builtin::graphs();
  std::mt19937_64 eng = make_engine({20240801, 7});
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(uniform_below(eng, 4));
    const Model m = random_graph(g, n, eng);

    const CanonicalModel c = canonical_form(g, m);
    CHECK(apply_perm(g, m, c.witness) == c.model);

    const CanonicalModel again = canonical_form(g, c.model);
    CHECK(again.model == c.model);
    CHECK(again.encoding == c.encoding);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), eng);
    const CanonicalModel shuffled = canonical_form(g, apply_perm(g, m, perm));
    CHECK(shuffled.model == c.model);
    CHECK(shuffled.encoding == c.encoding);
  }
}

TEST_CASE("isomorphism, with and without a fixed root prefix") {
  const Theory g = builtin::graphs();
  const Model p3 = builtin::graph(g, 3, {{0, 1}, {1, 2}});
  const Model p3b = builtin::graph(g, 3, {{0, 2}, {1, 2}});
  const Model k3 = builtin::graph(g, 3, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(isomorphic(g, p3, p3b));
  CHECK(!isomorphic(g, p3, k3));

  // same path, rooted once at the center and once at a leaf
  const Model center = builtin::graph(g, 3, {{0, 1}, {0, 2}});
  const Model leaf = builtin::graph(g, 3, {{0, 1}, {1, 2}});
  CHECK(isomorphic(g, center, leaf));
  CHECK(!isomorphic(g, center, leaf, 1));
  CHECK(isomorphic(g, center, center, 1));
}

TEST_CASE("digraph and hypergraph handling") {
  const Theory d = builtin::digraphs();
  const Model a01 = digraph_model(d, 2, {{0, 1}});
  const Model a10 = digraph_model(d, 2, {{1, 0}});
  const Model both = digraph_model(d, 2, {{0, 1}, {1, 0}});
  CHECK(isomorphic(d, a01, a10));
  CHECK(!(a01 == a10));
  CHECK(!isomorphic(d, a01, both));

  // directed 3-cycle vs transitive tournament: same arc count, not isomorphic
  const Model cyc = digraph_model(d, 3, {{0, 1}, {1, 2}, {2, 0}});
  const Model tt = digraph_model(d, 3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(!isomorphic(d, cyc, tt));

  const Theory h = builtin::hypergraphs3();
  const Model t1 = hyper_model(h, 4, {{0, 1, 2}});
  const Model t2 = hyper_model(h, 4, {{1, 2, 3}});
  CHECK(isomorphic(h, t1, t2));
  CHECK(!isomorphic(h, t1, hyper_model(h, 4, {{0, 1, 2}, {0, 1, 3}})));
}

TEST_CASE("forbidden substructures: hereditary and correctly detected") {
  const Theory tf = builtin::triangle_free_graphs();
  const Model c5 = builtin::graph(tf, 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  CHECK(satisfies_theory(tf, c5));
  CHECK(!satisfies_theory(tf, builtin::graph(tf, 3, {{0, 1}, {0, 2}, {1, 2}})));
  // a triangle hiding inside a larger model
  CHECK(!satisfies_theory(tf, builtin::graph(tf, 5, {{0, 2}, {2, 4}, {0, 4}, {1, 3}})));

  // every member of the enumeration satisfies the theory, and every
  // induced submodel's class appears at the smaller size
  std::set<std::string> small;
  for (const CanonicalModel& c : enumerate_models(tf, 3)) small.insert(c.encoding);
  for (const CanonicalModel& c : enumerate_models(tf, 4)) {
    CHECK(satisfies_theory(tf, c.model));
    std::vector<int> sub{0, 1, 2};
    do {
      const Model restricted = induced_submodel(tf, c.model, sub);
      CHECK(satisfies_theory(tf, restricted));
      CHECK(small.count(canonical_form(tf, restricted).encoding) == 1);
    } while (next_subset(sub, 4));
  }
}

TEST_CASE("restriction commutes with relabeling on the kept vertices") {
  const Theory g = builtin::graphs();
  std::mt19937_64 eng = make_engine({20240801, 8});
  for (int trial = 0; trial < 25; ++trial) {
    const Model m = random_graph(g, 6, eng);
    std::vector<int> sub{1, 3, 4};
    const Model direct = induced_submodel(g, m, sub);
    // relabel so that the kept vertices land in positions 0..2, in order
    std::vector<int> newpos(6);
    int next_kept = 0, next_rest = 3;
    for (int v = 0; v < 6; ++v)
      newpos[v] = std::count(sub.begin(), sub.end(), v) ? next_kept++ : next_rest++;
    std::vector<int> prefix{0, 1, 2};
    const Model via_perm = induced_submodel(g, apply_perm(g, m, newpos), prefix);
    CHECK(direct == via_perm);
  }
}

TEST_CASE("model validation rejects malformed shapes") {
  const Theory g = builtin::graphs();
  Model m = builtin::graph(g, 3, {{0, 1}});
  CHECK_NOTHROW(validate_model(g, m));

  Model short_colors = m;
  short_colors.colors[2].pop_back();
  CHECK_THROWS_AS(validate_model(g, short_colors), input_error);

  Model big_color = m;
  big_color.colors[2][0] = g.color_count(2);  // one past the valid range
  CHECK_THROWS_AS(validate_model(g, big_color), input_error);
}

TEST_CASE("encodings separate non-isomorphic models") {
  const Theory g = builtin::graphs();
  std::set<std::string> seen;
  for (const CanonicalModel& c : enumerate_models(g, 4)) seen.insert(c.encoding);
  CHECK(seen.size() == 11);
}
