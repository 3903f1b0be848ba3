#include "flagcalc/algebra.hpp"

#include <algorithm>
#include <numeric>

namespace flagcalc {

void prune_zeros(AlgebraElement& a) {
  std::erase_if(a.coeffs, [](const auto& kv) { return kv.second == 0; });
}

Rational dot(const AlgebraElement& a, const std::vector<Rational>& basis_values) {
  Rational s = 0;
  for (const auto& [i, c] : a.coeffs) {
    if (i >= basis_values.size()) throw input_error("coefficient index outside the basis");
    s += c * basis_values[i];
  }
  return s;
}

Calculator::Calculator(Theory theory, Limits limits)
    : theory_(std::move(theory)), limits_(limits) {}

std::string Calculator::sigma_key(const Model& sigma) {
  validate_model(theory_, sigma);
  return encode(theory_, sigma, sigma.n);
}

const FlagBasis& Calculator::basis(const Model& sigma, int level) {
  const auto key = std::make_pair(sigma_key(sigma), level);
  {
    std::lock_guard lock(mutex_);
    auto it = bases_.find(key);
    if (it != bases_.end()) return it->second;
  }
  TypeSigma type(theory_, sigma, limits_);
  FlagBasis computed = enumerate_flags(theory_, type, level, limits_);
  std::lock_guard lock(mutex_);
  return bases_.emplace(key, std::move(computed)).first->second;
}

AlgebraElement Calculator::zero(const Model& sigma, int level) {
  basis(sigma, level);  // validates the type and level
  return AlgebraElement{sigma, level, {}};
}

AlgebraElement Calculator::from_flag(const Flag& flag) {
  const Flag checked = make_flag(theory_, flag.model, flag.root_size, limits_);
  Model sigma = root_of(theory_, checked);
  const FlagBasis& b = basis(sigma, checked.model.n);
  AlgebraElement out{std::move(sigma), checked.model.n, {}};
  out.coeffs[classify(theory_, b, checked.model, limits_)] = 1;
  return out;
}

AlgebraElement Calculator::unit(const Model& sigma) {
  basis(sigma, sigma.n);  // the singleton basis {sigma}
  AlgebraElement out{sigma, sigma.n, {}};
  out.coeffs[0] = 1;
  return out;
}

AlgebraElement Calculator::lift(const AlgebraElement& a, int level) {
  if (level < a.level) throw input_error("cannot lift below the element's level");
  if (level == a.level) {
    AlgebraElement out = a;
    prune_zeros(out);
    return out;
  }
  const LiftTable& table = lift_table(a.sigma, a.level, level);
  AlgebraElement out{a.sigma, level, {}};
  for (const auto& [i, c] : a.coeffs) {
    if (i >= table.size()) throw input_error("coefficient index outside the basis");
    for (std::size_t j = 0; j < table[i].size(); ++j)
      if (table[i][j] != 0) out.coeffs[j] += c * table[i][j];
  }
  prune_zeros(out);
  return out;
}

AlgebraElement Calculator::scale(const Rational& c, AlgebraElement a) {
  for (auto& [i, v] : a.coeffs) v *= c;
  prune_zeros(a);
  return a;
}

AlgebraElement Calculator::combine(const Rational& ca, const AlgebraElement& a, const Rational& cb,
                                   const AlgebraElement& b) {
  if (!(a.sigma == b.sigma)) throw input_error("cannot combine elements over different types");
  const int level = std::max(a.level, b.level);
  AlgebraElement out = lift(a, level);
  for (auto& [i, v] : out.coeffs) v *= ca;
  const AlgebraElement lb = lift(b, level);
  for (const auto& [i, v] : lb.coeffs) out.coeffs[i] += cb * v;
  prune_zeros(out);
  return out;
}

AlgebraElement Calculator::multiply(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.sigma == b.sigma)) throw input_error("cannot multiply elements over different types");
  const ProductTable& table = product_table(a.sigma, a.level, b.level);
  AlgebraElement out{a.sigma, a.level + b.level - a.sigma.n, {}};
  for (const auto& [i, ci] : a.coeffs)
    for (const auto& [j, cj] : b.coeffs) {
      const auto it = table.cols.find({i, j});
      if (it == table.cols.end()) continue;  // joint density identically zero
      const Rational cij = Rational(ci * cj);
      for (const auto& [g, p] : it->second) out.coeffs[g] += cij * p;
    }
  prune_zeros(out);
  return out;
}

AlgebraElement Calculator::average(const AlgebraElement& a, int new_root) {
  const int k = a.sigma.n;
  if (new_root < 0 || new_root > k) throw input_error("averaging target outside the root");
  if (new_root == k) {
    AlgebraElement out = a;
    prune_zeros(out);
    return out;
  }
  std::vector<int> keep(new_root);
  std::iota(keep.begin(), keep.end(), 0);
  Model sigma2 = new_root == 0 ? make_empty_model(theory_, 0)
                               : induced_submodel(theory_, a.sigma, keep);
  const FlagBasis& src = basis(a.sigma, a.level);
  const FlagBasis& dst = basis(sigma2, a.level);
  AlgebraElement out{std::move(sigma2), a.level, {}};
  for (const auto& [i, c] : a.coeffs) {
    if (i >= src.size()) throw input_error("coefficient index outside the basis");
    const Flag& flag = src.flags[i];
    const Rational q = averaging_factor(theory_, flag, new_root, limits_);
    out.coeffs[classify(theory_, dst, flag.model, limits_)] += c * q;
  }
  prune_zeros(out);
  return out;
}

bool Calculator::equal(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.sigma == b.sigma)) return false;
  const int level = std::max(a.level, b.level);
  return lift(a, level).coeffs == lift(b, level).coeffs;
}

std::vector<Rational> Calculator::evaluate_basis(const RootedKernel& kernel, int level) {
  check_kernel_shape(theory_, kernel.base);
  const int k = kernel.root_size();
  const int q = kernel.base.num_types();
  if (static_cast<int>(kernel.root_types.size()) != k)
    throw input_error("root types do not match the root size");
  for (int t : kernel.root_types)
    if (t < 0 || t >= q) throw input_error("root type out of range");
  if (level < k) throw input_error("evaluation level below the root size");

  const FlagBasis& b = basis(kernel.sigma, level);
  const EvalTable& table = eval_table(kernel.sigma, level);
  const int free = level - k;

  std::vector<std::vector<int>> slot_verts(table.slots.size());
  for (std::size_t s = 0; s < table.slots.size(); ++s)
    colex_unrank(table.slots[s].rank, table.slots[s].arity, slot_verts[s]);

  std::vector<Rational> out(b.size(), Rational(0));
  std::vector<const std::vector<Rational>*> rows(table.slots.size());
  std::vector<Rational> path(table.slots.size() + 1);
  std::vector<int> vtypes(level);
  for (int v = 0; v < k; ++v) vtypes[v] = kernel.root_types[v];

  const auto sweep = [&](auto&& self, std::size_t depth, std::uint64_t state) -> void {
    if (depth == table.slots.size()) {
      const std::uint32_t cls = table.classes[state];
      if (cls == UINT32_MAX)
        throw consistency_error("kernel assigns positive probability outside the theory");
      out[cls] += path[depth];
      return;
    }
    const auto& row = *rows[depth];
    for (std::uint32_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0) continue;
      path[depth + 1] = path[depth] * row[c];
      self(self, depth + 1, state + c * table.slots[depth].place);
    }
  };

  // Exchangeability: the class-weighted outcome mass is invariant under
  // permuting the free-vertex types, so sorted assignments weighted by
  // multinomial coefficients cover all q^free assignments.
  const Integer free_fact = factorial(free);
  std::vector<int> assign(free, 0);
  std::vector<int> tup_types;
  for (;;) {
    Integer mult = free_fact;
    int run = 1;
    for (int j = 1; j < free; ++j) {
      if (assign[j] == assign[j - 1]) {
        ++run;
      } else {
        mult /= factorial(run);
        run = 1;
      }
    }
    if (free > 0) mult /= factorial(run);
    Rational weight{mult};
    for (int j = 0; j < free; ++j) weight *= kernel.base.weights[assign[j]];
    if (weight != 0) {
      for (int j = 0; j < free; ++j) vtypes[k + j] = assign[j];
      for (std::size_t s = 0; s < table.slots.size(); ++s) {
        const int arity = table.slots[s].arity;
        tup_types.resize(arity);
        for (int pos = 0; pos < arity; ++pos) tup_types[pos] = vtypes[slot_verts[s][pos]];
        rows[s] = &kernel.base.distributions[arity][type_tuple_rank(q, tup_types)];
      }
      path[0] = std::move(weight);
      sweep(sweep, 0, 0);
    }
    if (free == 0) break;
    int j = free - 1;
    while (j >= 0 && assign[j] == q - 1) --j;
    if (j < 0) break;
    const int next = assign[j] + 1;
    for (int l = j; l < free; ++l) assign[l] = next;
  }
  return out;
}

Rational Calculator::evaluate(const RootedKernel& kernel, const AlgebraElement& a) {
  if (!(kernel.sigma == a.sigma)) throw input_error("element type does not match the kernel root");
  return dot(a, evaluate_basis(kernel, a.level));
}

Rational Calculator::evaluate(const RootedKernel& kernel, const Flag& flag) {
  return evaluate(kernel, from_flag(flag));
}

Rational Calculator::evaluate(const StepKernel& kernel, const AlgebraElement& a) {
  if (a.sigma.n != 0) throw input_error("unrooted evaluation needs an element over the empty type");
  return evaluate(unrooted(theory_, kernel), a);
}

Rational Calculator::evaluate(const StepKernel& kernel, const Flag& flag) {
  if (flag.root_size != 0) throw input_error("unrooted evaluation needs an unrooted flag");
  return evaluate(unrooted(theory_, kernel), from_flag(flag));
}

Rational Calculator::evaluate(const Ensemble& ensemble, const AlgebraElement& a) {
  if (!(ensemble.sigma == a.sigma)) throw input_error("element type does not match the ensemble");
  Rational s = 0;
  for (const auto& [w, member] : ensemble.members) s += w * evaluate(member, a);
  return s;
}

const Calculator::EvalTable& Calculator::eval_table(const Model& sigma, int level) {
  const auto key = std::make_pair(sigma_key(sigma), level);
  {
    std::lock_guard lock(mutex_);
    auto it = eval_tables_.find(key);
    if (it != eval_tables_.end()) return it->second;
  }
  const FlagBasis& b = basis(sigma, level);
  const int k = sigma.n;
  EvalTable t;
  for (int i = 1; i <= theory_.arity_bound(); ++i) {
    if (!theory_.has_arity(i)) continue;
    for (std::uint64_t r = choose(k, i); r < choose(level, i); ++r) {
      if (t.total_states > limits_.max_eval_states / theory_.color_count(i))
        throw resource_error("evaluation state space exceeds the configured cap");
      t.slots.push_back(EvalSlot{i, r, t.total_states});
      t.total_states *= theory_.color_count(i);
    }
  }
  t.classes.assign(t.total_states, UINT32_MAX);
  const int free = level - k;
  std::vector<int> newpos(level);
  for (int v = 0; v < k; ++v) newpos[v] = v;
  for (std::size_t idx = 0; idx < b.size(); ++idx) {
    for (const auto& pi : permutations_of(free)) {
      for (int j = 0; j < free; ++j) newpos[k + j] = k + pi[j];
      const Model m = apply_perm(theory_, b.flags[idx].model, newpos);
      std::uint64_t state = 0;
      for (const EvalSlot& s : t.slots)
        state += static_cast<std::uint64_t>(m.colors[s.arity][s.rank]) * s.place;
      std::uint32_t& cell = t.classes[state];
      if (cell != UINT32_MAX && cell != idx) throw consistency_error("outcome class collision");
      cell = static_cast<std::uint32_t>(idx);
    }
  }
  std::lock_guard lock(mutex_);
  return eval_tables_.emplace(key, std::move(t)).first->second;
}

const Calculator::LiftTable& Calculator::lift_table(const Model& sigma, int from_level,
                                                    int to_level) {
  const auto key = std::make_tuple(sigma_key(sigma), from_level, to_level);
  {
    std::lock_guard lock(mutex_);
    auto it = lift_tables_.find(key);
    if (it != lift_tables_.end()) return it->second;
  }
  const FlagBasis& src = basis(sigma, from_level);
  const FlagBasis& dst = basis(sigma, to_level);
  const int k = sigma.n;
  const int pick = from_level - k;
  const int free = to_level - k;
  const Rational denom{choose(free, pick)};
  LiftTable t(src.size(), std::vector<Rational>(dst.size(), Rational(0)));
  std::vector<int> verts(from_level);
  for (int v = 0; v < k; ++v) verts[v] = v;
  for (std::size_t j = 0; j < dst.size(); ++j) {
    const Model& host = dst.flags[j].model;
    std::vector<int> subset(pick);
    std::iota(subset.begin(), subset.end(), 0);
    do {
      for (int idx = 0; idx < pick; ++idx) verts[k + idx] = k + subset[idx];
      const std::size_t i = classify(theory_, src, induced_submodel(theory_, host, verts), limits_);
      t[i][j] += 1;
    } while (next_subset(subset, free));
    for (std::size_t i = 0; i < src.size(); ++i)
      if (t[i][j] != 0) t[i][j] /= denom;
  }
  std::lock_guard lock(mutex_);
  return lift_tables_.emplace(key, std::move(t)).first->second;
}

const Calculator::ProductTable& Calculator::product_table(const Model& sigma, int level_a,
                                                          int level_b) {
  const auto key = std::make_tuple(sigma_key(sigma), level_a, level_b);
  {
    std::lock_guard lock(mutex_);
    auto it = product_tables_.find(key);
    if (it != product_tables_.end()) return it->second;
  }
  const FlagBasis& ba = basis(sigma, level_a);
  const FlagBasis& bb = basis(sigma, level_b);
  const int k = sigma.n;
  const int full_level = level_a + level_b - k;
  const FlagBasis& full = basis(sigma, full_level);
  const int free = full_level - k;
  const int na = level_a - k;
  const Rational denom{choose(free, na)};

  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, std::uint64_t>> counts;
  std::vector<int> verts_a(level_a), verts_b(level_b);
  for (int v = 0; v < k; ++v) verts_a[v] = verts_b[v] = v;
  for (std::size_t g = 0; g < full.size(); ++g) {
    const Model& host = full.flags[g].model;
    std::vector<int> subset(na);
    std::iota(subset.begin(), subset.end(), 0);
    do {
      std::size_t pa = 0, pb = 0;
      for (int v = 0; v < free; ++v) {
        if (pa < subset.size() && subset[pa] == v)
          verts_a[k + pa++] = k + v;
        else
          verts_b[k + pb++] = k + v;
      }
      const std::size_t i =
          classify(theory_, ba, induced_submodel(theory_, host, verts_a), limits_);
      const std::size_t j =
          classify(theory_, bb, induced_submodel(theory_, host, verts_b), limits_);
      ++counts[{i, j}][g];
    } while (next_subset(subset, free));
  }
  ProductTable t;
  for (const auto& [ij, col] : counts) {
    auto& dest = t.cols[ij];
    dest.reserve(col.size());
    for (const auto& [g, c] : col) dest.emplace_back(g, Rational(c) / denom);
  }
  std::lock_guard lock(mutex_);
  return product_tables_.emplace(key, std::move(t)).first->second;
}

}  // namespace flagcalc
