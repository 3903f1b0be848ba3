#include "flagcalc/model.hpp"

#include <algorithm>
#include <set>

#include "flagcalc/canonical.hpp"

namespace flagcalc {

namespace {

constexpr int kMaxColorBits = 16;

int factorial_int(int n) {
  int f = 1;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

}  // namespace

Theory::Theory(std::string name, int arity_bound, std::vector<PredicateSpec> predicates,
               std::vector<Model> forbidden)
    : name_(std::move(name)),
      arity_bound_(arity_bound),
      predicates_(std::move(predicates)),
      forbidden_(std::move(forbidden)) {
  if (arity_bound_ < 1) throw input_error("arity_bound must be at least 1");
  bits_.assign(arity_bound_ + 1, 0);
  layout_.assign(arity_bound_ + 1, {});
  symmetric_mask_.assign(arity_bound_ + 1, 0);
  has_nonsymmetric_.assign(arity_bound_ + 1, false);
  std::set<std::string> names;
  for (int p = 0; p < static_cast<int>(predicates_.size()); ++p) {
    const PredicateSpec& spec = predicates_[p];
    if (spec.name.empty()) throw input_error("predicate with empty name");
    if (!names.insert(spec.name).second)
      throw input_error("duplicate predicate name '" + spec.name + "'");
    if (spec.arity < 1 || spec.arity > arity_bound_)
      throw input_error("predicate '" + spec.name + "' has arity outside [1, arity_bound]");
    if (spec.arity == 1 && !spec.symmetric)
      throw input_error("unary predicate '" + spec.name + "' must be symmetric");
    const int width = spec.symmetric ? 1 : factorial_int(spec.arity);
    const int offset = bits_[spec.arity];
    if (offset + width > kMaxColorBits)
      throw input_error("color table at arity " + std::to_string(spec.arity) +
                        " exceeds supported width");
    layout_[spec.arity].emplace_back(p, offset);
    if (spec.symmetric)
      symmetric_mask_[spec.arity] |= 1u << offset;
    else
      has_nonsymmetric_[spec.arity] = true;
    bits_[spec.arity] = offset + width;
  }
  compose_.assign(arity_bound_ + 1, {});
  for (int i = 2; i <= arity_bound_; ++i) {
    if (!has_nonsymmetric_[i]) continue;
    const auto& perms = permutations_of(i);
    const int f = static_cast<int>(perms.size());
    compose_[i].assign(f, std::vector<int>(f));
    std::vector<int> seq(i);
    for (int r = 0; r < f; ++r)
      for (int s = 0; s < f; ++s) {
        for (int j = 0; j < i; ++j) seq[j] = perms[r][perms[s][j]];
        compose_[i][r][s] = perm_lex_rank(seq);
      }
  }
  for (const Model& bad : forbidden_) validate_model(*this, bad);
}

std::uint32_t Theory::permute_color(int arity, std::uint32_t color,
                                    std::span<const int> relperm) const {
  if (!has_nonsymmetric_[arity]) return color;
  const int r = perm_lex_rank(relperm);
  if (r == 0) return color;
  std::uint32_t out = color & symmetric_mask_[arity];
  const auto& table = compose_[arity][r];
  for (const auto& [p, offset] : layout_[arity]) {
    if (predicates_[p].symmetric) continue;
    const int f = static_cast<int>(table.size());
    for (int pi = 0; pi < f; ++pi)
      out |= ((color >> (offset + table[pi])) & 1u) << (offset + pi);
  }
  return out;
}

bool same_theory(const Theory& a, const Theory& b) {
  if (a.name() != b.name() || a.arity_bound() != b.arity_bound()) return false;
  const auto& pa = a.predicates();
  const auto& pb = b.predicates();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i].name != pb[i].name || pa[i].arity != pb[i].arity ||
        pa[i].symmetric != pb[i].symmetric || pa[i].diagonal != pb[i].diagonal)
      return false;
  return a.forbidden() == b.forbidden();
}

Model make_empty_model(const Theory& theory, int n) {
  Model m;
  m.n = n;
  m.colors.resize(theory.arity_bound() + 1);
  for (int i = 1; i <= theory.arity_bound(); ++i)
    if (theory.has_arity(i)) m.colors[i].assign(choose(n, i), 0);
  return m;
}

void validate_model(const Theory& theory, const Model& model) {
  if (model.n < 0) throw input_error("negative vertex count");
  if (static_cast<int>(model.colors.size()) != theory.arity_bound() + 1)
    throw input_error("model color table does not match theory arities");
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    const std::uint64_t want = theory.has_arity(i) ? choose(model.n, i) : 0;
    if (model.colors[i].size() != want)
      throw input_error("model has wrong number of arity-" + std::to_string(i) + " colors");
    for (std::uint32_t c : model.colors[i])
      if (c >= theory.color_count(i))
        throw input_error("model color out of range at arity " + std::to_string(i));
  }
}

Model induced_submodel(const Theory& theory, const Model& model,
                       std::span<const int> vertices) {
  const int m = static_cast<int>(vertices.size());
  for (int j = 0; j < m; ++j) {
    if (vertices[j] < 0 || vertices[j] >= model.n)
      throw input_error("induced submodel vertex out of range");
    if (j > 0 && vertices[j] <= vertices[j - 1])
      throw input_error("induced submodel vertices must be sorted and distinct");
  }
  Model sub = make_empty_model(theory, m);
  std::vector<int> tuple, old_tuple;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i) || i > m) continue;
    const std::uint64_t count = choose(m, i);
    for (std::uint64_t r = 0; r < count; ++r) {
      colex_unrank(r, i, tuple);
      old_tuple.resize(i);
      for (int j = 0; j < i; ++j) old_tuple[j] = vertices[tuple[j]];
      // vertices is sorted, so the old tuple is already increasing and the
      // relative order is the identity: colors copy through unchanged.
      sub.colors[i][r] = model.colors[i][colex_rank(old_tuple)];
    }
  }
  return sub;
}

Model apply_perm(const Theory& theory, const Model& model, std::span<const int> newpos) {
  if (static_cast<int>(newpos.size()) != model.n)
    throw input_error("permutation size does not match model");
  Model out = make_empty_model(theory, model.n);
  std::vector<int> tuple, image, sorted, relperm;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    const std::uint64_t count = choose(model.n, i);
    for (std::uint64_t r = 0; r < count; ++r) {
      colex_unrank(r, i, tuple);
      image.resize(i);
      for (int j = 0; j < i; ++j) image[j] = newpos[tuple[j]];
      sorted = image;
      std::sort(sorted.begin(), sorted.end());
      relperm.resize(i);
      for (int j = 0; j < i; ++j)
        relperm[j] = static_cast<int>(
            std::find(image.begin(), image.end(), sorted[j]) - image.begin());
      out.colors[i][colex_rank(sorted)] =
          theory.permute_color(i, model.colors[i][r], relperm);
    }
  }
  return out;
}

std::string encode(const Theory& theory, const Model& model, int prefix) {
  if (model.n > 255) throw resource_error("model too large to encode");
  if (prefix < 0 || prefix > model.n) throw input_error("encode prefix out of range");
  std::string key;
  key.push_back(static_cast<char>(prefix));
  key.push_back(static_cast<char>(model.n));
  for (int v = 0; v < model.n; ++v) {
    for (int i = 1; i <= theory.arity_bound(); ++i) {
      if (!theory.has_arity(i)) continue;
      const int bytes = (theory.color_bits(i) + 7) / 8;
      // Tuples with maximum vertex v sit at colex ranks [C(v,i), C(v+1,i)).
      for (std::uint64_t r = choose(v, i); r < choose(v + 1, i); ++r) {
        const std::uint32_t c = model.colors[i][r];
        for (int b = bytes - 1; b >= 0; --b)
          key.push_back(static_cast<char>((c >> (8 * b)) & 0xff));
      }
    }
  }
  return key;
}

bool satisfies_theory(const Theory& theory, const Model& model) {
  for (const Model& bad : theory.forbidden()) {
    if (bad.n > model.n) continue;
    if (bad.n == 0) return false;  // forbidding the empty model rules out everything
    const std::string bad_key = canonical_form(theory, bad).encoding;
    std::vector<int> subset(bad.n);
    for (int j = 0; j < bad.n; ++j) subset[j] = j;
    do {
      const Model sub = induced_submodel(theory, model, subset);
      if (canonical_form(theory, sub).encoding == bad_key) return false;
    } while (next_subset(subset, model.n));
  }
  return true;
}

}  // namespace flagcalc
