#include "flagcalc/canonical.hpp"

#include <algorithm>
#include <numeric>

namespace flagcalc {

namespace {

// One position of the canonical key: the arity and (new-label) support of
// a tuple.  The slot list depends only on (theory, n) and is reused across
// all relabelings of one search.
struct KeySlot {
  int arity;
  std::vector<int> verts;
};

std::vector<KeySlot> key_slots(const Theory& theory, int n) {
  std::vector<KeySlot> slots;
  std::vector<int> rest;
  for (int v = 0; v < n; ++v)
    for (int i = 1; i <= theory.arity_bound(); ++i) {
      if (!theory.has_arity(i) || v < i - 1) continue;
      const std::uint64_t count = choose(v, i - 1);
      for (std::uint64_t r = 0; r < count; ++r) {
        colex_unrank(r, i - 1, rest);
        KeySlot slot{i, rest};
        slot.verts.push_back(v);
        slots.push_back(std::move(slot));
      }
    }
  return slots;
}

// Key of the relabeled model with img[new] = old, written without
// materializing the relabeled model.  Must agree byte for byte with
// encode(apply_perm(model, inverse(img)), prefix).
void permuted_key(const Theory& theory, const Model& model, const std::vector<KeySlot>& slots,
                  std::span<const int> img, int prefix, std::string& out) {
  out.clear();
  out.push_back(static_cast<char>(prefix));
  out.push_back(static_cast<char>(model.n));
  std::vector<int> old_sorted, relperm;
  for (const KeySlot& slot : slots) {
    const int i = slot.arity;
    old_sorted.resize(i);
    for (int j = 0; j < i; ++j) old_sorted[j] = img[slot.verts[j]];
    std::sort(old_sorted.begin(), old_sorted.end());
    relperm.resize(i);
    for (int j = 0; j < i; ++j) {
      const int old_of_new = img[slot.verts[j]];
      relperm[j] = static_cast<int>(
          std::find(old_sorted.begin(), old_sorted.end(), old_of_new) - old_sorted.begin());
    }
    const std::uint32_t old_color = model.colors[i][colex_rank(old_sorted)];
    const std::uint32_t c = theory.permute_color(i, old_color, relperm);
    const int bytes = (theory.color_bits(i) + 7) / 8;
    for (int b = bytes - 1; b >= 0; --b)
      out.push_back(static_cast<char>((c >> (8 * b)) & 0xff));
  }
}

}  // namespace

CanonicalModel canonical_form(const Theory& theory, const Model& model, int fixed_prefix,
                              const Limits& limits) {
  if (fixed_prefix < 0 || fixed_prefix > model.n)
    throw input_error("canonical form prefix out of range");
  if (model.n > limits.max_vertices)
    throw resource_error("model with " + std::to_string(model.n) +
                         " vertices exceeds the canonicalization cap of " +
                         std::to_string(limits.max_vertices));
  const std::vector<KeySlot> slots = key_slots(theory, model.n);
  std::vector<int> img(model.n);
  std::iota(img.begin(), img.end(), 0);
  std::string best, cur;
  std::vector<int> best_img = img;
  do {
    permuted_key(theory, model, slots, img, fixed_prefix, cur);
    if (best.empty() || cur < best) {
      best = cur;
      best_img = img;
    }
  } while (std::next_permutation(img.begin() + fixed_prefix, img.end()));

  CanonicalModel result;
  result.witness.resize(model.n);
  for (int v = 0; v < model.n; ++v) result.witness[best_img[v]] = v;
  result.model = apply_perm(theory, model, result.witness);
  result.encoding = std::move(best);
  return result;
}

bool isomorphic(const Theory& theory, const Model& a, const Model& b, int fixed_prefix,
                const Limits& limits) {
  if (a.n != b.n) return false;
  if (a == b) return true;
  return canonical_form(theory, a, fixed_prefix, limits).encoding ==
         canonical_form(theory, b, fixed_prefix, limits).encoding;
}

}  // namespace flagcalc
