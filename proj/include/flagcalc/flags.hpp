#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flagcalc/canonical.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/rational.hpp"
#include "flagcalc/rng.hpp"

namespace flagcalc {

// A type: a fully labeled model, used as the common root of rooted flags.
// Distinct labelings are distinct types.  The empty type has size 0.
class TypeSigma {
 public:
  TypeSigma(const Theory& theory, Model model, const Limits& limits = {});
  const Model& model() const { return model_; }
  int size() const { return model_.n; }

 private:
  Model model_;
};

// A model with its first root_size vertices marked as the root.  The root
// substructure *is* the flag's type.  Isomorphisms between flags fix the
// root pointwise.
struct Flag {
  Model model;
  int root_size = 0;
};

// Validated construction from untrusted parts.
Flag make_flag(const Theory& theory, Model model, int root_size, const Limits& limits = {});

// The flag's type: the root substructure, relabeled 0..k-1.
Model root_of(const Theory& theory, const Flag& flag);

// All flags over one type at one level, canonically labeled and sorted by
// encoding; the coordinate system for algebra elements and evaluations.
struct FlagBasis {
  Model sigma;
  int level = 0;
  std::vector<Flag> flags;
  std::map<std::string, std::size_t> index;  // canonical encoding -> position

  std::size_t size() const { return flags.size(); }
};

FlagBasis enumerate_flags(const Theory& theory, const TypeSigma& sigma, int level,
                          const Limits& limits = {});

// Position of a flag's class inside a basis; consistency_error when the
// model is no flag of that basis (wrong size, wrong root, or outside the
// theory).
std::size_t classify(const Theory& theory, const FlagBasis& basis, const Model& flag_model,
                     const Limits& limits = {});

// Probability that a uniform (|fine|-k)-subset of the coarse flag's
// non-root vertices, together with the root, induces a flag isomorphic to
// `fine`.  Both flags must carry the identical root.
Rational subflag_density(const Theory& theory, const Flag& fine, const Flag& coarse,
                         const Limits& limits = {});

// Probability that two disjoint non-root subsets, drawn in sequence,
// induce flags isomorphic to `a` and `b` respectively.
Rational joint_subflag_density(const Theory& theory, const Flag& a, const Flag& b,
                               const Flag& coarse, const Limits& limits = {});

// Weight of the averaging (root-forgetting) operator from the flag's root
// down to new_root: the probability that re-drawing root positions
// new_root..k-1 uniformly (injectively, outside the kept prefix)
// reproduces a flag isomorphic to the original.
Rational averaging_factor(const Theory& theory, const Flag& flag, int new_root,
                          const Limits& limits = {});

// Exact density of `pattern` among all root-completing subsets of a host
// model whose first root_size vertices realize the same root verbatim.
Rational empirical_density(const Theory& theory, const Flag& pattern, const Model& host,
                           const Limits& limits = {});

struct Estimate {
  Rational value;
  double stderr_ = 0.0;
  long trials = 0;
};

// Unbiased subset-sampling estimate of the same density, reproducible per
// (seed, stream).
Estimate empirical_density_mc(const Theory& theory, const Flag& pattern, const Model& host,
                              long subsets, SampleSeed seed, const Limits& limits = {});

}  // namespace flagcalc
