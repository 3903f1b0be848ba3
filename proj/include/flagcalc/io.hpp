#pragma once

#include <string>

#include "json.hpp"

#include "flagcalc/algebra.hpp"
#include "flagcalc/kernel.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/verifier.hpp"

// JSON interchange.  One wire format: objects with exactly the documented
// keys (unknown or missing keys are input errors) and rationals as "p/q"
// strings.  Emission is canonical: sorted keys, lowest terms, two-space
// indent, trailing newline — equal values serialize to identical bytes.
namespace flagcalc::io {

using nlohmann::json;

json parse(const std::string& text);
json load_file(const std::string& path);
std::string dump(const json& j);
void write_file(const std::string& path, const json& j);

// theory record: {name, arity_bound, predicates:[{name, arity, symmetric,
// diagonal: "constant-false"|"constant-true"}], forbidden:[model record]}
json theory_to_json(const Theory& theory);
Theory theory_from_json(const json& j);

// Parse the "theory" field of a file-level object.
Theory file_theory(const json& file);

// model record: {n, colors: {"<arity>": [{support: [1-based ascending],
// bits: {predicate: bool | [bool x arity!]}}]}}; non-symmetric bit arrays
// follow the lexicographic order of permutations of the sorted support.
json model_to_json(const Theory& theory, const Model& model);
Model model_from_json(const Theory& theory, const json& j);

// flag record: model record + root_size
json flag_to_json(const Theory& theory, const Flag& flag);
Flag flag_from_json(const Theory& theory, const json& j, const Limits& limits = {});

// element body: {sigma: model record, level, terms:[{flag: model record,
// coeff: "p/q"}]}; the file form adds a "theory" key.  Term flags are
// classified into the basis, summed, and pruned on parse.
json element_to_json(Calculator& calc, const AlgebraElement& a, bool with_theory);
AlgebraElement element_from_json(Calculator& calc, const json& j, bool with_theory);

// kernel file: {theory, types:[{name, weight:"p/q"}], distributions:
// {"<arity>": {"(name1,..,namei)": [{color, prob:"p/q"}]}}}; every ordered
// type tuple appears exactly once, rows list positive masses only and must
// sum to one, as must the type weights.
json kernel_to_json(const Theory& theory, const StepKernel& kernel, bool with_theory);
StepKernel kernel_from_json(const Theory& theory, const json& j, bool with_theory);

// rooted kernel file: {theory, kernel: kernel body, sigma: model record,
// root_types: [type names]}
json rooted_to_json(const Theory& theory, const RootedKernel& kernel);
RootedKernel rooted_from_json(const Theory& theory, const json& j, const Limits& limits = {});

// ensemble file: {theory, kernel: kernel body, sigma: model record,
// sigma_probability: "p/q", members:[{weight: "p/q", root_types:[names]}]}
json ensemble_to_json(const Theory& theory, const StepKernel& base, const Ensemble& ensemble);
Ensemble ensemble_from_json(const Theory& theory, const json& j, const Limits& limits = {});

// certificate file: {theory, target: element body over the empty type,
// terms:[{f: element body, c: "p/q"}], slack_basis:[{flag: flag record,
// coeff: "p/q"}]}; slack_basis is optional and omitted when empty.
json certificate_to_json(Calculator& calc, const Certificate& certificate);
Certificate certificate_from_json(Calculator& calc, const json& j);

// verification report: {check, verdict, residuals, seed, inputs}
json report_to_json(const CheckReport& report, json inputs);

}  // namespace flagcalc::io
