#pragma once

#include <gmpxx.h>

#include <string>

#include "flagcalc/errors.hpp"

namespace flagcalc {

// All densities, coefficients and probabilities are exact rationals.
using Rational = mpq_class;
using Integer = mpz_class;

// Wire format: "p/q" in lowest terms with q > 0, or just "p" when q == 1.
// GMP's canonical form is exactly that, so formatting is get_str().
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw input_error("empty rational literal");
  mpq_class v;
  if (v.set_str(s, 10) != 0) throw input_error("bad rational literal '" + s + "'");
  if (v.get_den() == 0) throw input_error("zero denominator in rational '" + s + "'");
  v.canonicalize();
  return v;
}

inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Integer factorial(unsigned n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

}  // namespace flagcalc
