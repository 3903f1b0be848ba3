#pragma once

#include <stdexcept>
#include <string>

namespace flagcalc {

// Malformed or mutually inconsistent user input (bad JSON, unknown fields,
// mismatched theories, out-of-range arguments).  CLI exit code 2.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation exceeds a configured size limit.  CLI exit code 3.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariants or cross-object consistency broken at run time
// (e.g. a kernel puts positive mass on models outside the theory).
// CLI exit code 3.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on an event of probability zero.
class conditioning_error : public consistency_error {
 public:
  using consistency_error::consistency_error;
};

}  // namespace flagcalc
