#pragma once

#include <stdexcept>
#include <string>

namespace hplab {

// Input is structurally degenerate: rank-deficient blocks, dependent
// triples, collinear branch points, zero denominators.
struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Verification still failed after the allowed precision retries.
struct PrecisionExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested on a cut, at a branch point, or at a pole.
struct BranchError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace hplab
