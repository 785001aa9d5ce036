#pragma once

#include <string>

#include "hplab/arith.hpp"
#include "hplab/errors.hpp"

namespace hplab {

// P(n) = base + slope * n digits; each retry doubles the slope.
struct PrecisionPolicy {
  unsigned base = 60;
  unsigned slope = 12;
  int max_retries = 2;

  unsigned digits(int n, int retry = 0) const {
    return base + (slope << retry) * static_cast<unsigned>(n < 0 ? 0 : n);
  }
};

struct ResidualCertificate {
  int from_power = 0;  // vanishing claimed for powers from_power down to to_power
  int to_power = 0;
  unsigned digits = 0;         // precision of the solve
  unsigned verify_digits = 0;  // precision of the recombination
  BigReal max_residual = 0;    // relative to the sum of absolute terms
  BigReal threshold = 0;       // 10^(-P/3)
  int retries = 0;
  bool ok = false;
};

inline BigReal verification_threshold(unsigned digits) {
  return pow10(-static_cast<long>(digits) / 3);
}

// Runs attempt(P, retry) over the escalation ladder until its certificate
// passes; throws PrecisionExhausted with the last residual otherwise.
template <class Attempt>
auto solve_with_escalation(const PrecisionPolicy& policy, int n, Attempt&& attempt) {
  for (int r = 0;; ++r) {
    auto result = attempt(Precision{policy.digits(n, r)}, r);
    if (result.cert.ok) return result;
    if (r >= policy.max_retries)
      throw PrecisionExhausted("certificate failed after " + std::to_string(r) + " retries at " +
                               std::to_string(result.cert.digits) + " digits (residual " +
                               to_decimal(result.cert.max_residual, 6) + ", threshold " +
                               to_decimal(result.cert.threshold, 6) + ", or a null space unstable in precision)");
  }
}

}  // namespace hplab
