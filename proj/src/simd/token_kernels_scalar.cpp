#include <algorithm>
#include <cmath>

#include "sqlrl/simd/token_kernels.hpp"

namespace sqlrl::simd::scalar {

// Reference kernel. Every other ISA is tested against this one.
TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params) {
  TokenSums s;
  const double lo = 1.0 - params.epsilon;
  const double hi = 1.0 + params.epsilon;
  const double a = params.advantage;
  for (std::size_t t = 0; t < logp_new.size(); ++t) {
    double ratio = std::exp(logp_new[t] - logp_old[t]);
    if (ratio > params.ratio_ceiling) {
      ratio = params.ratio_ceiling;
      ++s.clamped;
    }
    s.surrogate += std::min(ratio * a, std::clamp(ratio, lo, hi) * a);
    const double d = logp_ref[t] - logp_new[t];
    s.kl += std::exp(d) - d - 1.0;
  }
  return s;
}

}  // namespace sqlrl::simd::scalar
