#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace sqlrl::simd {

enum class KernelIsa { kScalar, kAvx2 };

std::string_view to_string(KernelIsa isa);

/// Best kernel the running CPU supports. SQLRL_FORCE_SCALAR=1 in the
/// environment pins the scalar reference.
KernelIsa active_isa();
bool isa_available(KernelIsa isa);

struct TokenSums {
  double surrogate = 0.0;  ///< sum over tokens of the clipped surrogate
  double kl = 0.0;         ///< sum over tokens of the KL estimator
  std::size_t clamped = 0;
};

struct TokenParams {
  double advantage = 0.0;
  double epsilon = 0.2;
  double ratio_ceiling = 1.0e4;
};

/// Reduces one candidate's tokens. Inputs must be finite and equal length.
TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params, KernelIsa isa);

namespace scalar {
TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params);
}

#if defined(SQLRL_HAVE_AVX2)
namespace avx2 {
TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params);
/// Lane-wise exp, exposed for equivalence testing.
void exp(std::span<const double> in, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace sqlrl::simd
