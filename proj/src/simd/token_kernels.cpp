#include "sqlrl/simd/token_kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "sqlrl/errors.hpp"

namespace sqlrl::simd {

std::string_view to_string(KernelIsa isa) { return isa == KernelIsa::kAvx2 ? "avx2" : "scalar"; }

bool isa_available(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::kScalar: return true;
    case KernelIsa::kAvx2:
#if defined(SQLRL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

KernelIsa active_isa() {
  static const KernelIsa chosen = [] {
    const char* force = std::getenv("SQLRL_FORCE_SCALAR");
    if (force && std::strcmp(force, "0") != 0 && *force) return KernelIsa::kScalar;
    return isa_available(KernelIsa::kAvx2) ? KernelIsa::kAvx2 : KernelIsa::kScalar;
  }();
  return chosen;
}

TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params, KernelIsa isa) {
  if (logp_new.size() != logp_old.size() || logp_new.size() != logp_ref.size()) {
    throw InvalidInput("token_sums: sequences of unequal length");
  }
#if defined(SQLRL_HAVE_AVX2)
  if (isa == KernelIsa::kAvx2) {
    if (!isa_available(KernelIsa::kAvx2)) throw InvalidInput("token_sums: AVX2 not supported on this CPU");
    return avx2::token_sums(logp_new, logp_old, logp_ref, params);
  }
#else
  if (isa == KernelIsa::kAvx2) throw InvalidInput("token_sums: built without AVX2 kernels");
#endif
  return scalar::token_sums(logp_new, logp_old, logp_ref, params);
}

}  // namespace sqlrl::simd
