#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "sqlrl/simd/token_kernels.hpp"

namespace sqlrl::simd::avx2 {

namespace {

// exp(x) = 2^n * exp(r), n = round(x / ln2), |r| <= ln2 / 2. exp(r) is a
// degree-13 Taylor polynomial (truncation error below 1e-17 relative).
// 2^n is applied in two halves so results in the subnormal and overflow
// ranges come out as 0 / inf like std::exp.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212E-6);

  x = _mm256_max_pd(_mm256_min_pd(x, _mm256_set1_pd(710.0)), _mm256_set1_pd(-746.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (std::size_t k = 1; k < std::size(kInvFact); ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[k]));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  const __m128i bias = _mm_set1_epi32(1023);
  const auto pow2 = [&](__m128i k) {
    const __m256i wide = _mm256_cvtepi32_epi64(_mm_add_epi32(k, bias));
    return _mm256_castsi256_pd(_mm256_slli_epi64(wide, 52));
  };
  return _mm256_mul_pd(_mm256_mul_pd(p, pow2(n1)), pow2(n2));
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

void exp(std::span<const double> in, std::span<double> out) {
  const std::size_t n = std::min(in.size(), out.size());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, exp_pd(_mm256_loadu_pd(in.data() + i)));
  if (i < n) {
    alignas(32) double buf[4] = {0, 0, 0, 0};
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(i), in.begin() + static_cast<std::ptrdiff_t>(n), buf);
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    std::copy(buf, buf + (n - i), out.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

TokenSums token_sums(std::span<const double> logp_new, std::span<const double> logp_old,
                     std::span<const double> logp_ref, const TokenParams& params) {
  const std::size_t n = logp_new.size();
  const __m256d a = _mm256_set1_pd(params.advantage);
  const __m256d lo = _mm256_set1_pd(1.0 - params.epsilon);
  const __m256d hi = _mm256_set1_pd(1.0 + params.epsilon);
  const __m256d ceiling = _mm256_set1_pd(params.ratio_ceiling);
  const __m256d one = _mm256_set1_pd(1.0);

  __m256d acc_s = _mm256_setzero_pd();
  __m256d acc_k = _mm256_setzero_pd();
  std::size_t clamped = 0;
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d ln = _mm256_loadu_pd(logp_new.data() + t);
    const __m256d lold = _mm256_loadu_pd(logp_old.data() + t);
    const __m256d lref = _mm256_loadu_pd(logp_ref.data() + t);

    __m256d ratio = exp_pd(_mm256_sub_pd(ln, lold));
    const __m256d over = _mm256_cmp_pd(ratio, ceiling, _CMP_GT_OQ);
    clamped += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(over))));
    ratio = _mm256_blendv_pd(ratio, ceiling, over);

    const __m256d clipped = _mm256_min_pd(_mm256_max_pd(ratio, lo), hi);
    acc_s = _mm256_add_pd(acc_s, _mm256_min_pd(_mm256_mul_pd(ratio, a), _mm256_mul_pd(clipped, a)));

    const __m256d d = _mm256_sub_pd(lref, ln);
    acc_k = _mm256_add_pd(acc_k, _mm256_sub_pd(_mm256_sub_pd(exp_pd(d), d), one));
  }

  TokenSums s;
  s.surrogate = hsum(acc_s);
  s.kl = hsum(acc_k);
  s.clamped = clamped;
  if (t < n) {
    const auto tail = scalar::token_sums(logp_new.subspan(t), logp_old.subspan(t), logp_ref.subspan(t), params);
    s.surrogate += tail.surrogate;
    s.kl += tail.kl;
    s.clamped += tail.clamped;
  }
  return s;
}

}  // namespace sqlrl::simd::avx2
