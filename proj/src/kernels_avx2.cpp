#include "cdg/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace cdg::kern {

namespace {

// floor(c * 2^32 / p), the Shoup constant for multiplication by c mod p.
inline std::uint32_t shoup(std::uint32_t c, std::uint32_t p) {
  return static_cast<std::uint32_t>((std::uint64_t(c) << 32) / p);
}

// Per-lane floor((a * b) / 2^32) for unsigned 32-bit lanes.
inline __m256i mulhi_epu32(__m256i a, __m256i b) {
  __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(a, b), 32);
  __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
  return _mm256_blend_epi32(even, odd, 0xAA);
}

// min(r, r - p) maps [0, 2p) to [0, p) by unsigned wraparound.
inline __m256i reduce_once(__m256i r, __m256i vp) {
  return _mm256_min_epu32(r, _mm256_sub_epi32(r, vp));
}

} // namespace

void axpy_avx2(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p) {
  if (c == 0) return;
  const std::uint32_t w = shoup(c, p);
  const __m256i vc = _mm256_set1_epi32(static_cast<int>(c));
  const __m256i vw = _mm256_set1_epi32(static_cast<int>(w));
  const __m256i vp = _mm256_set1_epi32(static_cast<int>(p));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    __m256i vy = _mm256_loadu_si256(reinterpret_cast<__m256i*>(y + i));
    __m256i q = mulhi_epu32(vx, vw);
    __m256i r = _mm256_sub_epi32(_mm256_mullo_epi32(vx, vc), _mm256_mullo_epi32(q, vp));
    r = reduce_once(r, vp);
    __m256i s = reduce_once(_mm256_add_epi32(vy, r), vp);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + i), s);
  }
  if (i < n) axpy_scalar(y + i, x + i, c, n - i, p);
}

void scal_avx2(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p) {
  const std::uint32_t w = shoup(c, p);
  const __m256i vc = _mm256_set1_epi32(static_cast<int>(c));
  const __m256i vw = _mm256_set1_epi32(static_cast<int>(w));
  const __m256i vp = _mm256_set1_epi32(static_cast<int>(p));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i vy = _mm256_loadu_si256(reinterpret_cast<__m256i*>(y + i));
    __m256i q = mulhi_epu32(vy, vw);
    __m256i r = _mm256_sub_epi32(_mm256_mullo_epi32(vy, vc), _mm256_mullo_epi32(q, vp));
    r = reduce_once(r, vp);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + i), r);
  }
  if (i < n) scal_scalar(y + i, c, n - i, p);
}

} // namespace cdg::kern

#else

namespace cdg::kern {

void axpy_avx2(std::uint32_t* y, const std::uint32_t* x, std::uint32_t c, std::size_t n, std::uint32_t p) {
  axpy_scalar(y, x, c, n, p);
}

void scal_avx2(std::uint32_t* y, std::uint32_t c, std::size_t n, std::uint32_t p) {
  scal_scalar(y, c, n, p);
}

} // namespace cdg::kern

#endif
