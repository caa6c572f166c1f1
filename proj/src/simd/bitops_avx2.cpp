#include <immintrin.h>

#include <bit>

#include "viaduct/simd/bitops.hpp"

namespace viaduct::simd {

namespace {

inline __m256i load(const Word* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

inline void store(Word* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

void or_into(Word* dst, const Word* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(dst + i, _mm256_or_si256(load(dst + i), load(src + i)));
  for (; i < n; ++i) dst[i] |= src[i];
}

void and_into(Word* dst, const Word* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(dst + i, _mm256_and_si256(load(dst + i), load(src + i)));
  for (; i < n; ++i) dst[i] &= src[i];
}

void andnot_into(Word* dst, const Word* src, std::size_t n) {
  std::size_t i = 0;
  // _mm256_andnot_si256(a, b) computes ~a & b
  for (; i + 4 <= n; i += 4)
    store(dst + i, _mm256_andnot_si256(load(src + i), load(dst + i)));
  for (; i < n; ++i) dst[i] &= ~src[i];
}

// Nibble lookup popcount (Mula et al.), accumulated with sad_epu8.
std::size_t popcount(const Word* a, std::size_t n) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = load(a + i);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i cnt =
        _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
  }
  std::size_t c = static_cast<std::size_t>(_mm256_extract_epi64(acc, 0)) +
                  static_cast<std::size_t>(_mm256_extract_epi64(acc, 1)) +
                  static_cast<std::size_t>(_mm256_extract_epi64(acc, 2)) +
                  static_cast<std::size_t>(_mm256_extract_epi64(acc, 3));
  for (; i < n; ++i) c += static_cast<std::size_t>(std::popcount(a[i]));
  return c;
}

bool equal(const Word* a, const Word* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i x = _mm256_xor_si256(load(a + i), load(b + i));
    if (!_mm256_testz_si256(x, x)) return false;
  }
  for (; i < n; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool intersects(const Word* a, const Word* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    if (!_mm256_testz_si256(load(a + i), load(b + i))) return true;
  for (; i < n; ++i)
    if (a[i] & b[i]) return true;
  return false;
}

bool any_member(const Word* words, const std::uint64_t* cells, std::size_t n) {
  const __m256i six = _mm256_set1_epi64x(63);
  const __m256i one = _mm256_set1_epi64x(1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i idx = load(cells + i);
    const __m256i word_idx = _mm256_srli_epi64(idx, 6);
    const __m256i w = _mm256_i64gather_epi64(reinterpret_cast<const long long*>(words),
                                             word_idx, 8);
    const __m256i bit = _mm256_sllv_epi64(one, _mm256_and_si256(idx, six));
    if (!_mm256_testz_si256(w, bit)) return true;
  }
  for (; i < n; ++i)
    if ((words[cells[i] >> 6] >> (cells[i] & 63)) & 1u) return true;
  return false;
}

}  // namespace

const BitKernels* avx2_kernels_impl() {
  static const BitKernels k{"avx2", or_into, and_into, andnot_into, popcount,
                            equal,  intersects, any_member};
  return &k;
}

}  // namespace viaduct::simd
