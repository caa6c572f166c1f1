#include <bit>

#include "viaduct/simd/bitops.hpp"

namespace viaduct::simd {

namespace {

void or_into(Word* dst, const Word* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

void and_into(Word* dst, const Word* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] &= src[i];
}

void andnot_into(Word* dst, const Word* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] &= ~src[i];
}

std::size_t popcount(const Word* a, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += static_cast<std::size_t>(std::popcount(a[i]));
  return c;
}

bool equal(const Word* a, const Word* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool intersects(const Word* a, const Word* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] & b[i]) return true;
  return false;
}

bool any_member(const Word* words, const std::uint64_t* cells, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if ((words[cells[i] >> 6] >> (cells[i] & 63)) & 1u) return true;
  return false;
}

}  // namespace

const BitKernels& scalar_kernels() {
  static const BitKernels k{"scalar", or_into, and_into, andnot_into, popcount,
                            equal,    intersects, any_member};
  return k;
}

}  // namespace viaduct::simd
