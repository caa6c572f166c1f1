#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Word-level kernels behind CellSet. The scalar table is the reference; an
// AVX2 table is selected at runtime when the CPU supports it. Setting
// VIADUCT_SIMD=scalar in the environment pins the scalar table.

namespace viaduct::simd {

using Word = std::uint64_t;

struct BitKernels {
  std::string_view name;
  void (*or_into)(Word* dst, const Word* src, std::size_t n);
  void (*and_into)(Word* dst, const Word* src, std::size_t n);
  void (*andnot_into)(Word* dst, const Word* src, std::size_t n);  // dst &= ~src
  std::size_t (*popcount)(const Word* a, std::size_t n);
  bool (*equal)(const Word* a, const Word* b, std::size_t n);
  bool (*intersects)(const Word* a, const Word* b, std::size_t n);
  // true iff any bit listed in `cells` is set in `words`
  bool (*any_member)(const Word* words, const std::uint64_t* cells, std::size_t n);
};

const BitKernels& scalar_kernels();
// nullptr when not compiled in or not supported by this CPU
const BitKernels* avx2_kernels();

/// The table in use; chosen once on first call.
const BitKernels& active();

}  // namespace viaduct::simd
