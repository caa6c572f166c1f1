#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "viaduct/grid.hpp"

namespace viaduct {

using GridPtr = std::shared_ptr<const GridSpec>;

/// Dense membership bit field over every cell of a grid. Set algebra is only
/// defined between sets on equal grids (ErrorKind::shape otherwise).
class CellSet {
 public:
  using Word = std::uint64_t;

  CellSet() = default;
  explicit CellSet(GridPtr grid, bool full = false);

  static CellSet empty(GridPtr grid) { return CellSet(std::move(grid), false); }
  static CellSet full(GridPtr grid) { return CellSet(std::move(grid), true); }

  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t universe() const { return grid_ ? grid_->size() : 0; }

  bool test(std::size_t cell) const { return (words_[cell >> 6] >> (cell & 63)) & 1u; }
  void set(std::size_t cell) { words_[cell >> 6] |= Word{1} << (cell & 63); }
  void reset(std::size_t cell) { words_[cell >> 6] &= ~(Word{1} << (cell & 63)); }
  void assign(std::size_t cell, bool v) { v ? set(cell) : reset(cell); }

  /// True iff any of the listed cells is a member.
  bool any_of(std::span<const std::size_t> cells) const;

  std::size_t count() const;
  bool none() const;
  bool intersects(const CellSet& other) const;
  bool subset_of(const CellSet& other) const;

  CellSet& operator|=(const CellSet& other);
  CellSet& operator&=(const CellSet& other);
  CellSet& operator-=(const CellSet& other);
  CellSet complement() const;

  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }
  bool operator==(const CellSet& other) const;

  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(w * 64 + std::size_t(b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> members() const;

 private:
  void check_same_grid(const CellSet& other) const;
  void clear_tail();

  GridPtr grid_;
  std::vector<Word> words_;
};

/// Text format: `VIADUCT-CELLSET v1`, one `role lo hi count` line per axis,
/// then `offset:length` runs of members in row-major cell order.
void write_cellset(std::ostream& os, const CellSet& set);
CellSet read_cellset(std::istream& is);
void write_grid_block(std::ostream& os, const GridSpec& grid);
/// Reads axis lines until the first line containing ':' (returned in
/// `pending`) or end of input.
GridSpec read_grid_block(std::istream& is, std::size_t& line_no, std::string& pending);

void save_cellset(const std::string& path, const CellSet& set);
CellSet load_cellset(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace viaduct
