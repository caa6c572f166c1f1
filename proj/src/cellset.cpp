#include "viaduct/cellset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "viaduct/error.hpp"
#include "viaduct/simd/bitops.hpp"

namespace viaduct {

namespace {

constexpr const char* kHeader = "VIADUCT-CELLSET v1";

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace

CellSet::CellSet(GridPtr grid, bool full) : grid_(std::move(grid)) {
  if (!grid_) throw Error(ErrorKind::shape, "cell set needs a grid");
  words_.assign(word_count(grid_->size()), full ? ~Word{0} : Word{0});
  clear_tail();
}

void CellSet::clear_tail() {
  const std::size_t rem = grid_->size() & 63;
  if (rem != 0 && !words_.empty()) words_.back() &= (Word{1} << rem) - 1;
}

void CellSet::check_same_grid(const CellSet& other) const {
  if (grid_ != other.grid_ && !(grid_ && other.grid_ && *grid_ == *other.grid_))
    throw Error(ErrorKind::shape, "cell sets live on different grids");
}

bool CellSet::any_of(std::span<const std::size_t> cells) const {
  static_assert(sizeof(std::size_t) == sizeof(std::uint64_t));
  return simd::active().any_member(words_.data(),
                                   reinterpret_cast<const std::uint64_t*>(cells.data()),
                                   cells.size());
}

std::size_t CellSet::count() const { return simd::active().popcount(words_.data(), words_.size()); }

bool CellSet::none() const {
  for (Word w : words_)
    if (w) return false;
  return true;
}

bool CellSet::intersects(const CellSet& other) const {
  check_same_grid(other);
  return simd::active().intersects(words_.data(), other.words_.data(), words_.size());
}

bool CellSet::subset_of(const CellSet& other) const {
  check_same_grid(other);
  CellSet diff = *this;
  diff -= other;
  return diff.none();
}

CellSet& CellSet::operator|=(const CellSet& other) {
  check_same_grid(other);
  simd::active().or_into(words_.data(), other.words_.data(), words_.size());
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& other) {
  check_same_grid(other);
  simd::active().and_into(words_.data(), other.words_.data(), words_.size());
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& other) {
  check_same_grid(other);
  simd::active().andnot_into(words_.data(), other.words_.data(), words_.size());
  return *this;
}

CellSet CellSet::complement() const {
  CellSet out = *this;
  for (Word& w : out.words_) w = ~w;
  out.clear_tail();
  return out;
}

bool CellSet::operator==(const CellSet& other) const {
  if (!grid_ || !other.grid_) return grid_ == other.grid_;
  if (!(*grid_ == *other.grid_)) return false;
  return simd::active().equal(words_.data(), other.words_.data(), words_.size());
}

std::vector<std::size_t> CellSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t c) { out.push_back(c); });
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_grid_block(std::ostream& os, const GridSpec& grid) {
  for (const Axis& a : grid.axes())
    os << a.name() << ' ' << format_double(a.lo) << ' ' << format_double(a.hi) << ' '
       << a.count << '\n';
}

void write_cellset(std::ostream& os, const CellSet& set) {
  os << kHeader << '\n';
  write_grid_block(os, set.grid());
  std::size_t run_start = 0, run_len = 0;
  set.for_each([&](std::size_t c) {
    if (run_len > 0 && c == run_start + run_len) {
      ++run_len;
      return;
    }
    if (run_len > 0) os << run_start << ':' << run_len << '\n';
    run_start = c;
    run_len = 1;
  });
  if (run_len > 0) os << run_start << ':' << run_len << '\n';
}

namespace {

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

std::size_t parse_size(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": bad integer '" + tok + "'");
  return v;
}

}  // namespace

GridSpec read_grid_block(std::istream& is, std::size_t& line_no, std::string& pending) {
  std::vector<Axis> axes;
  std::string line;
  pending.clear();
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.find(':') != std::string::npos) {
      pending = line;
      break;
    }
    std::istringstream ls(line);
    std::string name, lo, hi, count;
    if (!(ls >> name >> lo >> hi >> count))
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 'role lo hi count'");
    auto axis = axis_from_name(name);
    if (!axis)
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": unknown axis role '" + name + "'");
    axis->lo = parse_double(lo, line_no);
    axis->hi = parse_double(hi, line_no);
    axis->count = parse_size(count, line_no);
    axes.push_back(*axis);
  }
  return GridSpec(std::move(axes));
}

CellSet read_cellset(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line != kHeader)
    throw Error(ErrorKind::parse, "line 1: expected header '" + std::string(kHeader) + "'");
  std::string pending;
  auto grid = std::make_shared<const GridSpec>(read_grid_block(is, line_no, pending));
  CellSet set(grid);
  auto take_run = [&](const std::string& l) {
    const auto colon = l.find(':');
    const std::size_t off = parse_size(l.substr(0, colon), line_no);
    const std::size_t len = parse_size(l.substr(colon + 1), line_no);
    if (off + len > grid->size())
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": run exceeds grid");
    for (std::size_t c = off; c < off + len; ++c) set.set(c);
  };
  if (!pending.empty()) take_run(pending);
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.find(':') == std::string::npos)
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 'offset:length'");
    take_run(line);
  }
  return set;
}

void save_cellset(const std::string& path, const CellSet& set) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path);
  write_cellset(os, set);
}

CellSet load_cellset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::io, "cannot read " + path);
  return read_cellset(is);
}

}  // namespace viaduct
