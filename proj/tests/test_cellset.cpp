#include <doctest.h>

#include <random>
#include <sstream>

#include "viaduct/cellset.hpp"
#include "viaduct/error.hpp"
#include "viaduct/simd/bitops.hpp"

using namespace viaduct;

namespace {

GridPtr line(std::size_t n) {
  return std::make_shared<const GridSpec>(std::vector<Axis>{Axis{AxisRole::time, 0, 0, double(n - 1), n}});
}

GridPtr box() {
  return std::make_shared<const GridSpec>(
      GridSpec::traffic({AxisRole::time, 0, -1, 1, 7}, {AxisRole::duration, 0, 0, 2, 9},
                        {{AxisRole::position, 0, -3, 3, 11}}, {{AxisRole::monad, 0, 0, 1, 3}}));
}

CellSet random_set(const GridPtr& g, std::mt19937_64& rng, double density) {
  CellSet s(g);
  std::bernoulli_distribution b(density);
  for (std::size_t c = 0; c < g->size(); ++c)
    if (b(rng)) s.set(c);
  return s;
}

}  // namespace

TEST_CASE("membership and counts") {
  auto g = box();
  CellSet e = CellSet::empty(g), f = CellSet::full(g);
  CHECK(e.none());
  CHECK(f.count() == g->size());
  CHECK(e.complement() == f);
  e.set(5);
  CHECK(e.test(5));
  CHECK(e.count() == 1);
  e.reset(5);
  CHECK(e.none());
}

TEST_CASE("set algebra laws on random sets") {
  auto g = box();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const CellSet a = random_set(g, rng, 0.3), b = random_set(g, rng, 0.6), c = random_set(g, rng, 0.1);
    CHECK((a | a) == a);
    CHECK((a & a) == a);
    CHECK((a | b).complement() == (a.complement() & b.complement()));
    CHECK((a & b).complement() == (a.complement() | b.complement()));
    CHECK((a & (b | c)) == ((a & b) | (a & c)));
    CHECK((a - b) == (a & b.complement()));
    CHECK((a & b).subset_of(a));
    CHECK(a.subset_of(a | b));
    CHECK(a.intersects(b) == !(a & b).none());
    CHECK((a | b).count() + (a & b).count() == a.count() + b.count());
  }
}

TEST_CASE("grid mismatch is a shape error") {
  CellSet a(line(10)), b(line(11));
  try {
    a |= b;
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
}

TEST_CASE("any_of matches a scalar scan") {
  auto g = box();
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> cell(0, g->size() - 1);
  for (int i = 0; i < 200; ++i) {
    const CellSet a = random_set(g, rng, 0.02);
    std::vector<std::size_t> cells(1 + i % 9);
    for (auto& c : cells) c = cell(rng);
    bool expect = false;
    for (auto c : cells) expect = expect || a.test(c);
    CHECK(a.any_of(cells) == expect);
  }
}

TEST_CASE("file round trip") {
  auto g = box();
  std::mt19937_64 rng(29);
  const CellSet a = random_set(g, rng, 0.4);
  std::stringstream ss;
  write_cellset(ss, a);
  CHECK(ss.str().rfind("VIADUCT-CELLSET v1\n", 0) == 0);
  const CellSet b = read_cellset(ss);
  CHECK(b.grid() == a.grid());
  CHECK(b == a);
  std::stringstream empty;
  write_cellset(empty, CellSet::empty(g));
  CHECK(read_cellset(empty).none());
}

TEST_CASE("malformed cell files are parse errors") {
  std::istringstream bad_header("CELLS\n");
  CHECK_THROWS_AS((read_cellset(bad_header)), Error);
  std::istringstream bad_run("VIADUCT-CELLSET v1\nt 0 9 10\n8:5\n");
  try {
    read_cellset(bad_run);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
  }
}

TEST_CASE("round-trip number formatting") {
  for (double v : {0.1, -2.5, 1e-300, 123456789.125, 1.0 / 3.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("vector bit kernels agree with the scalar reference") {
  const auto* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 not available; only the scalar table is exercised");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(31);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 131u}) {
    std::vector<simd::Word> a(n), b(n);
    for (auto& w : a) w = rng();
    for (auto& w : b) w = rng() & rng();
    auto x = a, y = a;
    ref.or_into(x.data(), b.data(), n);
    avx->or_into(y.data(), b.data(), n);
    CHECK(x == y);
    x = a;
    y = a;
    ref.and_into(x.data(), b.data(), n);
    avx->and_into(y.data(), b.data(), n);
    CHECK(x == y);
    x = a;
    y = a;
    ref.andnot_into(x.data(), b.data(), n);
    avx->andnot_into(y.data(), b.data(), n);
    CHECK(x == y);
    CHECK(ref.popcount(a.data(), n) == avx->popcount(a.data(), n));
    CHECK(ref.equal(a.data(), b.data(), n) == avx->equal(a.data(), b.data(), n));
    CHECK(avx->equal(a.data(), a.data(), n));
    CHECK(ref.intersects(a.data(), b.data(), n) == avx->intersects(a.data(), b.data(), n));
    std::vector<simd::Word> sparse(n);
    if (n) sparse[n / 2] = simd::Word{1} << 7;
    CHECK(ref.intersects(a.data(), sparse.data(), n) == avx->intersects(a.data(), sparse.data(), n));
    if (n == 0) continue;
    for (std::size_t k : {1u, 3u, 4u, 7u, 9u}) {
      std::vector<std::uint64_t> cells(k);
      for (auto& c : cells) c = rng() % (64 * n);
      CHECK(ref.any_member(a.data(), cells.data(), k) == avx->any_member(a.data(), cells.data(), k));
      CHECK(ref.any_member(sparse.data(), cells.data(), k) == avx->any_member(sparse.data(), cells.data(), k));
    }
  }
}

TEST_CASE("dispatch honours VIADUCT_SIMD") {
  const auto& k = simd::active();
  CHECK((k.name == "scalar" || k.name == "avx2"));
}
