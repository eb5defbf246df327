#include <doctest.h>

#include "bmf/preprocess.hpp"
#include "bmf/random.hpp"

using namespace bmf;

namespace {

Rank1Column random_column(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<std::uint32_t> r, c;
  while (r.empty()) {
    r.clear();
    for (std::uint32_t i = 0; i < n; ++i)
      if (rng.below(2)) r.push_back(i);
  }
  while (c.empty()) {
    c.clear();
    for (std::uint32_t j = 0; j < m; ++j)
      if (rng.below(2)) c.push_back(j);
  }
  return Rank1Column(SupportSet(r), SupportSet(c));
}

}  // namespace

TEST_CASE("duplicate rows merge with multiplicity") {
  const auto inst = reduce(BinaryMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}}));
  CHECK(inst.matrix == BinaryMatrix::from_rows({{1, 0}, {0, 1}}));
  CHECK(inst.row_mult == std::vector<std::uint32_t>{2, 1});
  CHECK(inst.col_mult == std::vector<std::uint32_t>{1, 1});
  CHECK(inst.ones_weight() == 3.0);
}

TEST_CASE("zero columns are deleted") {
  const auto inst = reduce(BinaryMatrix::from_rows({{1, 0, 1}, {0, 0, 1}}));
  CHECK(inst.cols() == 2);
  CHECK_FALSE(inst.col_backmap[1].has_value());
  CHECK(inst.col_backmap[0].has_value());
}

TEST_CASE("all-zero input is rejected") {
  CHECK_THROWS_AS(reduce(BinaryMatrix(3, 3)), std::invalid_argument);
}

TEST_CASE("weighted error by hand") {
  const auto inst = reduce(BinaryMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}}));
  Factorisation f;
  f.columns = {inst.column({0}, {0})};
  CHECK(weighted_error(inst, f) == 1);
  f.columns = {inst.column({0, 1}, {0})};
  CHECK(weighted_error(inst, f) == 2);  // one zero covered, (1,1) missed
}

TEST_CASE("unit weights give the plain error") {
  const auto x = BinaryMatrix::from_rows({{1, 1, 0}, {0, 1, 1}});
  const auto inst = WeightedInstance::unreduced(x);
  Factorisation f;
  f.columns = {inst.column({0, 1}, {1})};
  CHECK(weighted_error(inst, f) ==
        factorisation_error(x, cover_union(f.columns, 2, 3)));
  CHECK(lift(inst, f).columns == f.columns);
}

TEST_CASE("reduced error equals lifted error on random planted matrices") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(6), m = 2 + rng.below(6);
    BinaryMatrix x(n + 2, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) x.set(i, j, rng.below(2));
    x.set(0, 0);
    for (std::size_t j = 0; j < m; ++j) {
      x.set(n, j, x.get(0, j));
      x.set(n + 1, j, x.get(1, j));
    }
    const auto inst = reduce(x);
    Factorisation f;
    for (std::size_t l = 0; l < 1 + rng.below(3); ++l)
      f.columns.push_back(random_column(rng, inst.rows(), inst.cols()));
    const auto lifted = lift(inst, f);
    CHECK(weighted_error(inst, f) ==
          factorisation_error(x, cover_union(lifted.columns, x.rows(), x.cols())));
  }
}
