#include <doctest.h>

#include "bmf/oracle.hpp"
#include "bmf/random.hpp"

using namespace bmf;

TEST_CASE("rank-1 counts") {
  CHECK(rank1_count(2, 2) == 9);
  CHECK(rank1_count(1, 3) == 7);
  CHECK(rank1_count(3, 3) == 49);
  CHECK(enumerate_rank1(BinaryMatrix(3, 3)).size() == 49);
  CHECK_THROWS_AS(enumerate_rank1(BinaryMatrix(12, 12)), GuardError);
}

TEST_CASE("full master values") {
  CHECK(full_mlp(BinaryMatrix::identity(4).complement(), 3, 1.0 / 3) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(full_mlp(BinaryMatrix::identity(2), 1, 1.0) == doctest::Approx(1.0));
  CHECK(full_mlp(BinaryMatrix::identity(2), 2, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("exhaustive k-BMF") {
  const auto x = BinaryMatrix::from_rows({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  const auto r = exhaustive_kbmf(x, 2);
  CHECK(r.error == 0);
  CHECK(factorisation_error(x, cover_union(r.witness.columns, 3, 3)) == 0);
  CHECK(exhaustive_kbmf(BinaryMatrix::identity(3), 2).error == 1);
  CHECK(exhaustive_kbmf(BinaryMatrix::identity(4).complement(), 3).error >= 1);
}

TEST_CASE("exhaustive MIP(rho) brackets the exact error") {
  Rng rng(37);
  for (int t = 0; t < 30; ++t) {
    BinaryMatrix x(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) x.set(i, j, rng.below(2));
    if (x.count_ones() == 0) continue;
    for (std::size_t k = 1; k <= 2; ++k) {
      const double exact = static_cast<double>(exhaustive_kbmf(x, k).error);
      CHECK(exhaustive_mip_rho(x, k, 1.0 / k) <= exact + 1e-9);
      CHECK(exact <= exhaustive_mip_rho(x, k, 1.0) + 1e-9);
    }
  }
}

TEST_CASE("brute BBQP") {
  CHECK(brute_bbqp(BbqpInstance(2, 2, {1, 1, 1, 1})).value == 4.0);
  CHECK(brute_bbqp(BbqpInstance(3, 3, {1, 1, -1, 1, 1, 1, -1, 1, 1})).value == 5.0);
  CHECK(brute_bbqp(BbqpInstance(2, 2, {-1, -2, -3, -4})).value == 0.0);
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> h(20);
    for (auto& v : h) v = 2.0 * rng.uniform() - 1.0;
    const BbqpInstance inst(4, 5, h);
    CHECK(brute_bbqp(inst).value == doctest::Approx(brute_bbqp_pairs(inst).value));
  }
}
