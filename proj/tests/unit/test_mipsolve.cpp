#include <doctest.h>

#include "bmf/mipsolve.hpp"
#include "bmf/oracle.hpp"
#include "bmf/random.hpp"

using namespace bmf;

TEST_CASE("identity with the full pool") {
  const auto x = BinaryMatrix::identity(2);
  const auto inst = WeightedInstance::unreduced(x);
  const auto pool = enumerate_rank1(x);
  const auto r = solve_mip_rho(inst, pool, 2, 1.0);
  CHECK(r.optimal);
  CHECK(r.objective == 0.0);
  CHECK(r.true_error == 0);
  CHECK(r.factorisation.columns.size() == 2);
}

TEST_CASE("J4 - I4 needs four factors") {
  const auto x = BinaryMatrix::identity(4).complement();
  const auto inst = WeightedInstance::unreduced(x);
  const auto pool = enumerate_rank1(x);
  CHECK(solve_mip_rho(inst, pool, 4, 1.0).objective == 0.0);
  const auto three = solve_mip_exact_over_pool(inst, pool, 3);
  CHECK(three.optimal);
  CHECK(three.true_error >= 1);
  CHECK(solve_mip_exact_over_pool(inst, pool, 4).true_error == 0);
}

TEST_CASE("exact over a pool of exact factors") {
  const auto x = BinaryMatrix::from_rows({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  const auto inst = WeightedInstance::unreduced(x);
  const std::vector<Rank1Column> pool = {inst.column({0, 1}, {0, 1}),
                                         inst.column({1, 2}, {1, 2}),
                                         inst.column({0, 1, 2}, {0, 1, 2})};
  const auto r = solve_mip_exact_over_pool(inst, pool, 2);
  CHECK(r.objective == 0.0);
  CHECK(r.true_error == 0);
}

TEST_CASE("single all-ones column on the identity") {
  const auto x = BinaryMatrix::identity(2);
  const auto inst = WeightedInstance::unreduced(x);
  const std::vector<Rank1Column> pool = {inst.column({0, 1}, {0, 1})};
  // Either take the column (2 zeros) or leave both ones uncovered (2).
  CHECK(solve_mip_exact_over_pool(inst, pool, 1).objective == 2.0);
  CHECK(mip_rho_objective(inst, pool, 1.0) == 2.0);
}

TEST_CASE("pool MIP matches the exhaustive oracle on 3x3") {
  Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    BinaryMatrix x(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) x.set(i, j, rng.below(2));
    if (x.count_ones() == 0) continue;
    const auto inst = WeightedInstance::unreduced(x);
    const auto pool = enumerate_rank1(x);
    for (std::size_t k = 1; k <= 2; ++k) {
      CHECK(solve_mip_exact_over_pool(inst, pool, k).true_error ==
            exhaustive_kbmf(x, k).error);
      CHECK(solve_mip_rho(inst, pool, k, 1.0).objective ==
            doctest::Approx(exhaustive_mip_rho(x, k, 1.0)));
    }
  }
}

TEST_CASE("best_integer keeps the smaller true error") {
  const auto x = BinaryMatrix::identity(3);
  const auto inst = WeightedInstance::unreduced(x);
  const auto pool = enumerate_rank1(x);
  const auto a = best_integer(inst, pool, 2, {1.0});
  const auto b = best_integer(inst, pool, 2, {1.0, 1.0});
  CHECK(a.true_error == b.true_error);
  CHECK(a.true_error == 1);
  CHECK_THROWS(best_integer(inst, pool, 2, {}));
}

TEST_CASE("optimality certificate") {
  CHECK(optimality_certificate(272.0, 272.0) == 0.0);
  CHECK(optimality_certificate(272.0, 271.2) == 0.0);
  CHECK(optimality_certificate(100.0, 90.0) == doctest::Approx(10.0));
  CHECK(optimality_certificate(0.0, 0.0) == 0.0);
}

TEST_CASE("incumbent outside the pool is kept when better") {
  const auto x = BinaryMatrix::identity(2);
  const auto inst = WeightedInstance::unreduced(x);
  Factorisation f;
  f.columns = {inst.column({0}, {0}), inst.column({1}, {1})};
  f.k = 2;
  MipOptions o;
  o.incumbent = &f;
  const std::vector<Rank1Column> pool = {inst.column({0, 1}, {0, 1})};
  const auto r = solve_mip_rho(inst, pool, 2, 1.0, o);
  CHECK(r.objective == 0.0);
}
