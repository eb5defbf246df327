#include <doctest.h>

#include "bmf/lpcore.hpp"
#include "bmf/oracle.hpp"
#include "bmf/random.hpp"

using namespace bmf;

TEST_CASE("single variable with a covering row") {
  LpProblem p;
  p.add_row(RowSense::greater_equal, 1.0);
  p.add_column(1.0, 0.0, 10.0, {{0, 1.0}});
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded") {
  LpProblem p;
  p.add_row(RowSense::greater_equal, 2.0);
  p.add_row(RowSense::less_equal, 1.0);
  p.add_column(0.0, 0.0, kInf, {{0, 1.0}, {1, 1.0}});
  CHECK(solve_lp(p).status == LpStatus::infeasible);

  LpProblem u;
  u.add_row(RowSense::greater_equal, 1.0);
  u.add_column(-1.0, 0.0, kInf, {{0, 1.0}});
  CHECK(solve_lp(u).status == LpStatus::unbounded);
}

TEST_CASE("malformed problems are rejected") {
  LpProblem p;
  p.add_row(RowSense::equal, 1.0);
  p.add_column(1.0, 2.0, 1.0, {{0, 1.0}});
  CHECK_THROWS_AS(LpSolver{p}, std::invalid_argument);
  LpProblem q;
  q.add_column(1.0, 0.0, 1.0, {{3, 1.0}});
  CHECK_THROWS_AS(LpSolver{q}, std::invalid_argument);
}

TEST_CASE("equality rows and free variables") {
  // min x - y, x + y = 4, x - y >= -2, y free in [-inf, 3]
  LpProblem p;
  p.add_row(RowSense::equal, 4.0);
  p.add_row(RowSense::greater_equal, -2.0);
  p.add_column(1.0, 0.0, kInf, {{0, 1.0}, {1, 1.0}});
  p.add_column(-1.0, -kInf, 3.0, {{0, 1.0}, {1, -1.0}});
  const auto s = solve_lp(p);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(-2.0));
}

TEST_CASE("identity master over every rank-1 column") {
  CHECK(full_mlp(BinaryMatrix::identity(2), 1, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("strong duality and complementary slackness on random covering LPs") {
  Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    const std::size_t m = 3 + rng.below(6), n = 3 + rng.below(8);
    LpProblem p;
    for (std::size_t i = 0; i < m; ++i) p.add_row(RowSense::greater_equal, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<LpEntry> e;
      for (std::uint32_t i = 0; i < m; ++i)
        if (rng.below(2)) e.push_back({i, 1.0});
      p.add_column(1.0 + static_cast<double>(rng.below(4)), 0.0, 1.0, e);
    }
    for (std::uint32_t i = 0; i < m; ++i) p.add_column(10.0, 0.0, kInf, {{i, 1.0}});
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    double dual = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(s.duals[i] >= -1e-9);
      dual += s.duals[i];
    }
    // Upper-bounded columns contribute via their reduced costs.
    for (std::size_t j = 0; j < p.num_cols(); ++j)
      if (s.reduced_costs[j] < -1e-9) dual += s.reduced_costs[j] * p.upper[j];
    CHECK(dual == doctest::Approx(s.objective).epsilon(1e-9));
    for (std::size_t i = 0; i < m; ++i)
      CHECK(p.row_activity(i, s.x) >= 1.0 - 1e-7);
  }
}

TEST_CASE("warm restart after adding columns") {
  LpProblem p;
  p.add_row(RowSense::greater_equal, 1.0);
  p.add_row(RowSense::greater_equal, 1.0);
  p.add_column(1.0, 0.0, kInf, {{0, 1.0}});
  p.add_column(1.0, 0.0, kInf, {{1, 1.0}});
  LpSolver solver(p);
  CHECK(solver.solve().objective == doctest::Approx(2.0));
  const auto s =
      reoptimize_with_new_columns(solver, {{1.5, 0.0, kInf, {{0, 1.0}, {1, 1.0}}}});
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.5));
  solver.set_bounds(2, 0.0, 0.0);
  CHECK(solver.solve().objective == doctest::Approx(2.0));
}

TEST_CASE("iteration limit is reported") {
  LpProblem p;
  for (int i = 0; i < 4; ++i) p.add_row(RowSense::greater_equal, 1.0);
  for (std::uint32_t i = 0; i < 4; ++i) p.add_column(1.0, 0.0, kInf, {{i, 1.0}});
  LpOptions o;
  o.max_iterations = 1;
  CHECK(solve_lp(p, std::nullopt, o).status == LpStatus::iteration_limit);
}
