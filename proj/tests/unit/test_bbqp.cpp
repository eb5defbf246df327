#include <doctest.h>

#include "bmf/bbqp.hpp"
#include "bmf/oracle.hpp"
#include "bmf/random.hpp"

using namespace bmf;

namespace {

BbqpInstance random_instance(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<double> h(n * m);
  for (auto& v : h) v = 2.0 * rng.uniform() - 1.0;
  return BbqpInstance(n, m, std::move(h));
}

BbqpInstance two_x_minus_one(const std::vector<std::vector<int>>& x) {
  std::vector<double> h;
  for (const auto& row : x)
    for (int v : row) h.push_back(v ? 1.0 : -1.0);
  return BbqpInstance(x.size(), x[0].size(), std::move(h));
}

const std::vector<std::vector<int>> kExample = {{1, 1, 0}, {1, 1, 1}, {0, 1, 1}};

}  // namespace

TEST_CASE("greedy on all-ones") {
  const BbqpInstance h(2, 2, {1, 1, 1, 1});
  const std::vector<std::size_t> order = {0, 1};
  const auto s = greedy(h, order);
  CHECK(s.value == 4.0);
  CHECK(s.a == std::vector<std::uint8_t>{1, 1});
  CHECK(s.b == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("greedy hand trace") {
  const BbqpInstance h(2, 2, {2, -1, -1, 2});
  const std::vector<std::size_t> order = {0, 1};
  const auto s = greedy(h, order);
  CHECK(s.a == std::vector<std::uint8_t>{1, 0});
  CHECK(s.b == std::vector<std::uint8_t>{1, 0});
  CHECK(s.value == 2.0);
  CHECK(brute_bbqp(h).value == 2.0);
}

TEST_CASE("fix b given a uses strict sign") {
  const BbqpInstance h(2, 2, {1, -1, -1, 1});
  const std::vector<std::uint8_t> a = {1, 0};
  CHECK(fix_b_given_a(h, a) == std::vector<std::uint8_t>{1, 0});
  const std::vector<std::uint8_t> zero = {0, 0};
  CHECK(fix_b_given_a(h, zero) == std::vector<std::uint8_t>{0, 0});
  const BbqpInstance tie(1, 2, {0, 1});
  const std::vector<std::uint8_t> one = {1};
  CHECK(fix_b_given_a(tie, one) == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("alternate keeps fixed points") {
  const BbqpInstance h(2, 2, {2, -1, -1, 2});
  const BbqpSolution start{{1, 0}, {1, 0}, 2.0};
  const auto s = alternate(h, start);
  CHECK(s.a == start.a);
  CHECK(s.b == start.b);
  const BbqpSolution empty{{0, 0}, {0, 0}, 0.0};
  CHECK(alternate(h, empty).value == 0.0);
}

TEST_CASE("best of variants on all-ones") {
  const BbqpInstance h(3, 4, std::vector<double>(12, 1.0));
  CHECK(best_of_variants(h, 0, 1).value == 12.0);
}

TEST_CASE("exact bbqp small cases") {
  CHECK(exact_bbqp(two_x_minus_one(kExample)).solution.value == 5.0);
  CHECK(brute_bbqp_pairs(two_x_minus_one(kExample)).value == 5.0);
  const BbqpInstance neg(2, 3, std::vector<double>(6, -1.0));
  const auto r = exact_bbqp(neg);
  CHECK(r.proven_optimal);
  CHECK(r.solution.value == 0.0);
  CHECK(r.solution.empty());
}

TEST_CASE("exact bbqp matches brute force on random instances") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto h = random_instance(rng, 6, 6);
    const auto r = exact_bbqp(h);
    CHECK(r.proven_optimal);
    CHECK(r.solution.value == doctest::Approx(brute_bbqp(h).value).epsilon(1e-12));
    CHECK(evaluate(h, r.solution.a, r.solution.b) ==
          doctest::Approx(r.solution.value));
  }
}

TEST_CASE("exact bbqp child bounds never exceed the parent") {
  Rng rng(5);
  const auto h = random_instance(rng, 7, 5);
  std::vector<std::pair<double, double>> trace;
  ExactBbqpOptions opt;
  opt.bound_trace = &trace;
  exact_bbqp(h, opt);
  CHECK_FALSE(trace.empty());
  for (const auto& [parent, child] : trace) CHECK(child <= parent + 1e-9);
}

TEST_CASE("exact bbqp cutoff stops early with a better solution") {
  Rng rng(9);
  const auto h = random_instance(rng, 8, 8);
  const double opt = brute_bbqp(h).value;
  ExactBbqpOptions o;
  o.cutoff = opt / 2;
  const auto r = exact_bbqp(h, o);
  CHECK(r.solution.value > opt / 2);
  o.cutoff = opt + 1.0;
  const auto none = exact_bbqp(h, o);
  CHECK(none.proven_optimal);
  CHECK(none.solution.value <= opt + 1e-12);
}

TEST_CASE("greedy is optimal when one side has at most two elements") {
  Rng rng(13);
  for (int t = 0; t < 40; ++t) {
    const auto h = random_instance(rng, 1 + rng.below(2), 1 + rng.below(8));
    CHECK(best_of_variants(h, 0, 0).value ==
          doctest::Approx(brute_bbqp(h).value).epsilon(1e-12));
  }
}

TEST_CASE("orderings are permutations") {
  Rng rng(1);
  const auto h = random_instance(rng, 6, 4);
  for (auto kind : {OrderingKind::original, OrderingKind::revised,
                    OrderingKind::original_perturbed,
                    OrderingKind::revised_perturbed, OrderingKind::random}) {
    auto order = build_ordering(h, {kind, 4});
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == i);
  }
}
