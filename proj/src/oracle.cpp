#include "bmf/oracle.hpp"

#include <bit>
#include <limits>
#include <string>

#include "bmf/colgen.hpp"
#include "bmf/lpcore.hpp"
#include "bmf/preprocess.hpp"

namespace bmf {

namespace {

using Mask = std::uint64_t;

void check_cells(const BinaryMatrix& x) {
  if (x.rows() * x.cols() > 64) {
    throw GuardError("oracle needs at most 64 cells, got " +
                     std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

Mask matrix_mask(const BinaryMatrix& x) {
  Mask out = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (x.get(i, j)) out |= Mask{1} << (i * x.cols() + j);
    }
  }
  return out;
}

Mask column_mask(const Rank1Column& c, std::size_t m) {
  Mask out = 0;
  for (auto i : c.row_support()) {
    for (auto j : c.col_support()) out |= Mask{1} << (i * m + j);
  }
  return out;
}

std::uint64_t subset_count(std::uint64_t n, std::size_t k) {
  std::uint64_t total = 1;
  std::uint64_t term = 1;
  for (std::size_t t = 1; t <= k && t <= n; ++t) {
    term = term * (n - t + 1) / t;
    total += term;
    if (total > kSubsetGuard) return total;
  }
  return total;
}

// DFS over subsets of at most k columns in index order. `cost` is a
// monotone partial cost used for pruning; `finish` turns a union and partial
// cost into the objective.
template <typename Finish>
struct SubsetSearch {
  const std::vector<Mask>& masks;
  const std::vector<double>& cost;
  std::size_t k;
  Finish finish;
  double best;
  std::vector<std::size_t> best_set;
  std::vector<std::size_t> current;

  void run(std::size_t from, Mask uni, double partial) {
    const double v = finish(uni, partial);
    if (v < best) {
      best = v;
      best_set = current;
    }
    if (current.size() == k || best <= 0.0) return;
    for (std::size_t l = from; l < masks.size(); ++l) {
      const double next = partial + cost[l];
      if (next >= best) continue;
      current.push_back(l);
      run(l + 1, uni | masks[l], next);
      current.pop_back();
      if (best <= 0.0) return;
    }
  }
};

}  // namespace

std::uint64_t rank1_count(std::size_t n, std::size_t m) {
  if (n >= 63 || m >= 63) return std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t a = (std::uint64_t{1} << n) - 1;
  const std::uint64_t b = (std::uint64_t{1} << m) - 1;
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::vector<Rank1Column> enumerate_rank1(const BinaryMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (rank1_count(n, m) > kRank1Guard) {
    throw GuardError("enumerate_rank1: (2^" + std::to_string(n) + "-1)(2^" +
                     std::to_string(m) + "-1) columns exceed the guard");
  }
  std::vector<Rank1Column> out;
  out.reserve(rank1_count(n, m));
  for (std::uint64_t ra = 1; ra < (std::uint64_t{1} << n); ++ra) {
    std::vector<std::uint32_t> rows;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (ra >> i & 1) rows.push_back(i);
    }
    for (std::uint64_t cb = 1; cb < (std::uint64_t{1} << m); ++cb) {
      std::vector<std::uint32_t> cols;
      for (std::uint32_t j = 0; j < m; ++j) {
        if (cb >> j & 1) cols.push_back(j);
      }
      out.push_back(Rank1Column::on(x, SupportSet(rows), SupportSet(cols)));
    }
  }
  return out;
}

double full_mlp(const BinaryMatrix& x, std::size_t k, double rho) {
  const auto pool = enumerate_rank1(x);
  MasterConfig cfg;
  cfg.k = k;
  cfg.rho = rho;
  cfg.validate();
  const LpSolution sol =
      solve_lp(build_restricted_master(WeightedInstance::unreduced(x), pool, cfg));
  if (sol.status != LpStatus::optimal) {
    throw LpNumericalError(std::string("full_mlp: LP ended ") +
                           to_string(sol.status));
  }
  return sol.objective;
}

ExhaustiveResult exhaustive_kbmf(const BinaryMatrix& x, std::size_t k) {
  check_cells(x);
  const auto pool = enumerate_rank1(x);
  if (subset_count(pool.size(), k) > kSubsetGuard) {
    throw GuardError("exhaustive_kbmf: subsets of " + std::to_string(pool.size()) +
                     " columns with k=" + std::to_string(k) +
                     " exceed the guard");
  }
  const Mask target = matrix_mask(x);
  std::vector<Mask> masks;
  for (const auto& c : pool) masks.push_back(column_mask(c, x.cols()));
  // Covered zeros only grow, so they bound the error of any superset.
  struct Search {
    const std::vector<Mask>& masks;
    std::size_t k;
    Mask target;
    double best;
    std::vector<std::size_t> best_set, current;
    void run(std::size_t from, Mask uni) {
      const double v = static_cast<double>(std::popcount(uni ^ target));
      if (v < best) {
        best = v;
        best_set = current;
      }
      if (current.size() == k || best <= 0.0) return;
      for (std::size_t l = from; l < masks.size(); ++l) {
        const Mask next = uni | masks[l];
        if (static_cast<double>(std::popcount(next & ~target)) >= best) continue;
        current.push_back(l);
        run(l + 1, next);
        current.pop_back();
        if (best <= 0.0) return;
      }
    }
  };
  Search s{masks, k, target, static_cast<double>(std::popcount(target)), {}, {}};
  s.run(0, 0);
  ExhaustiveResult r;
  r.error = static_cast<std::uint64_t>(s.best);
  r.witness.k = k;
  for (std::size_t l : s.best_set) r.witness.columns.push_back(pool[l]);
  return r;
}

double exhaustive_mip_rho(const BinaryMatrix& x, std::size_t k, double rho) {
  check_cells(x);
  const auto pool = enumerate_rank1(x);
  if (subset_count(pool.size(), k) > kSubsetGuard) {
    throw GuardError("exhaustive_mip_rho: subsets exceed the guard");
  }
  const Mask target = matrix_mask(x);
  std::vector<Mask> masks;
  std::vector<double> cost;
  for (const auto& c : pool) {
    masks.push_back(column_mask(c, x.cols()));
    cost.push_back(rho * c.covered_zeros_weight());
  }
  auto finish = [target](Mask uni, double partial) {
    return partial + static_cast<double>(std::popcount(target & ~uni));
  };
  SubsetSearch<decltype(finish)> s{masks, cost, k, finish,
                                   static_cast<double>(std::popcount(target)),
                                   {}, {}};
  s.run(0, 0, 0.0);
  return s.best;
}

BbqpSolution brute_bbqp(const BbqpInstance& input) {
  if (input.rows() + input.cols() > 24) {
    throw GuardError("brute_bbqp: n + m must be <= 24");
  }
  const bool flip = input.rows() > input.cols();
  const BbqpInstance h = flip ? input.transposed() : input;
  const std::size_t n = h.rows();
  const std::size_t m = h.cols();
  BbqpSolution best;
  best.a.assign(n, 0);
  best.b.assign(m, 0);
  std::vector<double> s(m);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      const auto r = h.row(i);
      for (std::size_t j = 0; j < m; ++j) s[j] += r[j];
    }
    double v = 0.0;
    for (double x : s) v += std::max(0.0, x);
    if (v > best.value + kValueTol) {
      best.value = v;
      for (std::size_t i = 0; i < n; ++i) best.a[i] = mask >> i & 1;
      for (std::size_t j = 0; j < m; ++j) best.b[j] = s[j] > kValueTol;
    }
  }
  return flip ? best.transposed() : best;
}

BbqpSolution brute_bbqp_pairs(const BbqpInstance& h) {
  const std::size_t n = h.rows();
  const std::size_t m = h.cols();
  if (n + m > 16) throw GuardError("brute_bbqp_pairs: n + m must be <= 16");
  BbqpSolution best;
  best.a.assign(n, 0);
  best.b.assign(m, 0);
  std::vector<std::uint8_t> a(n), b(m);
  for (std::uint64_t ma = 1; ma < (std::uint64_t{1} << n); ++ma) {
    for (std::size_t i = 0; i < n; ++i) a[i] = ma >> i & 1;
    for (std::uint64_t mb = 1; mb < (std::uint64_t{1} << m); ++mb) {
      for (std::size_t j = 0; j < m; ++j) b[j] = mb >> j & 1;
      const double v = evaluate(h, a, b);
      if (v > best.value + kValueTol) best = {a, b, v};
    }
  }
  return best;
}

}  // namespace bmf
