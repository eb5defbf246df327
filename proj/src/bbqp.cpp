#include "bmf/bbqp.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "bmf/random.hpp"

namespace bmf {

namespace {

using Clock = std::chrono::steady_clock;

double positive_part_sum(std::span<const double> s) {
  double total = 0.0;
  for (double v : s) total += std::max(0.0, v);
  return total;
}

std::vector<std::uint8_t> positive_indicator(std::span<const double> s) {
  std::vector<std::uint8_t> out(s.size(), 0);
  for (std::size_t j = 0; j < s.size(); ++j) out[j] = s[j] > kValueTol;
  return out;
}

BbqpSolution normalized(const BbqpInstance& inst, BbqpSolution sol) {
  const bool a_empty = std::none_of(sol.a.begin(), sol.a.end(),
                                    [](std::uint8_t v) { return v != 0; });
  const bool b_empty = std::none_of(sol.b.begin(), sol.b.end(),
                                    [](std::uint8_t v) { return v != 0; });
  if (a_empty || b_empty) {
    std::fill(sol.a.begin(), sol.a.end(), 0);
    std::fill(sol.b.begin(), sol.b.end(), 0);
    sol.value = 0.0;
  } else {
    sol.value = evaluate(inst, sol.a, sol.b);
  }
  return sol;
}

}  // namespace

BbqpInstance::BbqpInstance(std::size_t rows, std::size_t cols,
                           std::vector<double> h)
    : rows_(rows), cols_(cols), h_(std::move(h)), row_pos_(rows, 0.0),
      row_neg_(rows, 0.0) {
  if (h_.size() != rows * cols) {
    throw std::invalid_argument("BbqpInstance: coefficient count mismatch");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (double v : row(i)) {
      if (v > 0) {
        row_pos_[i] += v;
      } else {
        row_neg_[i] += v;
      }
    }
  }
}

BbqpInstance BbqpInstance::transposed() const {
  std::vector<double> t(h_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = at(i, j);
  }
  return BbqpInstance(cols_, rows_, std::move(t));
}

bool BbqpSolution::empty() const {
  return std::none_of(a.begin(), a.end(), [](std::uint8_t v) { return v; }) ||
         std::none_of(b.begin(), b.end(), [](std::uint8_t v) { return v; });
}

double evaluate(const BbqpInstance& inst, std::span<const std::uint8_t> a,
                std::span<const std::uint8_t> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    if (!a[i]) continue;
    const auto r = inst.row(i);
    for (std::size_t j = 0; j < inst.cols(); ++j) {
      if (b[j]) total += r[j];
    }
  }
  return total;
}

std::vector<std::size_t> build_ordering(const BbqpInstance& inst,
                                        const OrderingStrategy& strategy) {
  const std::size_t n = inst.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(strategy.seed);
  if (strategy.kind == OrderingKind::random) {
    rng.shuffle(std::span(order));
    return order;
  }
  std::vector<double> key = inst.row_pos_sums();
  if (strategy.kind == OrderingKind::original_perturbed ||
      strategy.kind == OrderingKind::revised_perturbed) {
    const double mean =
        n == 0 ? 0.0 : std::accumulate(key.begin(), key.end(), 0.0) / n;
    for (double& v : key) v += rng.uniform() * kPerturbationScale * mean;
  }
  const bool revised = strategy.kind == OrderingKind::revised ||
                       strategy.kind == OrderingKind::revised_perturbed;
  const auto& neg = inst.row_neg_sums();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     if (std::abs(key[x] - key[y]) > kValueTol) {
                       return key[x] > key[y];
                     }
                     if (revised && std::abs(neg[x] - neg[y]) > kValueTol) {
                       return neg[x] > neg[y];
                     }
                     return false;
                   });
  return order;
}

BbqpSolution greedy(const BbqpInstance& inst,
                    std::span<const std::size_t> order) {
  const std::size_t m = inst.cols();
  BbqpSolution sol;
  sol.a.assign(inst.rows(), 0);
  std::vector<double> s(m, 0.0);
  double f0 = 0.0;
  for (std::size_t i : order) {
    const auto r = inst.row(i);
    double f1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) f1 += std::max(0.0, s[j] + r[j]);
    if (f1 > f0 + kValueTol) {
      sol.a[i] = 1;
      for (std::size_t j = 0; j < m; ++j) s[j] += r[j];
      f0 = f1;
    }
  }
  sol.b = positive_indicator(s);
  return normalized(inst, std::move(sol));
}

std::vector<std::uint8_t> fix_b_given_a(const BbqpInstance& inst,
                                        std::span<const std::uint8_t> a) {
  std::vector<double> s(inst.cols(), 0.0);
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    if (!a[i]) continue;
    const auto r = inst.row(i);
    for (std::size_t j = 0; j < inst.cols(); ++j) s[j] += r[j];
  }
  return positive_indicator(s);
}

std::vector<std::uint8_t> fix_a_given_b(const BbqpInstance& inst,
                                        std::span<const std::uint8_t> b) {
  std::vector<double> s(inst.rows(), 0.0);
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    const auto r = inst.row(i);
    double total = 0.0;
    for (std::size_t j = 0; j < inst.cols(); ++j) {
      if (b[j]) total += r[j];
    }
    s[i] = total;
  }
  return positive_indicator(s);
}

BbqpSolution alternate(const BbqpInstance& inst, const BbqpSolution& start) {
  BbqpSolution best = start;
  best.value = evaluate(inst, best.a, best.b);
  for (;;) {
    BbqpSolution next;
    next.a = fix_a_given_b(inst, best.b);
    next.b = fix_b_given_a(inst, next.a);
    next.value = evaluate(inst, next.a, next.b);
    if (next.a == best.a && next.b == best.b) break;
    if (next.value <= best.value + kValueTol) break;
    best = std::move(next);
  }
  return normalized(inst, std::move(best));
}

std::vector<BbqpSolution> run_variants(const BbqpInstance& inst,
                                       const VariantOptions& options) {
  std::vector<BbqpSolution> out;
  const BbqpInstance t = inst.transposed();
  constexpr OrderingKind kDeterministic[] = {
      OrderingKind::original, OrderingKind::revised,
      OrderingKind::original_perturbed, OrderingKind::revised_perturbed};
  std::uint64_t stream = 0;
  auto run = [&](const BbqpInstance& h, OrderingKind kind, bool is_transposed) {
    const OrderingStrategy strategy{kind, derive_seed(options.seed, ++stream)};
    const auto order = build_ordering(h, strategy);
    BbqpSolution sol = alternate(h, greedy(h, order));
    out.push_back(is_transposed ? sol.transposed() : std::move(sol));
  };
  for (OrderingKind kind : kDeterministic) run(inst, kind, false);
  if (options.include_transposed) {
    for (OrderingKind kind : kDeterministic) run(t, kind, true);
  }
  const bool use_transpose = inst.cols() < inst.rows();
  for (std::size_t r = 0; r < options.n_random; ++r) {
    run(use_transpose ? t : inst, OrderingKind::random, use_transpose);
  }
  return out;
}

BbqpSolution best_of_variants(const BbqpInstance& inst, std::size_t n_random,
                              std::uint64_t seed) {
  const auto variants = run_variants(inst, {n_random, seed, true});
  const BbqpSolution* best = &variants.front();
  for (const auto& v : variants) {
    if (v.value > best->value + kValueTol) best = &v;
  }
  return *best;
}

ExactBbqpResult exact_bbqp(const BbqpInstance& input,
                           const ExactBbqpOptions& options) {
  const bool flip = input.rows() > input.cols();
  const BbqpInstance inst = flip ? input.transposed() : input;
  const std::size_t n = inst.rows();
  const std::size_t m = inst.cols();
  const auto start = Clock::now();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& pos = inst.row_pos_sums();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pos[x] > pos[y]; });

  // suffix[d * m + j] = sum over branch positions t >= d of max(0, h_{order[t], j}).
  std::vector<double> suffix((n + 1) * m, 0.0);
  for (std::size_t d = n; d-- > 0;) {
    const auto r = inst.row(order[d]);
    for (std::size_t j = 0; j < m; ++j) {
      suffix[d * m + j] = suffix[(d + 1) * m + j] + std::max(0.0, r[j]);
    }
  }
  auto bound_at = [&](std::size_t depth, const std::vector<double>& s) {
    double total = 0.0;
    const double* rest = suffix.data() + depth * m;
    for (std::size_t j = 0; j < m; ++j) total += std::max(0.0, s[j] + rest[j]);
    return total;
  };

  ExactBbqpResult result;
  BbqpSolution& incumbent = result.solution;
  incumbent.a.assign(n, 0);
  incumbent.b.assign(m, 0);
  incumbent.value = 0.0;
  if (options.warm && options.warm->a.size() == input.rows() &&
      options.warm->b.size() == input.cols()) {
    BbqpSolution w = flip ? options.warm->transposed() : *options.warm;
    w = normalized(inst, std::move(w));
    if (w.value > incumbent.value) incumbent = std::move(w);
  }

  struct Node {
    std::size_t depth;
    std::vector<double> s;
    std::vector<std::uint8_t> a;
    double bound;
  };
  std::vector<Node> stack;
  {
    Node root{0, std::vector<double>(m, 0.0), std::vector<std::uint8_t>(n, 0),
              0.0};
    root.bound = bound_at(0, root.s);
    stack.push_back(std::move(root));
  }

  auto finish = [&](bool proven, double open_bound) {
    result.proven_optimal = proven;
    result.upper_bound = std::max(incumbent.value, open_bound);
    if (flip) incumbent = incumbent.transposed();
    return result;
  };
  auto open_bound = [&](double extra) {
    double b = extra;
    for (const auto& node : stack) b = std::max(b, node.bound);
    return b;
  };
  auto cutoff_reached = [&] {
    return options.cutoff && incumbent.value > *options.cutoff + kValueTol;
  };

  if (cutoff_reached()) return finish(false, stack.front().bound);

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    ++result.nodes;
    if (options.time_cap_secs >= 0 && (result.nodes & 255) == 0) {
      const double elapsed =
          std::chrono::duration<double>(Clock::now() - start).count();
      if (elapsed > options.time_cap_secs) {
        return finish(false, open_bound(node.bound));
      }
    }
    if (node.bound <= incumbent.value + kValueTol) continue;

    const double here = positive_part_sum(node.s);
    if (here > incumbent.value + kValueTol) {
      incumbent.a = node.a;
      incumbent.b = positive_indicator(node.s);
      incumbent = normalized(inst, std::move(incumbent));
      if (cutoff_reached()) return finish(false, open_bound(node.bound));
    }
    if (node.depth == n) continue;

    const std::size_t var = order[node.depth];
    const auto r = inst.row(var);
    Node zero{node.depth + 1, node.s, node.a, 0.0};
    zero.bound = bound_at(zero.depth, zero.s);
    Node one{node.depth + 1, std::move(node.s), std::move(node.a), 0.0};
    one.a[var] = 1;
    for (std::size_t j = 0; j < m; ++j) one.s[j] += r[j];
    one.bound = bound_at(one.depth, one.s);
    if (options.bound_trace) {
      options.bound_trace->emplace_back(node.bound, zero.bound);
      options.bound_trace->emplace_back(node.bound, one.bound);
    }
    if (zero.bound > incumbent.value + kValueTol) stack.push_back(std::move(zero));
    if (one.bound > incumbent.value + kValueTol) stack.push_back(std::move(one));
  }
  return finish(true, incumbent.value);
}

}  // namespace bmf
