#ifndef BMF_BBQP_HPP_
#define BMF_BBQP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bmf {

inline constexpr double kValueTol = 1e-9;

// Bipartite binary quadratic program max_{a,b binary} a^T H b.
class BbqpInstance {
 public:
  BbqpInstance() = default;
  // Row-major n x m coefficients.
  BbqpInstance(std::size_t rows, std::size_t cols, std::vector<double> h);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return h_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {h_.data() + i * cols_, cols_};
  }
  // gamma+_i = sum_j max(0, h_ij).
  const std::vector<double>& row_pos_sums() const { return row_pos_; }
  // sum_j min(0, h_ij).
  const std::vector<double>& row_neg_sums() const { return row_neg_; }

  BbqpInstance transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> h_;
  std::vector<double> row_pos_;
  std::vector<double> row_neg_;
};

struct BbqpSolution {
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> b;
  double value = 0.0;

  bool empty() const;
  // Swaps the roles of a and b (solution of the transposed instance).
  BbqpSolution transposed() const { return {b, a, value}; }
};

double evaluate(const BbqpInstance& inst, std::span<const std::uint8_t> a,
                std::span<const std::uint8_t> b);

enum class OrderingKind {
  original,
  revised,
  original_perturbed,
  revised_perturbed,
  random,
};

struct OrderingStrategy {
  OrderingKind kind = OrderingKind::original;
  std::uint64_t seed = 0;
};

// Relative magnitude of the perturbation applied to gamma+ (noise is uniform
// in [0, perturbation_scale * mean(gamma+)]).
inline constexpr double kPerturbationScale = 0.05;

std::vector<std::size_t> build_ordering(const BbqpInstance& inst,
                                        const OrderingStrategy& strategy);

// Two-phase greedy: rows in `order` enter a while they increase
// sum_j max(0, s_j); then b_j = [(a^T H)_j > 0].
BbqpSolution greedy(const BbqpInstance& inst,
                    std::span<const std::size_t> order);

std::vector<std::uint8_t> fix_b_given_a(const BbqpInstance& inst,
                                        std::span<const std::uint8_t> a);
std::vector<std::uint8_t> fix_a_given_b(const BbqpInstance& inst,
                                        std::span<const std::uint8_t> b);

// Alternates fix_a / fix_b from `start` until nothing changes or the value
// stops increasing.
BbqpSolution alternate(const BbqpInstance& inst, const BbqpSolution& start);

struct VariantOptions {
  std::size_t n_random = 22;
  std::uint64_t seed = 0;
  bool include_transposed = true;
};

// All greedy+alternate variants: original, revised and their perturbed
// versions on H and on H^T, then n_random random orderings on the smaller
// dimension.
std::vector<BbqpSolution> run_variants(const BbqpInstance& inst,
                                       const VariantOptions& options);

BbqpSolution best_of_variants(const BbqpInstance& inst, std::size_t n_random,
                              std::uint64_t seed);

struct ExactBbqpOptions {
  std::optional<BbqpSolution> warm;
  // Return as soon as a solution with value > cutoff is known.
  std::optional<double> cutoff;
  double time_cap_secs = -1.0;  // negative: no cap
  // When set, receives (parent bound, child bound) for every child created.
  std::vector<std::pair<double, double>>* bound_trace = nullptr;
};

struct ExactBbqpResult {
  BbqpSolution solution;
  double upper_bound = 0.0;
  bool proven_optimal = false;
  std::size_t nodes = 0;
};

// Depth-first branch-and-bound over the smaller dimension.
ExactBbqpResult exact_bbqp(const BbqpInstance& inst,
                           const ExactBbqpOptions& options = {});

}  // namespace bmf

#endif  // BMF_BBQP_HPP_
