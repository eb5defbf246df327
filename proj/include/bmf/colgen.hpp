#ifndef BMF_COLGEN_HPP_
#define BMF_COLGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bmf/bbqp.hpp"
#include "bmf/binmat.hpp"
#include "bmf/lpcore.hpp"
#include "bmf/preprocess.hpp"

namespace bmf {

enum class PricingStrategy { exact, heur, heur_multi };

const char* to_string(PricingStrategy strategy);
// Accepts "exact", "heur", "heur-multi" and "heur_multi".
PricingStrategy parse_pricing(const std::string& name);

struct MasterConfig {
  double rho = 1.0;
  std::size_t k = 1;
  PricingStrategy pricing = PricingStrategy::heur_multi;
  double time_budget_secs = kInf;
  std::size_t max_columns_per_iter = 2;
  std::uint64_t seed = 0;
  std::size_t n_random = 22;
  // Columns need reduced cost below -reduced_cost_tol to enter.
  double reduced_cost_tol = 1e-9;
  // Share of the remaining budget given to an exact pricing call after the
  // heuristics fail.
  double escalation_fraction = 0.1;
  bool exact_cutoff = true;
  std::size_t max_iterations = std::numeric_limits<std::size_t>::max();
  // Harness self-test only: flips the sign of every reduced cost.
  bool inject_sign_fault = false;
  LpOptions lp{};

  void validate() const;
};

struct CgIteration;
using IterationCallback = std::function<void(const CgIteration&)>;

// Index of the ones of the reduced matrix in row-major order; one cover row
// of the master per entry.
class EntryIndex {
 public:
  explicit EntryIndex(const BinaryMatrix& x);

  std::size_t size() const { return entries_.size(); }
  std::pair<std::uint32_t, std::uint32_t> entry(std::size_t e) const {
    return entries_[e];
  }
  // -1 for zero cells.
  std::int64_t index(std::size_t i, std::size_t j) const {
    return lookup_[i * cols_ + j];
  }

 private:
  std::size_t cols_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;
  std::vector<std::int64_t> lookup_;
};

class ColumnPool {
 public:
  // False if a column with the same supports is already present.
  bool add(const Rank1Column& column);
  bool contains(const Rank1Column& column) const;
  const std::vector<Rank1Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }

 private:
  std::vector<Rank1Column> columns_;
  std::vector<Rank1Column> sorted_;
};

struct DualState {
  std::vector<double> p;  // one per entry of EntryIndex
  double mu = 0.0;
};

// Variables: xi_e for every entry (cost weight(e)), then q_l for every pool
// column (cost rho * covered zero weight). Rows: cover rows xi_e + sum q >= 1,
// then sum q <= k.
LpProblem build_restricted_master(const WeightedInstance& inst,
                                  const std::vector<Rank1Column>& pool,
                                  const MasterConfig& cfg);
LpColumn master_column(const WeightedInstance& inst, const EntryIndex& index,
                       const Rank1Column& column, double rho);

DualState extract_duals(const LpSolution& sol, std::size_t n_entries);

double reduced_cost(const WeightedInstance& inst, const EntryIndex& index,
                    const Rank1Column& column, const DualState& duals,
                    double rho);

// h_ij = p_e on ones, -rho * weight(i,j) on zeros.
BbqpInstance pricing_matrix(const WeightedInstance& inst,
                            const EntryIndex& index, const DualState& duals,
                            double rho);

struct Candidate {
  Rank1Column column;
  double reduced_cost = 0.0;
};

struct PricingOutcome {
  std::vector<Candidate> candidates;
  // Upper bound on max_a,b a^T H b, when known.
  std::optional<double> omega_bar;
  bool used_exact = false;
  bool exact_timed_out = false;
};

// remaining_secs bounds the time spent in exact pricing.
PricingOutcome price(const WeightedInstance& inst, const EntryIndex& index,
                     const DualState& duals, const MasterConfig& cfg,
                     const ColumnPool& pool, double remaining_secs,
                     std::uint64_t seed);

// Most negative reduced cost first, then repeatedly the candidate whose
// largest cell overlap with the chosen ones is smallest (ties by reduced
// cost). Drops candidates equal to an already chosen one.
std::vector<Candidate> select_orthogonal(std::vector<Candidate> candidates,
                                         std::size_t limit);

// z - k * max(0, omega_bar - mu).
double dual_bound(double z_rmlp, double omega_bar, double mu, std::size_t k);

enum class Termination { proved_optimal, time_budget, no_improving_column };

const char* to_string(Termination t);

struct CgIteration {
  std::size_t iteration = 0;
  double z_rmlp = 0.0;
  std::optional<double> bound;
  std::size_t columns_added = 0;
  std::string pricing_mode;
  double elapsed_secs = 0.0;
  std::size_t lp_iterations = 0;
};

struct CgReport {
  std::vector<CgIteration> trace;
  double lp_value = 0.0;
  // Best (largest) dual bound seen; -inf when none was emitted.
  double best_bound = -kInf;
  std::vector<Rank1Column> pool;
  std::vector<double> q;  // final master values, aligned with pool
  LpBasis basis;          // final master basis
  Termination termination = Termination::no_improving_column;
  double elapsed_secs = 0.0;
};

CgReport cg_solve(const WeightedInstance& inst, const MasterConfig& cfg,
                  const std::vector<Rank1Column>& warm_start = {},
                  const IterationCallback& on_iteration = {});

// Default warm start: k_greedy factors over several orderings plus their
// alternate-improved forms.
std::vector<Rank1Column> default_warm_start(const WeightedInstance& inst,
                                            std::size_t k, std::uint64_t seed);

}  // namespace bmf

#endif  // BMF_COLGEN_HPP_
