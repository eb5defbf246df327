#ifndef BMF_MIPSOLVE_HPP_
#define BMF_MIPSOLVE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bmf/binmat.hpp"
#include "bmf/lpcore.hpp"
#include "bmf/preprocess.hpp"

namespace bmf {

struct MipResult {
  // Chosen columns on the reduced instance.
  Factorisation factorisation;
  double objective = 0.0;
  std::uint64_t true_error = 0;
  // Lower bound on the model optimum over the pool.
  double bound = 0.0;
  bool optimal = false;
  std::size_t nodes = 0;
  double rho = 1.0;
};

struct MipOptions {
  double time_cap_secs = kInf;
  // Optional starting incumbent (any columns, need not be in the pool).
  const Factorisation* incumbent = nullptr;
  // Optional root basis, e.g. the final master basis of column generation
  // over the same pool. Ignored when the shapes do not match.
  const LpBasis* warm_basis = nullptr;
  LpOptions lp{};
};

// MIP(rho) restricted to `pool`: binary q, continuous xi.
MipResult solve_mip_rho(const WeightedInstance& inst,
                        const std::vector<Rank1Column>& pool, std::size_t k,
                        double rho, const MipOptions& options = {});

// MIP_exact restricted to `pool`: adds pi_z for every zero cell covered by
// some pool column, with sum_{l covers z} q_l <= k pi_z.
MipResult solve_mip_exact_over_pool(const WeightedInstance& inst,
                                    const std::vector<Rank1Column>& pool,
                                    std::size_t k,
                                    const MipOptions& options = {});

// Runs solve_mip_rho for every rho and keeps the smallest true error. With
// exact_polish, MIP_exact over the pool then starts from that incumbent.
MipResult best_integer(const WeightedInstance& inst,
                       const std::vector<Rank1Column>& pool, std::size_t k,
                       const std::vector<double>& rhos = {1.0, 0.95},
                       const MipOptions& options = {},
                       bool exact_polish = false);

// Re-solves one factor at a time exactly (BBQP on the cells the other
// factors leave uncovered) until no factor changes or time runs out. Never
// raises the error.
Factorisation improve_columns(const WeightedInstance& inst, Factorisation f,
                              std::size_t k, double time_cap_secs = kInf);

// 100 * (objective - bound) / objective, and 0 when ceil(bound) reaches an
// integral objective.
double optimality_certificate(double objective, double bound);

// MIP(rho) objective of a set of columns: uncovered ones weight plus rho
// times the covered zero weight of each column.
double mip_rho_objective(const WeightedInstance& inst,
                         const std::vector<Rank1Column>& columns, double rho);

}  // namespace bmf

#endif  // BMF_MIPSOLVE_HPP_
