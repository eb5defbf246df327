#ifndef BMF_BOUNDS_HPP_
#define BMF_BOUNDS_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bmf/bbqp.hpp"
#include "bmf/binmat.hpp"
#include "bmf/preprocess.hpp"

namespace bmf {

enum class Arithmetic { boolean, standard };

struct KGreedyOptions {
  OrderingStrategy ordering{};
  // Run the first greedy phase on the columns instead of the rows.
  bool transposed = false;
  Arithmetic arithmetic = Arithmetic::boolean;
};

// Sequential rank-1 greedy on H = 2X - 1 (entries scaled by the instance
// weights). After each round the covered entries of H are set to 0, or to -K
// with K = sum of weighted ones under standard arithmetic. Rounds whose value
// is <= 0 end the loop.
Factorisation k_greedy(const WeightedInstance& inst, std::size_t k,
                       const KGreedyOptions& options = {});
Factorisation k_greedy(const BinaryMatrix& x, std::size_t k,
                       Arithmetic arithmetic = Arithmetic::boolean);

// Several k_greedy runs (original/revised orderings, both orientations, a few
// seeded random orderings); returns every factor found, deduplicated, and the
// best single factorisation.
struct WarmStart {
  std::vector<Rank1Column> columns;
  Factorisation best;
  std::uint64_t best_error = 0;
};
WarmStart k_greedy_warm_start(const WeightedInstance& inst, std::size_t k,
                              std::uint64_t seed, std::size_t n_random = 4);

using Entry = std::pair<std::uint32_t, std::uint32_t>;

struct IsolatedSet {
  std::vector<Entry> entries;
  std::size_t size() const { return entries.size(); }
};

// Checks both conditions of an isolated set of ones on every pair.
bool is_isolated_set(const BinaryMatrix& x, const std::vector<Entry>& entries);

IsolatedSet isolation_greedy(const BinaryMatrix& x, std::uint64_t seed);

struct IsolationResult {
  IsolatedSet best;
  bool proven = false;
  std::size_t nodes = 0;
};

// Maximum isolated set by branch-and-bound; `proven` is false when the time
// cap stopped the search, in which case best is only a lower bound.
IsolationResult isolation_exact(const BinaryMatrix& x,
                                double time_cap_secs = -1.0);

}  // namespace bmf

#endif  // BMF_BOUNDS_HPP_
