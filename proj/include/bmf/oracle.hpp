#ifndef BMF_ORACLE_HPP_
#define BMF_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bmf/bbqp.hpp"
#include "bmf/binmat.hpp"

namespace bmf {

// Thrown when an oracle input exceeds its enumeration guard.
class GuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kRank1Guard = 1'000'000;
inline constexpr std::uint64_t kSubsetGuard = 10'000'000;

// All (2^n - 1)(2^m - 1) rank-1 columns with statistics against x.
std::vector<Rank1Column> enumerate_rank1(const BinaryMatrix& x);
std::uint64_t rank1_count(std::size_t n, std::size_t m);

// MLP(rho) over every rank-1 column, on the unreduced matrix.
double full_mlp(const BinaryMatrix& x, std::size_t k, double rho);

struct ExhaustiveResult {
  std::uint64_t error = 0;
  Factorisation witness;
};

// Minimum factorisation error over all sets of at most k rank-1 matrices.
ExhaustiveResult exhaustive_kbmf(const BinaryMatrix& x, std::size_t k);

// Minimum MIP(rho) objective over all sets of at most k rank-1 matrices.
double exhaustive_mip_rho(const BinaryMatrix& x, std::size_t k, double rho);

// Enumerates a over the smaller side and sets b by sign.
BbqpSolution brute_bbqp(const BbqpInstance& h);
// Enumerates every (a, b) pair; for cross-checking brute_bbqp.
BbqpSolution brute_bbqp_pairs(const BbqpInstance& h);

}  // namespace bmf

#endif  // BMF_ORACLE_HPP_
