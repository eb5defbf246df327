#ifndef BMF_LPCORE_HPP_
#define BMF_LPCORE_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bmf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { greater_equal, less_equal, equal };

struct LpEntry {
  std::uint32_t row;
  double value;
};

// min c^T x  s.t.  A x (>=, <=, =) b,  lower <= x <= upper.
// A is stored by column.
struct LpProblem {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::vector<LpEntry>> columns;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;

  std::size_t num_rows() const { return rhs.size(); }
  std::size_t num_cols() const { return cost.size(); }

  std::size_t add_row(RowSense sense, double rhs_value);
  std::size_t add_column(double cost_value, double lo, double up,
                         std::vector<LpEntry> entries);

  // Throws std::invalid_argument on inconsistent dimensions or bounds.
  void validate() const;

  // Row activity A_i x.
  double row_activity(std::size_t row, const std::vector<double>& x) const;
};

// Writes the problem in CPLEX LP text format (debug aid).
void write_lp_format(std::ostream& out, const LpProblem& problem);

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, at_zero };

// Statuses for structural columns and for row slacks.
struct LpBasis {
  std::vector<VarStatus> columns;
  std::vector<VarStatus> rows;
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  std::size_t refactor_every = 64;
  std::size_t max_iterations = 1'000'000;
  // Bland's rule is engaged after this many consecutive degenerate pivots,
  // expressed as a multiple of (rows + cols).
  std::size_t bland_factor = 3;
  // Consecutive degenerate pivots before the bounds are perturbed once.
  std::size_t perturb_after = 200;
};

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  std::vector<double> x;
  // One multiplier per row: d = c - A^T y. Nonnegative on >= rows and
  // nonpositive on <= rows at optimality.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  std::size_t iterations = 0;
  LpBasis basis;
};

class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bounded-variable primal revised simplex with an explicit dense basis
// inverse. Keeps its basis between solve() calls, so columns can be added or
// bounds changed and the problem re-solved from the previous basis.
class LpSolver {
 public:
  explicit LpSolver(LpProblem problem, LpOptions options = {});

  const LpProblem& problem() const { return problem_; }
  const LpOptions& options() const { return options_; }

  // New columns start nonbasic.
  std::size_t add_column(double cost, double lo, double up,
                         std::vector<LpEntry> entries);
  void set_bounds(std::size_t col, double lo, double up);
  void set_basis(const LpBasis& basis);
  LpBasis basis() const;

  LpSolution solve();

 private:
  std::size_t total() const { return n_ + m_; }
  double lower(std::size_t j) const;
  double upper(std::size_t j) const;
  // Widens every non-fixed finite bound by a small random amount.
  void perturb_bounds();
  double base_lower(std::size_t j) const;
  double base_upper(std::size_t j) const;
  double cost(std::size_t j) const { return j < n_ ? problem_.cost[j] : 0.0; }
  // Writes column j of [A I] into dense vector out (size m).
  void load_column(std::size_t j, Eigen::VectorXd& out) const;
  double column_dot(std::size_t j, const Eigen::VectorXd& y) const;
  VarStatus default_nonbasic(std::size_t j) const;
  double nonbasic_value(std::size_t j) const;
  void sync_status_size();
  void install_slack_basis();
  bool refactor();
  // Replaces dependent basic columns by slacks, then refactors.
  void repair_basis();
  void compute_basic_values();
  double max_infeasibility() const;
  // max_i |b_i - A_i x - s_i| for the current values.
  double primal_residual() const;
  LpSolution extract(LpStatus status, const Eigen::VectorXd& y) const;

  LpProblem problem_;
  LpOptions options_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> pert_;  // empty unless perturbed
  std::vector<VarStatus> status_;  // n_ structurals then m_ slacks
  std::vector<double> value_;
  std::vector<std::size_t> basic_;  // basis position -> variable
  Eigen::MatrixXd binv_;
  bool basis_valid_ = false;
};

LpSolution solve_lp(const LpProblem& problem,
                    const std::optional<LpBasis>& warm_basis = std::nullopt,
                    const LpOptions& options = {});

struct LpColumn {
  double cost = 0.0;
  double lower = 0.0;
  double upper = kInf;
  std::vector<LpEntry> entries;
};

// Adds columns to a solver holding an optimal basis and re-solves.
LpSolution reoptimize_with_new_columns(LpSolver& solver,
                                       const std::vector<LpColumn>& added);

}  // namespace bmf

#endif  // BMF_LPCORE_HPP_
