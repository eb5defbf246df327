#ifndef BMF_COMMANDS_HPP_
#define BMF_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bmf/binmat.hpp"
#include "bmf/datasets.hpp"

namespace bmf {

struct RunConfig {
  std::string dataset;
  std::string matrix;
  std::size_t k = 2;
  double rho = 1.0;
  std::string pricing = "heur-multi";
  double budget_secs = 60.0;
  double mip_secs = 60.0;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string warm_start = "kgreedy";  // kgreedy | none | file
  std::string warm_file;
  std::string recipe_dir;  // empty: default
  std::string data_dir;    // empty: default
  bool progress = true;
};

struct SolveSummary {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t reduced_rows = 0;
  std::size_t reduced_cols = 0;
  std::size_t k = 0;
  double rho = 1.0;
  std::uint64_t error = 0;       // of the returned factors
  std::uint64_t mip_error = 0;   // before the column polish
  double lp_value = 0.0;
  bool lp_proved_optimal = false;
  double dual_bound = 0.0;  // lower bound on MIP(1) used for the gap
  double mip_objective = 0.0;  // MIP(1) objective of the integer solution
  double mip_rho = 1.0;        // rho of the MIP run that won
  double gap = 0.0;
  std::size_t cg_iterations = 0;
  std::size_t pool_size = 0;
  std::string termination;
  std::uint64_t warm_start_error = 0;
  std::uint64_t seed = 0;
};

// Loads the input named by cfg (dataset recipe or matrix file).
BinaryMatrix load_input(const RunConfig& cfg);

// reduce -> warm start -> column generation -> integer solve -> lift; writes
// factorisation.json, trace.json, trace.csv and summary.json under cfg.out
// (when cfg.out is nonempty). Progress lines go to `log`.
SolveSummary cmd_solve(const RunConfig& cfg, std::ostream& log);
SolveSummary solve_matrix(const BinaryMatrix& x, const RunConfig& cfg,
                          std::ostream& log);

struct BenchRow {
  std::string dataset;
  std::size_t k = 0;
  // Negative values mark cells that failed.
  double mlp_1k = -1;
  double mlp_1 = -1;
  double mip_objective = -1;
  double error = -1;
};

// One row per (input, k); inputs are dataset names or matrix paths.
std::vector<BenchRow> cmd_bench(const std::vector<std::string>& inputs,
                                const std::vector<std::size_t>& ks,
                                const RunConfig& base, std::ostream& log);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_bench_markdown(std::ostream& out, const std::vector<BenchRow>& rows);

struct OracleCheckConfig {
  std::size_t n = 3;
  std::size_t m = 3;
  std::size_t k_max = 2;
  // 0: every nonzero n x m matrix; otherwise this many seeded samples.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool inject_fault = false;
};

struct OracleCheckReport {
  bool pass = true;
  std::size_t matrices = 0;
  std::size_t checks = 0;
  std::vector<std::string> failures;
};

OracleCheckReport cmd_oracle_check(const OracleCheckConfig& cfg,
                                   std::ostream& log);

PreparedDataset cmd_prepare(const std::string& name, const std::string& source_dir,
                            const std::string& out_path,
                            const std::string& recipe_dir = "");

}  // namespace bmf

#endif  // BMF_COMMANDS_HPP_
