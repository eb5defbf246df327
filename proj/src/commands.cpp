#include "bmf/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bmf/bounds.hpp"
#include "bmf/colgen.hpp"
#include "bmf/mipsolve.hpp"
#include "bmf/oracle.hpp"
#include "bmf/preprocess.hpp"
#include "bmf/random.hpp"
#include "bmf/report.hpp"

namespace bmf {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string matrix_text(const BinaryMatrix& x) {
  std::ostringstream s;
  write_matrix(s, x);
  return s.str();
}

// Original-index supports -> reduced-index supports.
std::vector<Rank1Column> to_reduced(const WeightedInstance& inst,
                                    const Factorisation& f) {
  std::vector<Rank1Column> out;
  for (const auto& c : f.columns) {
    std::vector<std::uint32_t> rows, cols;
    for (auto i : c.row_support()) {
      if (i >= inst.row_backmap.size()) throw DimensionError("warm start: row out of range");
      if (inst.row_backmap[i]) rows.push_back(*inst.row_backmap[i]);
    }
    for (auto j : c.col_support()) {
      if (j >= inst.col_backmap.size()) throw DimensionError("warm start: column out of range");
      if (inst.col_backmap[j]) cols.push_back(*inst.col_backmap[j]);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (rows.empty() || cols.empty()) continue;
    out.push_back(inst.column(SupportSet(rows), SupportSet(cols)));
  }
  return out;
}

}  // namespace

BinaryMatrix load_input(const RunConfig& cfg) {
  if (!cfg.matrix.empty()) return read_matrix_file(cfg.matrix);
  if (cfg.dataset.empty()) {
    throw std::invalid_argument("either a dataset or a matrix file is required");
  }
  const auto manifest = load_manifest(
      cfg.dataset, cfg.recipe_dir.empty() ? default_recipe_dir() : cfg.recipe_dir);
  return prepare(manifest, cfg.data_dir.empty() ? default_data_dir() : cfg.data_dir)
      .matrix;
}

SolveSummary solve_matrix(const BinaryMatrix& x, const RunConfig& cfg,
                          std::ostream& log) {
  SolveSummary s;
  s.rows = x.rows();
  s.cols = x.cols();
  s.k = cfg.k;
  s.rho = cfg.rho;
  s.seed = cfg.seed;
  if (cfg.k == 0) throw std::invalid_argument("k must be >= 1");

  Factorisation lifted;
  lifted.k = cfg.k;
  CgReport report;
  if (x.count_ones() == 0) {
    s.termination = "trivial";
  } else {
    const WeightedInstance inst = reduce(x);
    s.reduced_rows = inst.rows();
    s.reduced_cols = inst.cols();

    std::vector<Rank1Column> warm;
    Factorisation incumbent;
    if (cfg.warm_start == "kgreedy") {
      const WarmStart ws = k_greedy_warm_start(inst, cfg.k, derive_seed(cfg.seed, 1));
      incumbent = ws.best;
      s.warm_start_error = ws.best_error;
      warm = default_warm_start(inst, cfg.k, derive_seed(cfg.seed, 1));
    } else if (cfg.warm_start == "file") {
      std::ifstream in(cfg.warm_file);
      if (!in) throw std::runtime_error("cannot read warm start " + cfg.warm_file);
      incumbent.columns = to_reduced(inst, factorisation_from_json(nlohmann::json::parse(in)));
      incumbent.k = cfg.k;
      if (incumbent.columns.size() > cfg.k) incumbent.columns.resize(cfg.k);
      warm = incumbent.columns;
      s.warm_start_error = weighted_error(inst, incumbent);
    } else if (cfg.warm_start != "none") {
      throw std::invalid_argument("unknown warm start '" + cfg.warm_start + "'");
    }

    MasterConfig mc;
    mc.k = cfg.k;
    mc.rho = cfg.rho;
    mc.pricing = parse_pricing(cfg.pricing);
    mc.time_budget_secs = cfg.budget_secs;
    mc.seed = derive_seed(cfg.seed, 2);
    report = cg_solve(inst, mc, warm, [&](const CgIteration& it) {
      if (!cfg.progress) return;
      log << "iter " << it.iteration << " z=" << fmt("%.4f", it.z_rmlp)
          << " bound=" << (it.bound ? fmt("%.4f", *it.bound) : std::string("-"))
          << " added=" << it.columns_added << " pricing=" << it.pricing_mode
          << " t=" << fmt("%.2fs", it.elapsed_secs) << '\n';
    });
    s.lp_value = report.lp_value;
    s.lp_proved_optimal = report.termination == Termination::proved_optimal;
    s.termination = to_string(report.termination);
    s.cg_iterations = report.trace.size();
    s.pool_size = report.pool.size();

    MipOptions mo;
    mo.time_cap_secs = cfg.mip_secs;
    mo.incumbent = incumbent.columns.empty() ? nullptr : &incumbent;
    mo.warm_basis = &report.basis;
    const MipResult mip = best_integer(inst, report.pool, cfg.k, {1.0, 0.95}, mo, true);
    s.mip_rho = mip.rho;
    s.mip_objective = mip_rho_objective(inst, mip.factorisation.columns, 1.0);
    // MIP(rho) <= MIP(1) for rho <= 1, so any MLP(rho) bound bounds MIP(1).
    const double lp_bound = s.lp_proved_optimal ? report.lp_value : report.best_bound;
    s.dual_bound = std::max(0.0, std::isfinite(lp_bound) ? lp_bound : 0.0);
    s.gap = optimality_certificate(s.mip_objective, s.dual_bound);
    s.mip_error = mip.true_error;
    const double left = std::max(0.0, cfg.mip_secs);
    Factorisation polished = improve_columns(inst, mip.factorisation, cfg.k, left);
    s.error = weighted_error(inst, polished);
    if (s.error > s.mip_error) {
      polished = mip.factorisation;
      s.error = s.mip_error;
    }
    lifted = lift(inst, polished);
    lifted.k = cfg.k;
    if (cfg.progress) {
      log << "mip rho=" << mip.rho << " objective(1)=" << s.mip_objective
          << " error=" << s.mip_error << " gap=" << fmt("%.2f%%", s.gap)
          << "; after column polish error=" << s.error << '\n';
    }
  }

  const BinaryMatrix z =
      boolean_product(lifted.factor_a(x.rows()), lifted.factor_b(x.cols()));
  const std::uint64_t direct = factorisation_error(x, z);
  if (direct != s.error) {
    throw std::logic_error("lifted factorisation error " + std::to_string(direct) +
                           " differs from reduced error " + std::to_string(s.error));
  }

  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    const fs::path out(cfg.out);
    write_json_file((out / "factorisation.json").string(),
                    factorisation_json(lifted, x.rows(), x.cols(), s.error));
    nlohmann::json trace = cg_report_json(report);
    write_json_file((out / "trace.json").string(), trace);
    std::ofstream csv(out / "trace.csv");
    write_trace_csv(csv, report);
    nlohmann::json summary = {
        {"input", cfg.dataset.empty() ? cfg.matrix : cfg.dataset},
        {"rows", s.rows},
        {"cols", s.cols},
        {"reduced_rows", s.reduced_rows},
        {"reduced_cols", s.reduced_cols},
        {"k", s.k},
        {"rho", s.rho},
        {"pricing", cfg.pricing},
        {"budget_secs", cfg.budget_secs},
        {"seed", s.seed},
        {"error", s.error},
        {"lp_value", s.lp_value},
        {"lp_proved_optimal", s.lp_proved_optimal},
        {"dual_bound", s.dual_bound},
        {"mip_objective", s.mip_objective},
        {"mip_rho", s.mip_rho},
        {"mip_error", s.mip_error},
        {"gap_percent", s.gap},
        {"cg_iterations", s.cg_iterations},
        {"pool_size", s.pool_size},
        {"termination", s.termination},
        {"warm_start_error", s.warm_start_error}};
    write_json_file((out / "summary.json").string(), summary);
  }
  return s;
}

SolveSummary cmd_solve(const RunConfig& cfg, std::ostream& log) {
  return solve_matrix(load_input(cfg), cfg, log);
}

std::vector<BenchRow> cmd_bench(const std::vector<std::string>& inputs,
                                const std::vector<std::size_t>& ks,
                                const RunConfig& base, std::ostream& log) {
  std::vector<BenchRow> rows;
  for (const auto& input : inputs) {
    RunConfig cfg = base;
    cfg.out.clear();
    if (fs::exists(input)) {
      cfg.matrix = input;
      cfg.dataset.clear();
    } else {
      cfg.dataset = input;
      cfg.matrix.clear();
    }
    BinaryMatrix x;
    try {
      x = load_input(cfg);
    } catch (const std::exception& e) {
      log << input << ": " << e.what() << '\n';
      for (std::size_t k : ks) rows.push_back({input, k});
      continue;
    }
    for (std::size_t k : ks) {
      BenchRow row{input, k};
      cfg.k = k;
      try {
        cfg.rho = 1.0 / static_cast<double>(k);
        row.mlp_1k = solve_matrix(x, cfg, log).lp_value;
        cfg.rho = 1.0;
        const SolveSummary s = solve_matrix(x, cfg, log);
        row.mlp_1 = s.lp_value;
        row.mip_objective = s.mip_objective;
        row.error = static_cast<double>(s.error);
      } catch (const std::exception& e) {
        log << input << " k=" << k << ": " << e.what() << '\n';
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  auto cell = [](double v) { return v < 0 ? std::string() : fmt("%.2f", v); };
  out << "dataset,k,mlp_1k,mlp_1,mip_objective,error\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.k << ',' << cell(r.mlp_1k) << ','
        << cell(r.mlp_1) << ',' << cell(r.mip_objective) << ',' << cell(r.error)
        << '\n';
  }
}

void write_bench_markdown(std::ostream& out, const std::vector<BenchRow>& rows) {
  auto cell = [](double v) { return v < 0 ? std::string("-") : fmt("%.2f", v); };
  out << "| dataset | k | MLP(1/k) | MLP(1) | MIP(1) | error |\n"
      << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.dataset << " | " << r.k << " | " << cell(r.mlp_1k) << " | "
        << cell(r.mlp_1) << " | " << cell(r.mip_objective) << " | "
        << cell(r.error) << " |\n";
  }
}

OracleCheckReport cmd_oracle_check(const OracleCheckConfig& cfg,
                                   std::ostream& log) {
  if (cfg.n * cfg.m > 16) {
    throw GuardError("oracle check supports at most 16 cells");
  }
  OracleCheckReport rep;
  const std::size_t cells = cfg.n * cfg.m;
  std::vector<std::uint64_t> codes;
  if (cfg.samples == 0) {
    for (std::uint64_t c = 1; c < (std::uint64_t{1} << cells); ++c) codes.push_back(c);
  } else {
    Rng rng(cfg.seed);
    while (codes.size() < cfg.samples) {
      const std::uint64_t c = rng.below((std::uint64_t{1} << cells) - 1) + 1;
      codes.push_back(c);
    }
  }

  auto fail = [&](const BinaryMatrix& x, const std::string& what) {
    rep.pass = false;
    rep.failures.push_back(what + "\n" + matrix_text(x));
    log << "FAIL " << what << "\n" << matrix_text(x);
  };

  for (std::uint64_t code : codes) {
    BinaryMatrix x(cfg.n, cfg.m);
    for (std::size_t c = 0; c < cells; ++c) {
      if (code >> c & 1) x.set(c / cfg.m, c % cfg.m);
    }
    ++rep.matrices;
    const WeightedInstance inst = reduce(x);
    const auto pool = enumerate_rank1(x);
    const IsolationResult iso = isolation_exact(x);

    for (std::size_t k = 1; k <= cfg.k_max; ++k) {
      std::vector<double> rhos = {1.0};
      if (k > 1) rhos.push_back(1.0 / static_cast<double>(k));
      double mlp_1 = 0.0, mlp_1k = 0.0;
      for (double rho : rhos) {
        const double oracle = full_mlp(x, k, rho);
        if (rho == 1.0) mlp_1 = oracle;
        if (rho == 1.0 / static_cast<double>(k)) mlp_1k = oracle;
        MasterConfig mc;
        mc.k = k;
        mc.rho = rho;
        mc.pricing = PricingStrategy::exact;
        mc.seed = derive_seed(cfg.seed, code);
        mc.inject_sign_fault = cfg.inject_fault;
        const CgReport r = cg_solve(inst, mc);
        ++rep.checks;
        if (std::abs(r.lp_value - oracle) > 1e-6) {
          fail(x, "cg_solve k=" + std::to_string(k) + " rho=" + fmt("%g", rho) +
                      " gave " + fmt("%.9g", r.lp_value) + ", full_mlp " +
                      fmt("%.9g", oracle));
        }
        for (const auto& it : r.trace) {
          if (it.bound && *it.bound > oracle + 1e-6) {
            fail(x, "dual bound " + fmt("%.9g", *it.bound) + " exceeds " +
                        fmt("%.9g", oracle));
          }
        }
        if (iso.proven && k < iso.best.size() &&
            rho == 1.0 / static_cast<double>(k) && !(r.lp_value > 1e-6)) {
          fail(x, "positive value below i(X): got " + fmt("%.9g", r.lp_value) + " with k=" +
                      std::to_string(k) + " < i(X)=" +
                      std::to_string(iso.best.size()));
        }
      }
      if (k == 1) mlp_1k = mlp_1;

      const auto exhaustive = exhaustive_kbmf(x, k);
      const MipResult mip =
          solve_mip_exact_over_pool(WeightedInstance::unreduced(x), pool, k);
      ++rep.checks;
      if (mip.objective != static_cast<double>(exhaustive.error) ||
          mip.true_error != exhaustive.error) {
        fail(x, "MIP_exact k=" + std::to_string(k) + " gave " +
                    fmt("%g", mip.objective) + ", exhaustive " +
                    std::to_string(exhaustive.error));
      }
      const double kd = static_cast<double>(k);
      const double mip_1k = exhaustive_mip_rho(x, k, 1.0 / kd);
      const double mip_1 = exhaustive_mip_rho(x, k, 1.0);
      const double zeta = static_cast<double>(exhaustive.error);
      ++rep.checks;
      if (mip_1k > zeta + 1e-9 || zeta > mip_1 + 1e-9 || mlp_1k > mlp_1 + 1e-9) {
        fail(x, "relation chain k=" + std::to_string(k) + ": " + fmt("%g", mip_1k) +
                    " <= " + fmt("%g", zeta) + " <= " + fmt("%g", mip_1) +
                    ", " + fmt("%g", mlp_1k) + " <= " + fmt("%g", mlp_1));
      }
    }
  }
  return rep;
}

PreparedDataset cmd_prepare(const std::string& name, const std::string& source_dir,
                            const std::string& out_path,
                            const std::string& recipe_dir) {
  const auto manifest =
      load_manifest(name, recipe_dir.empty() ? default_recipe_dir() : recipe_dir);
  PreparedDataset d =
      prepare(manifest, source_dir.empty() ? default_data_dir() : source_dir);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_matrix(out, d.matrix);
  }
  return d;
}

}  // namespace bmf
