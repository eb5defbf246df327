#include "bmf/colgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bmf/bounds.hpp"
#include "bmf/random.hpp"

namespace bmf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::size_t intersection_size(const SupportSet& a, const SupportSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::size_t overlap(const Rank1Column& a, const Rank1Column& b) {
  return intersection_size(a.row_support(), b.row_support()) *
         intersection_size(a.col_support(), b.col_support());
}

}  // namespace

const char* to_string(PricingStrategy strategy) {
  switch (strategy) {
    case PricingStrategy::exact: return "exact";
    case PricingStrategy::heur: return "heur";
    case PricingStrategy::heur_multi: return "heur-multi";
  }
  return "?";
}

PricingStrategy parse_pricing(const std::string& name) {
  if (name == "exact") return PricingStrategy::exact;
  if (name == "heur") return PricingStrategy::heur;
  if (name == "heur-multi" || name == "heur_multi") {
    return PricingStrategy::heur_multi;
  }
  throw std::invalid_argument("unknown pricing strategy '" + name + "'");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::proved_optimal: return "proved_optimal";
    case Termination::time_budget: return "time_budget";
    case Termination::no_improving_column: return "no_improving_column";
  }
  return "?";
}

void MasterConfig::validate() const {
  if (!(rho > 0.0) || rho > 1.0) {
    throw std::invalid_argument("rho must lie in (0, 1]");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (max_columns_per_iter == 0) {
    throw std::invalid_argument("max_columns_per_iter must be >= 1");
  }
  if (time_budget_secs < 0) throw std::invalid_argument("negative time budget");
}

EntryIndex::EntryIndex(const BinaryMatrix& x)
    : cols_(x.cols()), lookup_(x.rows() * x.cols(), -1) {
  for (std::uint32_t i = 0; i < x.rows(); ++i) {
    for (std::uint32_t j = 0; j < x.cols(); ++j) {
      if (x.get(i, j)) {
        lookup_[i * cols_ + j] = static_cast<std::int64_t>(entries_.size());
        entries_.emplace_back(i, j);
      }
    }
  }
}

bool ColumnPool::add(const Rank1Column& column) {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), column);
  if (it != sorted_.end() && *it == column) return false;
  sorted_.insert(it, column);
  columns_.push_back(column);
  return true;
}

bool ColumnPool::contains(const Rank1Column& column) const {
  return std::binary_search(sorted_.begin(), sorted_.end(), column);
}

LpColumn master_column(const WeightedInstance& inst, const EntryIndex& index,
                       const Rank1Column& column, double rho) {
  LpColumn c;
  c.cost = rho * column.covered_zeros_weight();
  c.lower = 0.0;
  // No upper bound: q > 1 never lowers the objective, and without it the
  // master duals (p, mu) alone certify optimality.
  c.upper = kInf;
  for (std::uint32_t i : column.row_support()) {
    for (std::uint32_t j : column.col_support()) {
      const auto e = index.index(i, j);
      if (e >= 0) c.entries.push_back({static_cast<std::uint32_t>(e), 1.0});
    }
  }
  std::sort(c.entries.begin(), c.entries.end(),
            [](const LpEntry& a, const LpEntry& b) { return a.row < b.row; });
  c.entries.push_back({static_cast<std::uint32_t>(index.size()), 1.0});
  (void)inst;
  return c;
}

LpProblem build_restricted_master(const WeightedInstance& inst,
                                  const std::vector<Rank1Column>& pool,
                                  const MasterConfig& cfg) {
  const EntryIndex index(inst.matrix);
  LpProblem lp;
  for (std::size_t e = 0; e < index.size(); ++e) {
    lp.add_row(RowSense::greater_equal, 1.0);
  }
  lp.add_row(RowSense::less_equal, static_cast<double>(cfg.k));
  for (std::size_t e = 0; e < index.size(); ++e) {
    const auto [i, j] = index.entry(e);
    lp.add_column(inst.weight(i, j), 0.0, kInf,
                  {{static_cast<std::uint32_t>(e), 1.0}});
  }
  for (const auto& col : pool) {
    LpColumn c = master_column(inst, index, col, cfg.rho);
    lp.add_column(c.cost, c.lower, c.upper, std::move(c.entries));
  }
  return lp;
}

DualState extract_duals(const LpSolution& sol, std::size_t n_entries) {
  DualState d;
  d.p.assign(sol.duals.begin(), sol.duals.begin() + n_entries);
  for (double& v : d.p) v = std::max(0.0, v);
  d.mu = std::max(0.0, -sol.duals[n_entries]);
  return d;
}

double reduced_cost(const WeightedInstance& inst, const EntryIndex& index,
                    const Rank1Column& column, const DualState& duals,
                    double rho) {
  (void)inst;
  double covered = 0.0;
  for (std::uint32_t i : column.row_support()) {
    for (std::uint32_t j : column.col_support()) {
      const auto e = index.index(i, j);
      if (e >= 0) covered += duals.p[e];
    }
  }
  return rho * column.covered_zeros_weight() - covered + duals.mu;
}

BbqpInstance pricing_matrix(const WeightedInstance& inst,
                            const EntryIndex& index, const DualState& duals,
                            double rho) {
  const std::size_t n = inst.rows();
  const std::size_t m = inst.cols();
  std::vector<double> h(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto e = index.index(i, j);
      h[i * m + j] = e >= 0 ? duals.p[e] : -rho * inst.weight(i, j);
    }
  }
  return BbqpInstance(n, m, std::move(h));
}

std::vector<Candidate> select_orthogonal(std::vector<Candidate> candidates,
                                         std::size_t limit) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.reduced_cost < b.reduced_cost;
                   });
  std::vector<Candidate> chosen;
  std::vector<std::uint8_t> used(candidates.size(), 0);
  while (chosen.size() < limit) {
    std::size_t pick = candidates.size();
    std::size_t pick_overlap = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      bool duplicate = false;
      std::size_t worst = 0;
      for (const auto& s : chosen) {
        if (s.column == candidates[c].column) duplicate = true;
        worst = std::max(worst, overlap(s.column, candidates[c].column));
      }
      if (duplicate) {
        used[c] = 1;
        continue;
      }
      // Sorted by reduced cost, so the first minimiser wins ties.
      if (pick == candidates.size() || worst < pick_overlap) {
        pick = c;
        pick_overlap = worst;
      }
    }
    if (pick == candidates.size()) break;
    used[pick] = 1;
    chosen.push_back(candidates[pick]);
  }
  return chosen;
}

double dual_bound(double z_rmlp, double omega_bar, double mu, std::size_t k) {
  return z_rmlp - static_cast<double>(k) * std::max(0.0, omega_bar - mu);
}

PricingOutcome price(const WeightedInstance& inst, const EntryIndex& index,
                     const DualState& duals, const MasterConfig& cfg,
                     const ColumnPool& pool, double remaining_secs,
                     std::uint64_t seed) {
  const BbqpInstance h = pricing_matrix(inst, index, duals, cfg.rho);
  PricingOutcome out;

  std::vector<Candidate> found;
  auto consider = [&](const BbqpSolution& sol) {
    if (sol.empty()) return;
    Rank1Column col = inst.column(SupportSet::from_indicator(sol.a),
                                  SupportSet::from_indicator(sol.b));
    double rc = reduced_cost(inst, index, col, duals, cfg.rho);
    if (cfg.inject_sign_fault) rc = -rc;
    if (rc >= -cfg.reduced_cost_tol || pool.contains(col)) return;
    for (const auto& f : found) {
      if (f.column == col) return;
    }
    found.push_back({std::move(col), rc});
  };

  const auto variants = run_variants(h, {cfg.n_random, seed, true});
  const BbqpSolution* best = &variants.front();
  for (const auto& v : variants) {
    if (v.value > best->value + kValueTol) best = &v;
  }

  auto run_exact = [&](double cap, std::optional<double> cutoff) {
    ExactBbqpOptions opts;
    opts.warm = *best;
    opts.cutoff = cutoff;
    opts.time_cap_secs = std::isfinite(cap) ? std::max(cap, 0.0) : -1.0;
    ExactBbqpResult r = exact_bbqp(h, opts);
    out.used_exact = true;
    out.omega_bar = r.upper_bound;
    out.exact_timed_out = !r.proven_optimal && !(cutoff && r.solution.value > *cutoff + kValueTol);
    consider(r.solution);
  };

  if (cfg.pricing == PricingStrategy::exact) {
    run_exact(remaining_secs, std::nullopt);
    for (const auto& v : variants) consider(v);
    out.candidates = select_orthogonal(std::move(found), cfg.max_columns_per_iter);
    return out;
  }

  if (cfg.pricing == PricingStrategy::heur) {
    consider(*best);
  } else {
    for (const auto& v : variants) consider(v);
  }
  if (found.empty()) {
    const std::optional<double> cutoff =
        cfg.exact_cutoff ? std::optional<double>(duals.mu + cfg.reduced_cost_tol)
                         : std::nullopt;
    const auto t0 = Clock::now();
    run_exact(cfg.escalation_fraction * remaining_secs, cutoff);
    if (found.empty() && out.exact_timed_out) {
      run_exact(remaining_secs - seconds_since(t0), cutoff);
    }
  }
  const std::size_t limit =
      cfg.pricing == PricingStrategy::heur ? 1 : cfg.max_columns_per_iter;
  out.candidates = select_orthogonal(std::move(found), limit);
  return out;
}

std::vector<Rank1Column> default_warm_start(const WeightedInstance& inst,
                                            std::size_t k, std::uint64_t seed) {
  WarmStart ws = k_greedy_warm_start(inst, k, seed);
  ColumnPool pool;
  for (const auto& c : ws.columns) pool.add(c);

  const std::size_t n = inst.rows();
  const std::size_t m = inst.cols();
  std::vector<double> h(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      h[i * m + j] = (inst.matrix.get(i, j) ? 1.0 : -1.0) * inst.weight(i, j);
    }
  }
  const BbqpInstance bi(n, m, std::move(h));
  for (const auto& c : ws.columns) {
    BbqpSolution start;
    start.a.assign(n, 0);
    start.b.assign(m, 0);
    for (auto i : c.row_support()) start.a[i] = 1;
    for (auto j : c.col_support()) start.b[j] = 1;
    start.value = evaluate(bi, start.a, start.b);
    const BbqpSolution improved = alternate(bi, start);
    if (!improved.empty()) {
      pool.add(inst.column(SupportSet::from_indicator(improved.a),
                           SupportSet::from_indicator(improved.b)));
    }
  }
  return pool.columns();
}

CgReport cg_solve(const WeightedInstance& inst, const MasterConfig& cfg,
                  const std::vector<Rank1Column>& warm_start,
                  const IterationCallback& on_iteration) {
  cfg.validate();
  const auto start = Clock::now();
  const EntryIndex index(inst.matrix);
  ColumnPool pool;
  for (const auto& c : warm_start) {
    if (c.row_support().empty() || c.col_support().empty()) continue;
    pool.add(inst.column(c.row_support(), c.col_support()));
  }

  LpSolver solver(build_restricted_master(inst, pool.columns(), cfg), cfg.lp);
  LpSolution sol = solver.solve();
  CgReport report;
  for (std::size_t it = 0;; ++it) {
    if (sol.status != LpStatus::optimal) {
      throw LpNumericalError(std::string("restricted master ended ") +
                             to_string(sol.status));
    }
    const DualState duals = extract_duals(sol, index.size());
    CgIteration rec;
    rec.iteration = it;
    rec.z_rmlp = sol.objective;
    rec.lp_iterations = sol.iterations;
    report.lp_value = sol.objective;

    const double elapsed = seconds_since(start);
    if (elapsed >= cfg.time_budget_secs || it >= cfg.max_iterations) {
      rec.elapsed_secs = elapsed;
      report.trace.push_back(rec);
      report.termination = Termination::time_budget;
      break;
    }

    const PricingOutcome po =
        price(inst, index, duals, cfg, pool, cfg.time_budget_secs - elapsed,
              derive_seed(cfg.seed, it));
    rec.pricing_mode = po.used_exact ? "exact" : to_string(cfg.pricing);
    if (po.omega_bar) {
      rec.bound = dual_bound(sol.objective, *po.omega_bar, duals.mu, cfg.k);
      report.best_bound = std::max(report.best_bound, *rec.bound);
    }
    rec.elapsed_secs = seconds_since(start);
    if (po.candidates.empty()) {
      // Pool columns may price slightly above mu within the LP tolerance.
      const double proof_tol =
          std::max(cfg.reduced_cost_tol, 100 * cfg.lp.optimality_tol);
      if (po.used_exact && !po.exact_timed_out && po.omega_bar &&
          *po.omega_bar <= duals.mu + proof_tol) {
        report.termination = Termination::proved_optimal;
      } else if (po.exact_timed_out) {
        report.termination = Termination::time_budget;
      } else {
        report.termination = Termination::no_improving_column;
      }
      report.trace.push_back(rec);
      if (on_iteration) on_iteration(rec);
      break;
    }

    std::vector<LpColumn> added;
    for (const auto& c : po.candidates) {
      if (pool.add(c.column)) {
        added.push_back(master_column(inst, index, c.column, cfg.rho));
      }
    }
    rec.columns_added = added.size();
    report.trace.push_back(rec);
    if (on_iteration) on_iteration(rec);
    sol = reoptimize_with_new_columns(solver, added);
  }

  report.pool = pool.columns();
  report.basis = sol.basis;
  report.q.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(index.size()),
                  sol.x.end());
  report.elapsed_secs = seconds_since(start);
  return report;
}

}  // namespace bmf
