#include "bmf/mipsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "bmf/colgen.hpp"

namespace bmf {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntTol = 1e-6;
constexpr std::size_t kDiveEvery = 128;

struct Model {
  LpProblem lp;
  std::vector<std::size_t> q_vars;   // aligned with the pool
  std::vector<std::size_t> pi_vars;  // branched on after q
  std::function<double(const std::vector<Rank1Column>&)> objective;
  std::optional<LpBasis> root_basis;
};

bool integral_costs(const LpProblem& lp) {
  return std::all_of(lp.cost.begin(), lp.cost.end(),
                     [](double c) { return c == std::floor(c); });
}

double uncovered_ones_weight(const WeightedInstance& inst,
                             const BinaryMatrix& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    for (std::size_t j = 0; j < inst.cols(); ++j) {
      if (inst.matrix.get(i, j) && !z.get(i, j)) total += inst.weight(i, j);
    }
  }
  return total;
}

double exact_objective(const WeightedInstance& inst,
                       const std::vector<Rank1Column>& columns) {
  Factorisation f;
  f.columns = columns;
  return static_cast<double>(weighted_error(inst, f));
}

// Drops columns whose removal does not raise the objective.
std::vector<Rank1Column> prune_redundant(const Model& model,
                                         std::vector<Rank1Column> cols) {
  double current = model.objective(cols);
  for (std::size_t l = cols.size(); l-- > 0;) {
    std::vector<Rank1Column> without = cols;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(l));
    const double v = model.objective(without);
    if (v <= current + 1e-9) {
      cols = std::move(without);
      current = v;
    }
  }
  return cols;
}

MipResult branch_and_bound(const WeightedInstance& inst,
                           const std::vector<Rank1Column>& pool, std::size_t k,
                           const Model& model, const MipOptions& options) {
  const auto start = Clock::now();
  const bool integral = integral_costs(model.lp);
  LpSolver solver(model.lp, options.lp);

  std::vector<Rank1Column> best;
  double best_value = model.objective(best);
  double best_error = exact_objective(inst, best);
  // Ties on the model objective go to the smaller true error, then to fewer
  // columns.
  auto offer = [&](std::vector<Rank1Column> cols) {
    if (cols.size() > k) return;
    cols = prune_redundant(model, std::move(cols));
    const double v = model.objective(cols);
    const double e = exact_objective(inst, cols);
    const bool tie = v <= best_value + 1e-9;
    if (v < best_value - 1e-9 || (tie && e < best_error) ||
        (tie && e == best_error && cols.size() < best.size())) {
      best = std::move(cols);
      best_value = v;
      best_error = e;
    }
  };
  if (options.incumbent) {
    Factorisation f = *options.incumbent;
    f.deduplicate();
    std::vector<Rank1Column> cols;
    for (const auto& c : f.columns) {
      cols.push_back(inst.column(c.row_support(), c.col_support()));
    }
    offer(std::move(cols));
  }
  auto prunable = [&](double bound) {
    if (bound >= best_value - 1e-9) return true;
    return integral && std::ceil(bound - kIntTol) >= best_value - 1e-9;
  };

  std::vector<std::size_t> fixed_zero;
  auto apply = [&](const std::vector<std::pair<std::size_t, double>>& fixings) {
    for (std::size_t v : model.q_vars) solver.set_bounds(v, 0.0, 1.0);
    for (std::size_t v : model.pi_vars) solver.set_bounds(v, 0.0, 1.0);
    for (std::size_t v : fixed_zero) solver.set_bounds(v, 0.0, 0.0);
    for (const auto& [v, val] : fixings) solver.set_bounds(v, val, val);
  };
  // Fixes the largest fractional q to one and re-solves until the LP is
  // integral in q or stops being useful.
  auto dive = [&](std::vector<std::pair<std::size_t, double>> fixings) {
    for (std::size_t depth = 0; depth <= k; ++depth) {
      if (std::chrono::duration<double>(Clock::now() - start).count() >
          options.time_cap_secs) {
        return;
      }
      apply(fixings);
      const LpSolution s = solver.solve();
      if (s.status != LpStatus::optimal || prunable(s.objective)) return;
      std::size_t pick = SIZE_MAX;
      double top = 0.0;
      std::vector<Rank1Column> chosen;
      for (std::size_t l = 0; l < pool.size(); ++l) {
        const double x = s.x[model.q_vars[l]];
        if (x > 1.0 - kIntTol) chosen.push_back(pool[l]);
        else if (x > kIntTol && x > top) {
          top = x;
          pick = model.q_vars[l];
        }
      }
      offer(chosen);
      if (pick == SIZE_MAX) return;
      fixings.emplace_back(pick, 1.0);
    }
  };

  struct Node {
    std::vector<std::pair<std::size_t, double>> fixings;
    double bound;
    std::optional<LpBasis> basis;
  };
  std::vector<Node> open;
  open.push_back({{}, -kInf, model.root_basis});

  MipResult result;
  bool timed_out = false;
  while (!open.empty()) {
    if (std::chrono::duration<double>(Clock::now() - start).count() >
        options.time_cap_secs) {
      timed_out = true;
      break;
    }
    // Depth-first, with a periodic jump to the best-bound open node.
    if (result.nodes % 64 == 63) {
      auto it = std::min_element(open.begin(), open.end(),
                                 [](const Node& a, const Node& b) {
                                   return a.bound < b.bound;
                                 });
      std::iter_swap(it, open.end() - 1);
    }
    Node node = std::move(open.back());
    open.pop_back();
    if (prunable(node.bound)) continue;

    apply(node.fixings);
    if (node.basis) solver.set_basis(*node.basis);
    const LpSolution sol = solver.solve();
    ++result.nodes;
    if (sol.status == LpStatus::infeasible) continue;
    if (sol.status != LpStatus::optimal) {
      throw LpNumericalError(std::string("node relaxation ended ") +
                             to_string(sol.status));
    }
    if (prunable(sol.objective)) continue;
    if (result.nodes == 1) {
      dive(node.fixings);
      // Reduced-cost fixing: a q at zero whose reduced cost exceeds the
      // incumbent gap stays zero in every improving solution.
      for (std::size_t v : model.q_vars) {
        if (sol.x[v] <= kIntTol && prunable(sol.objective + sol.reduced_costs[v])) {
          fixed_zero.push_back(v);
        }
      }
      apply(node.fixings);
      solver.set_basis(sol.basis);
    } else if (result.nodes % kDiveEvery == 0) {
      dive(node.fixings);
      apply(node.fixings);
      solver.set_basis(sol.basis);
    }

    // Rounding: the k largest positive q, and the q >= 1/2 subset.
    std::vector<std::size_t> by_value(pool.size());
    for (std::size_t l = 0; l < pool.size(); ++l) by_value[l] = l;
    std::stable_sort(by_value.begin(), by_value.end(),
                     [&](std::size_t a, std::size_t b) {
                       return sol.x[model.q_vars[a]] > sol.x[model.q_vars[b]];
                     });
    std::vector<Rank1Column> top, half;
    for (std::size_t l : by_value) {
      const double x = sol.x[model.q_vars[l]];
      if (x > kIntTol && top.size() < k) top.push_back(pool[l]);
      if (x >= 0.5 - kIntTol && half.size() < k) half.push_back(pool[l]);
    }
    offer(top);
    offer(half);

    auto most_fractional = [&](const std::vector<std::size_t>& vars) {
      std::size_t pick = SIZE_MAX;
      double best_dist = 0.5 - kIntTol;
      for (std::size_t v : vars) {
        const double x = sol.x[v];
        const double dist = std::abs(x - std::floor(x) - 0.5);
        if (x - std::floor(x) > kIntTol && std::ceil(x) - x > kIntTol &&
            dist < best_dist) {
          best_dist = dist;
          pick = v;
        }
      }
      return pick;
    };
    std::size_t var = most_fractional(model.q_vars);
    if (var == SIZE_MAX) var = most_fractional(model.pi_vars);
    if (var == SIZE_MAX) {
      std::vector<Rank1Column> chosen;
      for (std::size_t l = 0; l < pool.size(); ++l) {
        if (sol.x[model.q_vars[l]] > 0.5) chosen.push_back(pool[l]);
      }
      offer(std::move(chosen));
      continue;
    }
    LpBasis basis = solver.basis();
    Node zero{node.fixings, sol.objective, basis};
    zero.fixings.emplace_back(var, 0.0);
    Node one{std::move(node.fixings), sol.objective, std::move(basis)};
    one.fixings.emplace_back(var, 1.0);
    open.push_back(std::move(zero));
    open.push_back(std::move(one));
  }

  result.factorisation.k = k;
  result.factorisation.columns = best;
  result.objective = best_value;
  result.true_error = weighted_error(inst, result.factorisation);
  result.optimal = !timed_out;
  result.bound = best_value;
  if (timed_out) {
    for (const auto& n : open) result.bound = std::min(result.bound, n.bound);
  }
  return result;
}

}  // namespace

double mip_rho_objective(const WeightedInstance& inst,
                         const std::vector<Rank1Column>& columns, double rho) {
  double total =
      uncovered_ones_weight(inst, cover_union(columns, inst.rows(), inst.cols()));
  for (const auto& c : columns) {
    total += rho * inst.column(c.row_support(), c.col_support())
                       .covered_zeros_weight();
  }
  return total;
}

MipResult solve_mip_rho(const WeightedInstance& inst,
                        const std::vector<Rank1Column>& pool, std::size_t k,
                        double rho, const MipOptions& options) {
  MasterConfig cfg;
  cfg.rho = rho;
  cfg.k = k;
  cfg.validate();
  Model model;
  model.lp = build_restricted_master(inst, pool, cfg);
  const std::size_t n_entries = model.lp.num_rows() - 1;
  for (std::size_t l = 0; l < pool.size(); ++l) {
    model.q_vars.push_back(n_entries + l);
    model.lp.upper[n_entries + l] = 1.0;
  }
  model.objective = [&inst, rho](const std::vector<Rank1Column>& cols) {
    return mip_rho_objective(inst, cols, rho);
  };
  if (options.warm_basis &&
      options.warm_basis->columns.size() == model.lp.num_cols() &&
      options.warm_basis->rows.size() == model.lp.num_rows()) {
    model.root_basis = *options.warm_basis;
  }
  MipResult r = branch_and_bound(inst, pool, k, model, options);
  r.rho = rho;
  return r;
}

MipResult solve_mip_exact_over_pool(const WeightedInstance& inst,
                                    const std::vector<Rank1Column>& pool,
                                    std::size_t k, const MipOptions& options) {
  MasterConfig cfg;
  cfg.k = k;
  cfg.validate();
  Model model;
  model.lp = build_restricted_master(inst, pool, cfg);
  const std::size_t n_entries = model.lp.num_rows() - 1;
  for (std::size_t l = 0; l < pool.size(); ++l) {
    const std::size_t v = n_entries + l;
    model.q_vars.push_back(v);
    model.lp.upper[v] = 1.0;
    model.lp.cost[v] = 0.0;
  }
  // One pi per zero cell covered by some pool column.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> zero_row;
  for (std::size_t l = 0; l < pool.size(); ++l) {
    for (std::uint32_t i : pool[l].row_support()) {
      for (std::uint32_t j : pool[l].col_support()) {
        if (inst.matrix.get(i, j)) continue;
        auto [it, inserted] = zero_row.try_emplace({i, j}, 0);
        if (inserted) {
          it->second = model.lp.add_row(RowSense::less_equal, 0.0);
          model.pi_vars.push_back(model.lp.add_column(
              inst.weight(i, j), 0.0, 1.0,
              {{static_cast<std::uint32_t>(it->second),
                -static_cast<double>(k)}}));
        }
        model.lp.columns[n_entries + l].push_back(
            {static_cast<std::uint32_t>(it->second), 1.0});
      }
    }
  }
  model.objective = [&inst](const std::vector<Rank1Column>& cols) {
    return exact_objective(inst, cols);
  };
  // The master basis extends with the new rows' slacks basic and pi at zero.
  if (options.warm_basis && options.warm_basis->columns.size() == n_entries + pool.size() &&
      options.warm_basis->rows.size() == n_entries + 1) {
    LpBasis b = *options.warm_basis;
    b.columns.resize(model.lp.num_cols(), VarStatus::at_lower);
    b.rows.resize(model.lp.num_rows(), VarStatus::basic);
    model.root_basis = std::move(b);
  }
  MipResult r = branch_and_bound(inst, pool, k, model, options);
  r.rho = 0.0;
  return r;
}

MipResult best_integer(const WeightedInstance& inst,
                       const std::vector<Rank1Column>& pool, std::size_t k,
                       const std::vector<double>& rhos,
                       const MipOptions& options, bool exact_polish) {
  if (rhos.empty()) throw std::invalid_argument("best_integer: no rho values");
  std::optional<MipResult> best;
  for (double rho : rhos) {
    MipResult r = solve_mip_rho(inst, pool, k, rho, options);
    if (!best || r.true_error < best->true_error) best = std::move(r);
  }
  if (exact_polish) {
    MipOptions polish = options;
    polish.incumbent = &best->factorisation;
    MipResult r = solve_mip_exact_over_pool(inst, pool, k, polish);
    if (r.true_error < best->true_error) best = std::move(r);
  }
  return *best;
}

Factorisation improve_columns(const WeightedInstance& inst, Factorisation f,
                              std::size_t k, double time_cap_secs) {
  const auto start = Clock::now();
  const std::size_t n = inst.rows(), m = inst.cols();
  f.deduplicate();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t l = 0; l < k; ++l) {
      const double left =
          time_cap_secs - std::chrono::duration<double>(Clock::now() - start).count();
      if (left <= 0) return f;
      std::vector<Rank1Column> others = f.columns;
      if (l < others.size()) others.erase(others.begin() + static_cast<std::ptrdiff_t>(l));
      const BinaryMatrix covered = cover_union(others, n, m);
      // Gain of covering (i, j) on top of the other factors.
      std::vector<double> h(n * m, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          if (covered.get(i, j)) continue;
          h[i * m + j] = inst.matrix.get(i, j) ? inst.weight(i, j) : -inst.weight(i, j);
        }
      }
      const BbqpInstance pp(n, m, std::move(h));
      BbqpSolution current{std::vector<std::uint8_t>(n, 0),
                           std::vector<std::uint8_t>(m, 0), 0.0};
      if (l < f.columns.size()) {
        for (auto i : f.columns[l].row_support()) current.a[i] = 1;
        for (auto j : f.columns[l].col_support()) current.b[j] = 1;
        current.value = evaluate(pp, current.a, current.b);
      }
      ExactBbqpOptions o;
      o.warm = current;
      o.time_cap_secs = left;
      const ExactBbqpResult r = exact_bbqp(pp, o);
      if (r.solution.value <= current.value + 1e-9 || r.solution.empty()) continue;
      std::vector<std::uint32_t> rows, cols;
      for (std::uint32_t i = 0; i < n; ++i)
        if (r.solution.a[i]) rows.push_back(i);
      for (std::uint32_t j = 0; j < m; ++j)
        if (r.solution.b[j]) cols.push_back(j);
      Rank1Column c = inst.column(SupportSet(rows), SupportSet(cols));
      if (l < f.columns.size()) {
        f.columns[l] = std::move(c);
      } else {
        f.columns.push_back(std::move(c));
      }
      improved = true;
    }
  }
  return f;
}

double optimality_certificate(double objective, double bound) {
  if (objective <= 0.0) return 0.0;
  if (objective == std::floor(objective) &&
      std::ceil(bound - kIntTol) >= objective) {
    return 0.0;
  }
  return std::max(0.0, 100.0 * (objective - bound) / objective);
}

}  // namespace bmf
