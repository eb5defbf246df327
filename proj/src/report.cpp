#include "bmf/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace bmf {

nlohmann::json factorisation_json(const Factorisation& f, std::size_t n,
                                  std::size_t m, std::uint64_t error) {
  nlohmann::json j;
  j["A"] = f.factor_a(n).to_strings();
  j["B"] = f.factor_b(m).to_strings();
  j["k"] = std::max(f.k, f.columns.size());
  j["error"] = error;
  return j;
}

Factorisation factorisation_from_json(const nlohmann::json& j) {
  const auto a_rows = j.at("A").get<std::vector<std::string>>();
  const auto b_rows = j.at("B").get<std::vector<std::string>>();
  const BinaryMatrix a = BinaryMatrix::from_strings(a_rows);
  const BinaryMatrix b = BinaryMatrix::from_strings(b_rows);
  if (a.cols() != b.rows()) {
    throw DimensionError("factorisation file: A has " + std::to_string(a.cols()) +
                         " columns but B has " + std::to_string(b.rows()) +
                         " rows");
  }
  Factorisation f;
  f.k = a.cols();
  for (std::size_t l = 0; l < a.cols(); ++l) {
    std::vector<std::uint32_t> rows, cols;
    for (std::uint32_t i = 0; i < a.rows(); ++i) {
      if (a.get(i, l)) rows.push_back(i);
    }
    for (std::uint32_t jj = 0; jj < b.cols(); ++jj) {
      if (b.get(l, jj)) cols.push_back(jj);
    }
    if (rows.empty() || cols.empty()) continue;
    f.columns.emplace_back(SupportSet(rows), SupportSet(cols));
  }
  return f;
}

nlohmann::json cg_report_json(const CgReport& report) {
  nlohmann::json j;
  j["lp_value"] = report.lp_value;
  j["best_bound"] = std::isfinite(report.best_bound)
                        ? nlohmann::json(report.best_bound)
                        : nlohmann::json(nullptr);
  j["termination"] = to_string(report.termination);
  j["elapsed_secs"] = report.elapsed_secs;
  j["pool_size"] = report.pool.size();
  auto& trace = j["trace"] = nlohmann::json::array();
  for (const auto& it : report.trace) {
    trace.push_back({{"iteration", it.iteration},
                     {"z_rmlp", it.z_rmlp},
                     {"bound", it.bound ? nlohmann::json(*it.bound)
                                        : nlohmann::json(nullptr)},
                     {"columns_added", it.columns_added},
                     {"pricing", it.pricing_mode},
                     {"elapsed_secs", it.elapsed_secs},
                     {"lp_iterations", it.lp_iterations}});
  }
  return j;
}

void write_trace_csv(std::ostream& out, const CgReport& report) {
  out << "elapsed_secs,z_rmlp,bound\n";
  out << std::setprecision(10);
  for (const auto& it : report.trace) {
    out << it.elapsed_secs << ',' << it.z_rmlp << ',';
    if (it.bound) out << *it.bound;
    out << '\n';
  }
}

nlohmann::json mip_result_json(const MipResult& r) {
  return {{"objective", r.objective}, {"true_error", r.true_error},
          {"bound", r.bound},         {"optimal", r.optimal},
          {"nodes", r.nodes},         {"rho", r.rho},
          {"columns", r.factorisation.columns.size()}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace bmf
