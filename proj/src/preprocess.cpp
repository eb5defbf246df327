#include "bmf/preprocess.hpp"

#include <map>
#include <stdexcept>

namespace bmf {

namespace {

// Groups identical rows of x in first-occurrence order. group_of[i] is the
// group of row i; representatives[g] is the first row of group g.
void group_rows(const BinaryMatrix& x, std::vector<std::uint32_t>& group_of,
                std::vector<std::uint32_t>& representatives,
                std::vector<std::uint32_t>& counts) {
  std::map<std::vector<BinaryMatrix::Word>, std::uint32_t> seen;
  group_of.assign(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    std::vector<BinaryMatrix::Word> key(r.begin(), r.end());
    auto [it, inserted] =
        seen.emplace(std::move(key), static_cast<std::uint32_t>(counts.size()));
    if (inserted) {
      representatives.push_back(static_cast<std::uint32_t>(i));
      counts.push_back(0);
    }
    group_of[i] = it->second;
    ++counts[it->second];
  }
}

}  // namespace

WeightedInstance WeightedInstance::unreduced(const BinaryMatrix& x) {
  WeightedInstance inst;
  inst.matrix = x;
  inst.row_mult.assign(x.rows(), 1);
  inst.col_mult.assign(x.cols(), 1);
  for (std::uint32_t i = 0; i < x.rows(); ++i) inst.row_backmap.emplace_back(i);
  for (std::uint32_t j = 0; j < x.cols(); ++j) inst.col_backmap.emplace_back(j);
  inst.original_rows = x.rows();
  inst.original_cols = x.cols();
  return inst;
}

double WeightedInstance::ones_weight() const {
  double total = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      if (matrix.get(i, j)) total += weight(i, j);
    }
  }
  return total;
}

WeightedInstance reduce(const BinaryMatrix& x) {
  if (x.count_ones() == 0) {
    throw std::invalid_argument(
        "reduce: all-zero matrix (trivial instance, error 0 with no factors)");
  }
  WeightedInstance inst;
  inst.original_rows = x.rows();
  inst.original_cols = x.cols();
  inst.row_backmap.assign(x.rows(), std::nullopt);
  inst.col_backmap.assign(x.cols(), std::nullopt);

  // Nonzero rows, then dedup among them.
  std::vector<std::uint32_t> kept_rows;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!x.row_is_zero(i)) kept_rows.push_back(static_cast<std::uint32_t>(i));
  }
  BinaryMatrix nz(kept_rows.size(), x.cols());
  for (std::size_t r = 0; r < kept_rows.size(); ++r) {
    auto dst = nz.mutable_row(r);
    auto src = x.row(kept_rows[r]);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  std::vector<std::uint32_t> row_group, row_reps;
  group_rows(nz, row_group, row_reps, inst.row_mult);
  for (std::size_t r = 0; r < kept_rows.size(); ++r) {
    inst.row_backmap[kept_rows[r]] = row_group[r];
  }
  BinaryMatrix rows_reduced(row_reps.size(), x.cols());
  for (std::size_t g = 0; g < row_reps.size(); ++g) {
    auto dst = rows_reduced.mutable_row(g);
    auto src = nz.row(row_reps[g]);
    std::copy(src.begin(), src.end(), dst.begin());
  }

  // Columns: same procedure on the transpose.
  const BinaryMatrix t = rows_reduced.transposed();
  std::vector<std::uint32_t> kept_cols;
  for (std::size_t j = 0; j < t.rows(); ++j) {
    if (!t.row_is_zero(j)) kept_cols.push_back(static_cast<std::uint32_t>(j));
  }
  BinaryMatrix tnz(kept_cols.size(), t.cols());
  for (std::size_t c = 0; c < kept_cols.size(); ++c) {
    auto dst = tnz.mutable_row(c);
    auto src = t.row(kept_cols[c]);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  std::vector<std::uint32_t> col_group, col_reps;
  group_rows(tnz, col_group, col_reps, inst.col_mult);
  for (std::size_t c = 0; c < kept_cols.size(); ++c) {
    inst.col_backmap[kept_cols[c]] = col_group[c];
  }
  BinaryMatrix reduced_t(col_reps.size(), t.cols());
  for (std::size_t g = 0; g < col_reps.size(); ++g) {
    auto dst = reduced_t.mutable_row(g);
    auto src = tnz.row(col_reps[g]);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  inst.matrix = reduced_t.transposed();
  return inst;
}

std::uint64_t weighted_error(const WeightedInstance& inst,
                             const Factorisation& f) {
  const BinaryMatrix z = cover_union(f.columns, inst.rows(), inst.cols());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < inst.rows(); ++i) {
    for (std::size_t j = 0; j < inst.cols(); ++j) {
      if (inst.matrix.get(i, j) != z.get(i, j)) {
        total += static_cast<std::uint64_t>(inst.row_mult[i]) * inst.col_mult[j];
      }
    }
  }
  return total;
}

Factorisation lift(const WeightedInstance& inst, const Factorisation& f) {
  std::vector<std::vector<std::uint32_t>> row_members(inst.rows());
  std::vector<std::vector<std::uint32_t>> col_members(inst.cols());
  for (std::uint32_t i = 0; i < inst.row_backmap.size(); ++i) {
    if (inst.row_backmap[i]) row_members[*inst.row_backmap[i]].push_back(i);
  }
  for (std::uint32_t j = 0; j < inst.col_backmap.size(); ++j) {
    if (inst.col_backmap[j]) col_members[*inst.col_backmap[j]].push_back(j);
  }
  Factorisation out;
  out.k = f.k;
  for (const auto& c : f.columns) {
    std::vector<std::uint32_t> rows, cols;
    for (std::uint32_t r : c.row_support()) {
      if (r >= inst.rows()) throw DimensionError("lift: row support out of range");
      rows.insert(rows.end(), row_members[r].begin(), row_members[r].end());
    }
    for (std::uint32_t s : c.col_support()) {
      if (s >= inst.cols()) throw DimensionError("lift: col support out of range");
      cols.insert(cols.end(), col_members[s].begin(), col_members[s].end());
    }
    out.columns.emplace_back(SupportSet(std::move(rows)),
                             SupportSet(std::move(cols)));
  }
  return out;
}

}  // namespace bmf
