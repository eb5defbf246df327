#ifndef BMF_PREPROCESS_HPP_
#define BMF_PREPROCESS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "bmf/binmat.hpp"

namespace bmf {

// Reduced instance: zero rows/columns removed and duplicate rows/columns
// merged. Entry (i, j) of the reduced matrix stands for row_mult[i] *
// col_mult[j] entries of the original.
struct WeightedInstance {
  BinaryMatrix matrix;
  std::vector<std::uint32_t> row_mult;
  std::vector<std::uint32_t> col_mult;
  // original index -> reduced index; nullopt for deleted zero rows/columns.
  std::vector<std::optional<std::uint32_t>> row_backmap;
  std::vector<std::optional<std::uint32_t>> col_backmap;
  std::size_t original_rows = 0;
  std::size_t original_cols = 0;

  // Unit multiplicities and identity backmaps; no reduction.
  static WeightedInstance unreduced(const BinaryMatrix& x);

  std::size_t rows() const { return matrix.rows(); }
  std::size_t cols() const { return matrix.cols(); }
  double weight(std::size_t i, std::size_t j) const {
    return static_cast<double>(row_mult[i]) * col_mult[j];
  }
  // Sum of weights over the ones of the reduced matrix (= |E| of the original).
  double ones_weight() const;

  Rank1Column column(SupportSet rows, SupportSet cols) const {
    return Rank1Column::on(matrix, std::move(rows), std::move(cols), row_mult,
                           col_mult);
  }
};

// Throws std::invalid_argument for an all-zero matrix.
WeightedInstance reduce(const BinaryMatrix& x);

// Sum over reduced entries of weight(i,j) * |x_ij - z_ij|.
std::uint64_t weighted_error(const WeightedInstance& inst,
                             const Factorisation& f);

// Expands every reduced support index to all original indices mapped to it.
Factorisation lift(const WeightedInstance& inst, const Factorisation& f);

}  // namespace bmf

#endif  // BMF_PREPROCESS_HPP_
