#ifndef BMF_BINMAT_HPP_
#define BMF_BINMAT_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmf {

// Thrown when two operands have incompatible shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense binary matrix stored as row-major bit rows packed into 64-bit words.
// Padding bits beyond cols() in the last word of each row are always zero.
class BinaryMatrix {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols);

  // Builds from nested 0/1 literals; every row must have the same length.
  static BinaryMatrix from_rows(
      std::initializer_list<std::initializer_list<int>> rows);
  // Builds from strings over {0,1}.
  static BinaryMatrix from_strings(const std::vector<std::string>& rows);
  static BinaryMatrix ones(std::size_t rows, std::size_t cols);
  static BinaryMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  bool get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_per_row_ + j / kWordBits] >> (j % kWordBits)) & 1u;
  }
  void set(std::size_t i, std::size_t j, bool value = true);

  std::span<const Word> row(std::size_t i) const {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<Word> mutable_row(std::size_t i) {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }

  std::size_t count_ones() const;
  std::size_t row_count(std::size_t i) const;
  bool row_is_zero(std::size_t i) const;

  BinaryMatrix transposed() const;
  BinaryMatrix complement() const;

  std::vector<std::string> to_strings() const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  void clear_padding();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<Word> bits_;
};

// Strictly increasing list of indices.
class SupportSet {
 public:
  SupportSet() = default;
  // Sorts and rejects duplicates.
  explicit SupportSet(std::vector<std::uint32_t> indices);
  SupportSet(std::initializer_list<std::uint32_t> indices)
      : SupportSet(std::vector<std::uint32_t>(indices)) {}

  static SupportSet from_indicator(std::span<const std::uint8_t> indicator);

  const std::vector<std::uint32_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::uint32_t index) const;
  // Largest index + 1, or 0 when empty.
  std::size_t bound() const {
    return indices_.empty() ? 0 : indices_.back() + 1;
  }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  std::vector<BinaryMatrix::Word> to_words(std::size_t dimension) const;

  friend auto operator<=>(const SupportSet&, const SupportSet&) = default;
  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::uint32_t> indices_;
};

// A rank-1 binary matrix a b^T given by its row and column supports, with
// cover statistics relative to the instance it was built against. Ordering
// and equality only look at the supports (the canonical key).
class Rank1Column {
 public:
  Rank1Column() = default;
  // Supports only; statistics stay zero.
  Rank1Column(SupportSet rows, SupportSet cols);

  // Supports plus statistics against X. Zero cells covered are weighted by
  // row_weight[i] * col_weight[j]; empty weight spans mean unit weights.
  static Rank1Column on(const BinaryMatrix& x, SupportSet rows, SupportSet cols,
                        std::span<const std::uint32_t> row_weight = {},
                        std::span<const std::uint32_t> col_weight = {});

  const SupportSet& row_support() const { return rows_; }
  const SupportSet& col_support() const { return cols_; }
  std::size_t area() const { return rows_.size() * cols_.size(); }
  std::size_t covered_ones() const { return covered_ones_; }
  double covered_zeros_weight() const { return covered_zeros_weight_; }

  bool covers(std::size_t i, std::size_t j) const {
    return rows_.contains(static_cast<std::uint32_t>(i)) &&
           cols_.contains(static_cast<std::uint32_t>(j));
  }

  friend bool operator==(const Rank1Column& a, const Rank1Column& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_;
  }
  friend std::strong_ordering operator<=>(const Rank1Column& a,
                                          const Rank1Column& b) {
    if (auto c = a.rows_ <=> b.rows_; c != 0) return c;
    return a.cols_ <=> b.cols_;
  }

 private:
  SupportSet rows_;
  SupportSet cols_;
  std::size_t covered_ones_ = 0;
  double covered_zeros_weight_ = 0.0;
};

// Up to k rank-1 factors; column l of A is columns[l].row_support() and row l
// of B is columns[l].col_support().
struct Factorisation {
  std::vector<Rank1Column> columns;
  std::size_t k = 0;

  // Drops repeated factors (by canonical key), keeping first occurrences.
  void deduplicate();
  // A as n x k and B as k x m with k = max(this->k, columns.size()).
  BinaryMatrix factor_a(std::size_t n) const;
  BinaryMatrix factor_b(std::size_t m) const;
};

// Z = A o B with OR/AND arithmetic.
BinaryMatrix boolean_product(const BinaryMatrix& a, const BinaryMatrix& b);

// Number of entries where X and Z disagree.
std::size_t factorisation_error(const BinaryMatrix& x, const BinaryMatrix& z);

BinaryMatrix column_to_matrix(const Rank1Column& column, std::size_t n,
                              std::size_t m);
BinaryMatrix cover_union(std::span<const Rank1Column> columns, std::size_t n,
                         std::size_t m);

// Text format: "n m" then n lines of m characters in {0,1}.
BinaryMatrix read_matrix(std::istream& in);
BinaryMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const BinaryMatrix& x);

}  // namespace bmf

#endif  // BMF_BINMAT_HPP_
