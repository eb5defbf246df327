#include "bmf/binmat.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bmf {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_per_row_((cols + kWordBits - 1) / kWordBits),
      bits_(rows * words_per_row_, 0) {}

BinaryMatrix BinaryMatrix::from_rows(
    std::initializer_list<std::initializer_list<int>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  BinaryMatrix x(n, m);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != m) {
      throw DimensionError("ragged row " + std::to_string(i) + ": expected " +
                           std::to_string(m) + " entries, got " +
                           std::to_string(r.size()));
    }
    std::size_t j = 0;
    for (int v : r) {
      if (v != 0 && v != 1) throw std::invalid_argument("entry not in {0,1}");
      x.set(i, j++, v == 1);
    }
    ++i;
  }
  return x;
}

BinaryMatrix BinaryMatrix::from_strings(const std::vector<std::string>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  BinaryMatrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) {
      throw DimensionError("ragged row " + std::to_string(i) + ": expected " +
                           std::to_string(m) + " characters, got " +
                           std::to_string(rows[i].size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const char c = rows[i][j];
      if (c != '0' && c != '1') {
        throw std::invalid_argument("row " + std::to_string(i) +
                                    ": character not in {0,1}");
      }
      x.set(i, j, c == '1');
    }
  }
  return x;
}

BinaryMatrix BinaryMatrix::ones(std::size_t rows, std::size_t cols) {
  BinaryMatrix x(rows, cols);
  std::fill(x.bits_.begin(), x.bits_.end(), ~Word{0});
  x.clear_padding();
  return x;
}

BinaryMatrix BinaryMatrix::identity(std::size_t n) {
  BinaryMatrix x(n, n);
  for (std::size_t i = 0; i < n; ++i) x.set(i, i);
  return x;
}

void BinaryMatrix::set(std::size_t i, std::size_t j, bool value) {
  Word& w = bits_[i * words_per_row_ + j / kWordBits];
  const Word mask = Word{1} << (j % kWordBits);
  if (value) {
    w |= mask;
  } else {
    w &= ~mask;
  }
}

std::size_t BinaryMatrix::count_ones() const {
  std::size_t total = 0;
  for (Word w : bits_) total += std::popcount(w);
  return total;
}

std::size_t BinaryMatrix::row_count(std::size_t i) const {
  std::size_t total = 0;
  for (Word w : row(i)) total += std::popcount(w);
  return total;
}

bool BinaryMatrix::row_is_zero(std::size_t i) const {
  for (Word w : row(i)) {
    if (w != 0) return false;
  }
  return true;
}

BinaryMatrix BinaryMatrix::transposed() const {
  BinaryMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (get(i, j)) t.set(j, i);
    }
  }
  return t;
}

BinaryMatrix BinaryMatrix::complement() const {
  BinaryMatrix c = *this;
  for (Word& w : c.bits_) w = ~w;
  c.clear_padding();
  return c;
}

std::vector<std::string> BinaryMatrix::to_strings() const {
  std::vector<std::string> out(rows_, std::string(cols_, '0'));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (get(i, j)) out[i][j] = '1';
    }
  }
  return out;
}

void BinaryMatrix::clear_padding() {
  const std::size_t tail = cols_ % kWordBits;
  if (tail == 0 || words_per_row_ == 0) return;
  const Word mask = (Word{1} << tail) - 1;
  for (std::size_t i = 0; i < rows_; ++i) {
    bits_[i * words_per_row_ + words_per_row_ - 1] &= mask;
  }
}

SupportSet::SupportSet(std::vector<std::uint32_t> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("support set has duplicate indices");
  }
}

SupportSet SupportSet::from_indicator(std::span<const std::uint8_t> indicator) {
  SupportSet s;
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    if (indicator[i]) s.indices_.push_back(static_cast<std::uint32_t>(i));
  }
  return s;
}

bool SupportSet::contains(std::uint32_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::vector<BinaryMatrix::Word> SupportSet::to_words(
    std::size_t dimension) const {
  if (bound() > dimension) {
    throw DimensionError("support index " + std::to_string(bound() - 1) +
                         " out of range for dimension " +
                         std::to_string(dimension));
  }
  std::vector<BinaryMatrix::Word> words(
      (dimension + BinaryMatrix::kWordBits - 1) / BinaryMatrix::kWordBits, 0);
  for (std::uint32_t j : indices_) {
    words[j / BinaryMatrix::kWordBits] |= BinaryMatrix::Word{1}
                                          << (j % BinaryMatrix::kWordBits);
  }
  return words;
}

Rank1Column::Rank1Column(SupportSet rows, SupportSet cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {}

Rank1Column Rank1Column::on(const BinaryMatrix& x, SupportSet rows,
                            SupportSet cols,
                            std::span<const std::uint32_t> row_weight,
                            std::span<const std::uint32_t> col_weight) {
  if (rows.empty() || cols.empty()) {
    throw std::invalid_argument("rank-1 column needs nonempty supports");
  }
  if (rows.bound() > x.rows() || cols.bound() > x.cols()) {
    throw DimensionError("column supports exceed " +
                         shape(x.rows(), x.cols()));
  }
  Rank1Column c(std::move(rows), std::move(cols));
  const auto col_words = c.cols_.to_words(x.cols());
  double col_weight_sum = 0.0;
  for (std::uint32_t j : c.cols_) {
    col_weight_sum += col_weight.empty() ? 1.0 : col_weight[j];
  }
  for (std::uint32_t i : c.rows_) {
    const auto r = x.row(i);
    std::size_t ones = 0;
    for (std::size_t w = 0; w < r.size(); ++w) {
      ones += std::popcount(r[w] & col_words[w]);
    }
    c.covered_ones_ += ones;
    const double wi = row_weight.empty() ? 1.0 : row_weight[i];
    if (col_weight.empty()) {
      c.covered_zeros_weight_ += wi * static_cast<double>(c.cols_.size() - ones);
    } else {
      double ones_weight = 0.0;
      for (std::uint32_t j : c.cols_) {
        if (x.get(i, j)) ones_weight += col_weight[j];
      }
      c.covered_zeros_weight_ += wi * (col_weight_sum - ones_weight);
    }
  }
  return c;
}

void Factorisation::deduplicate() {
  std::vector<Rank1Column> unique;
  for (auto& c : columns) {
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) {
      unique.push_back(std::move(c));
    }
  }
  columns = std::move(unique);
}

BinaryMatrix Factorisation::factor_a(std::size_t n) const {
  const std::size_t r = std::max(k, columns.size());
  BinaryMatrix a(n, r);
  for (std::size_t l = 0; l < columns.size(); ++l) {
    for (std::uint32_t i : columns[l].row_support()) {
      if (i >= n) throw DimensionError("row support exceeds n");
      a.set(i, l);
    }
  }
  return a;
}

BinaryMatrix Factorisation::factor_b(std::size_t m) const {
  const std::size_t r = std::max(k, columns.size());
  BinaryMatrix b(r, m);
  for (std::size_t l = 0; l < columns.size(); ++l) {
    for (std::uint32_t j : columns[l].col_support()) {
      if (j >= m) throw DimensionError("column support exceeds m");
      b.set(l, j);
    }
  }
  return b;
}

BinaryMatrix boolean_product(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("boolean_product: inner dimensions differ (" +
                         shape(a.rows(), a.cols()) + " o " +
                         shape(b.rows(), b.cols()) + ")");
  }
  BinaryMatrix z(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = z.mutable_row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      if (!a.get(i, l)) continue;
      const auto src = b.row(l);
      for (std::size_t w = 0; w < out.size(); ++w) out[w] |= src[w];
    }
  }
  return z;
}

std::size_t factorisation_error(const BinaryMatrix& x, const BinaryMatrix& z) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) {
    throw DimensionError("factorisation_error: " + shape(x.rows(), x.cols()) +
                         " vs " + shape(z.rows(), z.cols()));
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xr = x.row(i);
    const auto zr = z.row(i);
    for (std::size_t w = 0; w < xr.size(); ++w) {
      errors += std::popcount(xr[w] ^ zr[w]);
    }
  }
  return errors;
}

BinaryMatrix column_to_matrix(const Rank1Column& column, std::size_t n,
                              std::size_t m) {
  const Rank1Column one[] = {column};
  return cover_union(one, n, m);
}

BinaryMatrix cover_union(std::span<const Rank1Column> columns, std::size_t n,
                         std::size_t m) {
  BinaryMatrix z(n, m);
  for (const auto& c : columns) {
    if (c.row_support().bound() > n) {
      throw DimensionError("row support out of range for " + shape(n, m));
    }
    const auto col_words = c.col_support().to_words(m);
    for (std::uint32_t i : c.row_support()) {
      auto out = z.mutable_row(i);
      for (std::size_t w = 0; w < out.size(); ++w) out[w] |= col_words[w];
    }
  }
  return z;
}

BinaryMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw std::runtime_error("matrix: missing header line");
  std::istringstream header(line);
  long long n = 0, m = 0;
  if (!(header >> n >> m) || n <= 0 || m <= 0) {
    throw std::runtime_error("matrix line " + std::to_string(line_no) +
                             ": expected \"n m\" with positive sizes");
  }
  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (!next_line()) {
      throw std::runtime_error("matrix: expected " + std::to_string(n) +
                               " rows, file ends after " + std::to_string(i));
    }
    if (line.size() != static_cast<std::size_t>(m) ||
        line.find_first_not_of("01") != std::string::npos) {
      throw std::runtime_error("matrix line " + std::to_string(line_no) +
                               ": expected " + std::to_string(m) +
                               " characters in {0,1}");
    }
    rows.push_back(line);
  }
  return BinaryMatrix::from_strings(rows);
}

BinaryMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const BinaryMatrix& x) {
  out << x.rows() << ' ' << x.cols() << '\n';
  for (const auto& r : x.to_strings()) out << r << '\n';
}

}  // namespace bmf
