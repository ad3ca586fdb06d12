#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fhn/kernels.hpp"

namespace fhn {

/// Compressed sparse row matrix with sorted, unique column indices.
class CsrMatrix {
 public:
  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  CsrMatrix() = default;

  /// Sums duplicate entries. Summation order is the input order of each
  /// (row, col) pair, so results are reproducible.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  /// Entry (r, c), zero when not stored.
  double at(std::size_t r, std::size_t c) const;

  /// y = A x using the active kernel table.
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply(std::span<const double> x, std::span<double> y,
                const kernels::KernelTable& k) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// a^T A b
  double bilinear(std::span<const double> a, std::span<const double> b) const;

  /// Sum of each row.
  std::vector<double> row_sums() const;

  kernels::CsrView view() const {
    return {rows_, row_ptr_.data(), col_idx_.data(), values_.data()};
  }

  const std::vector<std::uint32_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace fhn
