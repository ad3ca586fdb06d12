#include "fhn/sparse.hpp"

#include <algorithm>

#include "fhn/errors.hpp"

namespace fhn {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t last_row = rows;
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw DomainError("CsrMatrix: triplet index out of range");
    }
    if (t.row == last_row && m.col_idx_.back() == t.col) {
      m.values_.back() += t.value;
    } else {
      m.col_idx_.push_back(t.col);
      m.values_.push_back(t.value);
      ++m.row_ptr_[t.row + 1];
      last_row = t.row;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col_idx_.begin() + row_ptr_[r];
  const auto last = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  return (it != last && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y,
                         const kernels::KernelTable& k) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw DomainError("CsrMatrix::multiply: dimension mismatch");
  }
  k.spmv(view(), x.data(), y.data());
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  multiply(x, y, kernels::active());
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double CsrMatrix::bilinear(std::span<const double> a,
                           std::span<const double> b) const {
  const auto ab = multiply(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) acc += a[i] * ab[i];
  return acc;
}

std::vector<double> CsrMatrix::row_sums() const {
  std::vector<double> s(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s[r] += values_[k];
  }
  return s;
}

}  // namespace fhn
