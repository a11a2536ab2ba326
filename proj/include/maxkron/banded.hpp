// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_BANDED_HPP
#define MAXKRON_BANDED_HPP

#include <algorithm>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace maxkron
{

//
// Banded matrix in row-major band storage. Entry (i, j) is stored iff
// -lower <= j - i <= upper; everything outside the band is exactly zero.
// Rectangular shapes are allowed.
//
class BandedMatrix
{
public:
  BandedMatrix() = default;
  BandedMatrix(int rows, int cols, int lower, int upper);

  static BandedMatrix identity(int n);
  // Smallest band containing every entry with |a_ij| > drop_tol.
  static BandedMatrix from_dense(const Eigen::MatrixXd &a, double drop_tol = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }
  bool in_band(int i, int j) const { return j - i >= -lower_ && j - i <= upper_; }

  double operator()(int i, int j) const;
  // Throws if (i, j) lies outside the band.
  double &at(int i, int j);

  // Column range [begin, end) that row i may touch.
  int row_begin(int i) const { return i - lower_ > 0 ? i - lower_ : 0; }
  int row_end(int i) const { return i + upper_ + 1 < cols_ ? i + upper_ + 1 : cols_; }
  // Pointer to entry (i, row_begin(i)); entries of the row are contiguous.
  const double *row_data(int i) const
  {
    return data_.data() + static_cast<std::size_t>(i) * width() + (row_begin(i) - i + lower_);
  }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;

  BandedMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

private:
  int width() const { return lower_ + upper_ + 1; }

  int rows_ = 0, cols_ = 0, lower_ = 0, upper_ = 0;
  std::vector<double> data_;
};

//
// LU factorization with partial pivoting in band storage (the LAPACK gbtrf layout,
// column-major with lower extra superdiagonals reserved for pivoting fill).
// P A = L U; U has upper bandwidth lower + upper.
//
class BandedLU
{
public:
  BandedLU() = default;
  // Throws ErrorCode::SingularMatrix on a zero pivot.
  explicit BandedLU(const BandedMatrix &a);

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  void solve(std::span<double> b) const;

  // Solves along the middle axis of a (inner, n, outer) array, stored with the
  // inner index fastest. Each of the inner*outer lines is an independent system.
  void solve_mode(std::span<double> data, std::size_t inner, std::size_t outer) const;

  // Dense L, U and permutation for verification.
  Eigen::MatrixXd lower_factor() const;
  Eigen::MatrixXd upper_factor() const;
  Eigen::MatrixXd permutation() const;

private:
  double &ab(int i, int j) { return ab_[static_cast<std::size_t>(kv_ + i - j) + static_cast<std::size_t>(j) * ldab_]; }
  double ab(int i, int j) const { return ab_[static_cast<std::size_t>(kv_ + i - j) + static_cast<std::size_t>(j) * ldab_]; }

  int n_ = 0, kl_ = 0, ku_ = 0, kv_ = 0, ldab_ = 0;
  std::vector<double> ab_;
  std::vector<int> pivots_;
};

// out(:, i, :) = sum_j A(i, j) in(:, j, :) for (inner, cols, outer) input and
// (inner, rows, outer) output arrays. Works for any matrix type exposing rows(), cols(),
// row_begin(i), row_end(i) and row_data(i).
template <class RowMatrix>
void apply_mode(const RowMatrix &a, std::span<const double> in, std::span<double> out,
                std::size_t inner, std::size_t outer)
{
  const std::size_t rows = a.rows(), cols = a.cols();
  for (std::size_t o = 0; o < outer; ++o)
  {
    const double *src = in.data() + o * cols * inner;
    double *dst = out.data() + o * rows * inner;
    for (std::size_t i = 0; i < rows; ++i)
    {
      double *y = dst + i * inner;
      const int jb = a.row_begin(static_cast<int>(i)), je = a.row_end(static_cast<int>(i));
      const double *vals = a.row_data(static_cast<int>(i));
      if (inner == 1)
      {
        double acc = 0.0;
        for (int j = jb; j < je; ++j)
        {
          acc += vals[j - jb] * src[j];
        }
        y[0] = acc;
        continue;
      }
      for (std::size_t k = 0; k < inner; ++k)
      {
        y[k] = 0.0;
      }
      for (int j = jb; j < je; ++j)
      {
        const double v = vals[j - jb];
        const double *x = src + static_cast<std::size_t>(j) * inner;
        for (std::size_t k = 0; k < inner; ++k)
        {
          y[k] += v * x[k];
        }
      }
    }
  }
}

// Transposed version: out(:, j, :) = sum_i A(i, j) in(:, i, :).
template <class RowMatrix>
void apply_mode_transpose(const RowMatrix &a, std::span<const double> in, std::span<double> out,
                          std::size_t inner, std::size_t outer)
{
  const std::size_t rows = a.rows(), cols = a.cols();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(cols * inner * outer), 0.0);
  for (std::size_t o = 0; o < outer; ++o)
  {
    const double *src = in.data() + o * rows * inner;
    double *dst = out.data() + o * cols * inner;
    for (std::size_t i = 0; i < rows; ++i)
    {
      const double *x = src + i * inner;
      const int jb = a.row_begin(static_cast<int>(i)), je = a.row_end(static_cast<int>(i));
      const double *vals = a.row_data(static_cast<int>(i));
      for (int j = jb; j < je; ++j)
      {
        const double v = vals[j - jb];
        double *y = dst + static_cast<std::size_t>(j) * inner;
        for (std::size_t k = 0; k < inner; ++k)
        {
          y[k] += v * x[k];
        }
      }
    }
  }
}

}  // namespace maxkron

#endif  // MAXKRON_BANDED_HPP
