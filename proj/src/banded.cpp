// SPDX-License-Identifier: Apache-2.0

#include "maxkron/banded.hpp"

#include <cmath>
#include <string>

#include "maxkron/error.hpp"

namespace maxkron
{

BandedMatrix::BandedMatrix(int rows, int cols, int lower, int upper)
  : rows_(rows), cols_(cols), lower_(lower), upper_(upper),
    data_(static_cast<std::size_t>(rows) * (lower + upper + 1), 0.0)
{
  require(rows >= 0 && cols >= 0 && lower >= 0 && upper >= 0, ErrorCode::InvalidArgument,
          "invalid banded matrix shape");
}

BandedMatrix BandedMatrix::identity(int n)
{
  BandedMatrix a(n, n, 0, 0);
  for (int i = 0; i < n; ++i)
  {
    a.at(i, i) = 1.0;
  }
  return a;
}

BandedMatrix BandedMatrix::from_dense(const Eigen::MatrixXd &a, double drop_tol)
{
  int lower = 0, upper = 0;
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int j = 0; j < a.cols(); ++j)
    {
      if (std::abs(a(i, j)) > drop_tol)
      {
        lower = std::max(lower, i - j);
        upper = std::max(upper, j - i);
      }
    }
  }
  BandedMatrix out(static_cast<int>(a.rows()), static_cast<int>(a.cols()), lower, upper);
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int j = out.row_begin(i); j < out.row_end(i); ++j)
    {
      out.at(i, j) = std::abs(a(i, j)) > drop_tol ? a(i, j) : 0.0;
    }
  }
  return out;
}

double BandedMatrix::operator()(int i, int j) const
{
  if (!in_band(i, j))
  {
    return 0.0;
  }
  return data_[static_cast<std::size_t>(i) * width() + (j - i + lower_)];
}

double &BandedMatrix::at(int i, int j)
{
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_ || !in_band(i, j))
  {
    fail(ErrorCode::InvalidArgument,
         "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside band");
  }
  return data_[static_cast<std::size_t>(i) * width() + (j - i + lower_)];
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const
{
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          ErrorCode::InvalidArgument, "banded apply: length mismatch");
  apply_mode(*this, x, y, 1, 1);
}

void BandedMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const
{
  require(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_,
          ErrorCode::InvalidArgument, "banded transpose apply: length mismatch");
  apply_mode_transpose(*this, x, y, 1, 1);
}

BandedMatrix BandedMatrix::transpose() const
{
  BandedMatrix t(cols_, rows_, upper_, lower_);
  for (int i = 0; i < rows_; ++i)
  {
    for (int j = row_begin(i); j < row_end(i); ++j)
    {
      t.at(j, i) = (*this)(i, j);
    }
  }
  return t;
}

Eigen::MatrixXd BandedMatrix::to_dense() const
{
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
  {
    for (int j = row_begin(i); j < row_end(i); ++j)
    {
      a(i, j) = (*this)(i, j);
    }
  }
  return a;
}

BandedLU::BandedLU(const BandedMatrix &a)
  : n_(a.rows()), kl_(a.lower()), ku_(a.upper()), kv_(a.lower() + a.upper()),
    ldab_(2 * a.lower() + a.upper() + 1)
{
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "banded LU needs a square matrix");
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
  for (int i = 0; i < n_; ++i)
  {
    for (int j = a.row_begin(i); j < a.row_end(i); ++j)
    {
      ab(i, j) = a(i, j);
    }
  }
  pivots_.resize(n_);

  int ju = 0;
  for (int j = 0; j < n_; ++j)
  {
    const int km = std::min(kl_, n_ - 1 - j);
    int jp = 0;
    double best = std::abs(ab(j, j));
    for (int i = 1; i <= km; ++i)
    {
      if (std::abs(ab(j + i, j)) > best)
      {
        best = std::abs(ab(j + i, j));
        jp = i;
      }
    }
    pivots_[j] = j + jp;
    if (best == 0.0)
    {
      fail(ErrorCode::SingularMatrix, "zero pivot in column " + std::to_string(j));
    }
    ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
    if (jp != 0)
    {
      for (int c = j; c <= ju; ++c)
      {
        std::swap(ab(j, c), ab(j + jp, c));
      }
    }
    const double pivot = ab(j, j);
    for (int i = 1; i <= km; ++i)
    {
      ab(j + i, j) /= pivot;
    }
    for (int c = j + 1; c <= ju; ++c)
    {
      const double u = ab(j, c);
      if (u == 0.0)
      {
        continue;
      }
      for (int i = 1; i <= km; ++i)
      {
        ab(j + i, c) -= ab(j + i, j) * u;
      }
    }
  }
}

void BandedLU::solve(std::span<double> b) const
{
  require(static_cast<int>(b.size()) == n_, ErrorCode::InvalidArgument,
          "banded solve: length mismatch");
  solve_mode(b, 1, 1);
}

void BandedLU::solve_mode(std::span<double> data, std::size_t inner, std::size_t outer) const
{
  require(data.size() >= inner * n_ * outer, ErrorCode::InvalidArgument,
          "banded solve: buffer too small");
  for (std::size_t o = 0; o < outer; ++o)
  {
    double *x = data.data() + o * static_cast<std::size_t>(n_) * inner;
    auto line = [&](int i) { return x + static_cast<std::size_t>(i) * inner; };

    for (int j = 0; j < n_; ++j)
    {
      const int p = pivots_[j];
      double *xj = line(j);
      if (p != j)
      {
        double *xp = line(p);
        for (std::size_t k = 0; k < inner; ++k)
        {
          std::swap(xj[k], xp[k]);
        }
      }
      const int km = std::min(kl_, n_ - 1 - j);
      for (int i = 1; i <= km; ++i)
      {
        const double l = ab(j + i, j);
        double *xi = line(j + i);
        for (std::size_t k = 0; k < inner; ++k)
        {
          xi[k] -= l * xj[k];
        }
      }
    }
    for (int j = n_ - 1; j >= 0; --j)
    {
      double *xj = line(j);
      const double inv = 1.0 / ab(j, j);
      for (std::size_t k = 0; k < inner; ++k)
      {
        xj[k] *= inv;
      }
      for (int i = std::max(0, j - kv_); i < j; ++i)
      {
        const double u = ab(i, j);
        double *xi = line(i);
        for (std::size_t k = 0; k < inner; ++k)
        {
          xi[k] -= u * xj[k];
        }
      }
    }
  }
}

Eigen::MatrixXd BandedLU::lower_factor() const
{
  // Unit lower factor with the row interchanges applied, so that P A = L U.
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n_, n_);
  Eigen::MatrixXd perm = Eigen::MatrixXd::Identity(n_, n_);
  // LAPACK stores multipliers of step j before later swaps; replay the swaps on L.
  for (int j = 0; j < n_; ++j)
  {
    const int km = std::min(kl_, n_ - 1 - j);
    for (int i = 1; i <= km; ++i)
    {
      l(j + i, j) = ab(j + i, j);
    }
  }
  for (int j = 0; j < n_; ++j)
  {
    const int p = pivots_[j];
    if (p != j)
    {
      // Swap already-computed multipliers of earlier columns.
      for (int c = 0; c < j; ++c)
      {
        std::swap(l(j, c), l(p, c));
      }
    }
  }
  return l;
}

Eigen::MatrixXd BandedLU::upper_factor() const
{
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j)
  {
    for (int i = std::max(0, j - kv_); i <= j; ++i)
    {
      u(i, j) = ab(i, j);
    }
  }
  return u;
}

Eigen::MatrixXd BandedLU::permutation() const
{
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n_, n_);
  for (int j = 0; j < n_; ++j)
  {
    if (pivots_[j] != j)
    {
      p.row(j).swap(p.row(pivots_[j]));
    }
  }
  return p;
}

}  // namespace maxkron
