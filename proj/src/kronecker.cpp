// SPDX-License-Identifier: Apache-2.0

#include "maxkron/kronecker.hpp"

#include <vector>

#include "maxkron/error.hpp"

namespace maxkron
{

KroneckerOperator::KroneckerOperator(BandedMatrix a1, BandedMatrix a2, BandedMatrix a3)
  : factors_{std::move(a1), std::move(a2), std::move(a3)}
{
}

std::size_t KroneckerOperator::rows() const
{
  return static_cast<std::size_t>(factors_[0].rows()) * factors_[1].rows() * factors_[2].rows();
}

std::size_t KroneckerOperator::cols() const
{
  return static_cast<std::size_t>(factors_[0].cols()) * factors_[1].cols() * factors_[2].cols();
}

void KroneckerOperator::apply(std::span<const double> x, std::span<double> y) const
{
  require(x.size() == cols() && y.size() == rows(), ErrorCode::InvalidArgument,
          "kronecker apply: length mismatch");
  const std::size_t r1 = factors_[0].rows(), r2 = factors_[1].rows();
  const std::size_t c2 = factors_[1].cols(), c3 = factors_[2].cols();
  std::vector<double> t1(r1 * c2 * c3), t2(r1 * r2 * c3);
  apply_mode(factors_[0], x, std::span<double>(t1), 1, c2 * c3);
  apply_mode(factors_[1], std::span<const double>(t1), std::span<double>(t2), r1, c3);
  apply_mode(factors_[2], std::span<const double>(t2), y, r1 * r2, 1);
}

void KroneckerOperator::apply_transpose(std::span<const double> x, std::span<double> y) const
{
  require(x.size() == rows() && y.size() == cols(), ErrorCode::InvalidArgument,
          "kronecker transpose apply: length mismatch");
  const std::size_t c1 = factors_[0].cols(), c2 = factors_[1].cols();
  const std::size_t r2 = factors_[1].rows(), r3 = factors_[2].rows();
  std::vector<double> t1(c1 * r2 * r3), t2(c1 * c2 * r3);
  apply_mode_transpose(factors_[0], x, std::span<double>(t1), 1, r2 * r3);
  apply_mode_transpose(factors_[1], std::span<const double>(t1), std::span<double>(t2), c1, r3);
  apply_mode_transpose(factors_[2], std::span<const double>(t2), y, c1 * c2, 1);
}

void KroneckerOperator::factorize()
{
  lu_.emplace(std::array<BandedLU, 3>{BandedLU(factors_[0]), BandedLU(factors_[1]),
                                      BandedLU(factors_[2])});
}

void KroneckerOperator::solve(std::span<const double> rhs, std::span<double> x) const
{
  require(lu_.has_value(), ErrorCode::State, "kronecker solve before factorize()");
  require(rhs.size() == rows() && x.size() == rows(), ErrorCode::InvalidArgument,
          "kronecker solve: length mismatch");
  if (rhs.data() != x.data())
  {
    std::copy(rhs.begin(), rhs.end(), x.begin());
  }
  const std::size_t n1 = factors_[0].rows(), n2 = factors_[1].rows(), n3 = factors_[2].rows();
  (*lu_)[0].solve_mode(x, 1, n2 * n3);
  (*lu_)[1].solve_mode(x, n1, n3);
  (*lu_)[2].solve_mode(x, n1 * n2, 1);
}

KroneckerOperator KroneckerOperator::transpose() const
{
  return KroneckerOperator(factors_[0].transpose(), factors_[1].transpose(), factors_[2].transpose());
}

namespace
{

Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse(const BandedMatrix &a)
{
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int j = a.row_begin(i); j < a.row_end(i); ++j)
    {
      if (a(i, j) != 0.0)
      {
        trip.emplace_back(i, j, a(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> s(a.rows(), a.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

}  // namespace

Eigen::SparseMatrix<double> KroneckerOperator::materialize() const
{
  return Eigen::SparseMatrix<double>(
      kron(to_sparse(factors_[2]), kron(to_sparse(factors_[1]), to_sparse(factors_[0]))));
}

}  // namespace maxkron
