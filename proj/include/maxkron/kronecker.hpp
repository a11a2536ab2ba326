// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_KRONECKER_HPP
#define MAXKRON_KRONECKER_HPP

#include <array>
#include <optional>
#include <span>

#include <Eigen/Sparse>

#include "maxkron/banded.hpp"

namespace maxkron
{

//
// C = A3 (x) A2 (x) A1 acting on vectors whose index is i1 + n1 * (i2 + n2 * i3),
// i.e. direction 1 fastest. Factors are stored per direction: factor(0) = A1.
// The full 3D matrix is never formed; apply and solve sweep one direction at a time.
//
class KroneckerOperator
{
public:
  KroneckerOperator() = default;
  KroneckerOperator(BandedMatrix a1, BandedMatrix a2, BandedMatrix a3);

  const BandedMatrix &factor(int direction) const { return factors_[direction]; }
  std::size_t rows() const;
  std::size_t cols() const;

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;

  // Banded LU of each factor; requires square factors.
  void factorize();
  bool factorized() const { return lu_.has_value(); }
  // (A3 (x) A2 (x) A1)^{-1} rhs via three directional banded sweeps. rhs and x may alias.
  // Throws ErrorCode::State when the factors have not been factorized.
  void solve(std::span<const double> rhs, std::span<double> x) const;

  KroneckerOperator transpose() const;
  Eigen::SparseMatrix<double> materialize() const;

private:
  std::array<BandedMatrix, 3> factors_;
  std::optional<std::array<BandedLU, 3>> lu_;
};

// Sparse Kronecker product a (x) b (b varies fastest).
template <class Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> kron(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor> &a,
                                                  const Eigen::SparseMatrix<Scalar, Eigen::RowMajor> &b)
{
  using Mat = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int i = 0; i < a.outerSize(); ++i)
  {
    for (typename Mat::InnerIterator ia(a, i); ia; ++ia)
    {
      for (int k = 0; k < b.outerSize(); ++k)
      {
        for (typename Mat::InnerIterator ib(b, k); ib; ++ib)
        {
          trip.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                            static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
        }
      }
    }
  }
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace maxkron

#endif  // MAXKRON_KRONECKER_HPP
