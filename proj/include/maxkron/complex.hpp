// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_COMPLEX_HPP
#define MAXKRON_COMPLEX_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "maxkron/splines.hpp"

namespace maxkron
{

enum class ComplexTag
{
  Primal,
  Dual
};

enum class BoundaryCondition
{
  Homogeneous,
  Free
};

// Tensor product of three univariate spaces; coefficient index i1 + n1 * (i2 + n2 * i3).
struct TensorSpace
{
  std::array<UnivariateSplineSpace, 3> factors;

  std::array<int, 3> shape() const
  {
    return {factors[0].dim(), factors[1].dim(), factors[2].dim()};
  }
  std::size_t dim() const
  {
    return static_cast<std::size_t>(factors[0].dim()) * factors[1].dim() * factors[2].dim();
  }
  TensorSpace untrimmed() const
  {
    return {{factors[0].untrimmed(), factors[1].untrimmed(), factors[2].untrimmed()}};
  }
  bool operator==(const TensorSpace &) const = default;
};

//
// Discrete k-form space: one component for k = 0, 3 and three for k = 1, 2.
// For k = 1 component j is dx_j, for k = 2 component j is dx_{j+1} ^ dx_{j+2}.
//
struct FormSpace
{
  int k = 0;
  ComplexTag tag = ComplexTag::Primal;
  BoundaryCondition bc = BoundaryCondition::Free;
  std::vector<TensorSpace> components;

  int num_components() const { return static_cast<int>(components.size()); }
  std::size_t dim() const;
  std::size_t offset(int component) const;

  // Same space without boundary trimming.
  FormSpace free() const;

  // Positions of this space's functions inside free() (ascending), and the complement.
  std::vector<int> interior_indices() const;
  std::vector<int> boundary_indices() const;
};

struct DeRhamComplex
{
  ComplexTag tag = ComplexTag::Primal;
  std::array<int, 3> degree{};         // starting degree p_j of the primal complex
  std::array<KnotVector, 3> knots;     // primal knot vectors Xi_j of degree p_j
  std::array<FormSpace, 4> spaces;

  const FormSpace &operator[](int k) const { return spaces[k]; }
};

// Primal: S_p(Xi) B-splines (trimmed in the homogeneous variant) and S_{p-1}(Xi')
// Curry-Schoenberg. Dual: S_{p-1}(Xi') B-splines and S_{p-2}(Xi'') Curry-Schoenberg.
// Throws UnsupportedDegree if some p_j < 2.
DeRhamComplex build_complex(const std::array<KnotVector, 3> &knots, ComplexTag tag);
DeRhamComplex build_complex(std::array<int, 3> degree, std::array<int, 3> n_elements, ComplexTag tag);

// Primal complex with all spaces free (no boundary trimming).
DeRhamComplex free_complex(const DeRhamComplex &c);

//
// Exterior derivative as an integer matrix, with a double copy for fast application.
//
struct IncidenceMatrix
{
  Eigen::SparseMatrix<int, Eigen::RowMajor> integer;
  Eigen::SparseMatrix<double, Eigen::RowMajor> real;

  long rows() const { return integer.rows(); }
  long cols() const { return integer.cols(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;
};

// Univariate derivative from space v to the Curry-Schoenberg space w = S_{p-1}(Xi'):
// the (m-1) x m bidiagonal [-1, 1] matrix, with trimmed columns removed.
Eigen::SparseMatrix<int, Eigen::RowMajor> univariate_difference(const UnivariateSplineSpace &v);

// d from a k-form space to a (k+1)-form space of the same complex (grad, curl, div patterns).
IncidenceMatrix incidence_matrix(const FormSpace &from, const FormSpace &to);
IncidenceMatrix incidence_matrix(const DeRhamComplex &c, int k);

// Column split of a matrix acting on free(space) into the interior and boundary parts.
struct BlockSplit
{
  Eigen::SparseMatrix<double> interior;
  Eigen::SparseMatrix<double> boundary;
};
BlockSplit trimmed_block_split(const Eigen::SparseMatrix<double> &op, const FormSpace &space);

// Checks that interior and boundary form a partition of [0, n); throws InvalidArgument.
void check_partition(std::span<const int> interior, std::span<const int> boundary, std::size_t n);

// Column selection preserving order.
Eigen::SparseMatrix<double> select_columns(const Eigen::SparseMatrix<double> &a, std::span<const int> cols);
Eigen::SparseMatrix<double> select_rows(const Eigen::SparseMatrix<double> &a, std::span<const int> rows);

}  // namespace maxkron

#endif  // MAXKRON_COMPLEX_HPP
