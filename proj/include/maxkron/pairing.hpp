// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_PAIRING_HPP
#define MAXKRON_PAIRING_HPP

#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "maxkron/complex.hpp"
#include "maxkron/kronecker.hpp"

namespace maxkron
{

// Gram matrix (int_0^1 row_i * col_j dx) of two univariate spaces on the same breakpoints.
// With require_square, a non-square result throws PairingDimension.
BandedMatrix univariate_pairing(const UnivariateSplineSpace &row_space,
                                const UnivariateSplineSpace &col_space, bool require_square = false);

// G^: dual S_{p-2}(Xi'') Curry-Schoenberg rows against trimmed primal S_p(Xi) columns.
BandedMatrix pairing_g(const KnotVector &kv);
// M^: dual S_{p-1}(Xi') B-spline rows against primal S_{p-1}(Xi') Curry-Schoenberg columns.
BandedMatrix pairing_m(const KnotVector &kv);

//
// Block-diagonal pairing between a (3-k)-form space (rows) and a k-form space (columns).
// Block j pairs component j of both spaces; the wedge product of proxies reduces to
// their dot product, so blocks never couple components.
//
class PairingMatrix3D
{
public:
  PairingMatrix3D() = default;
  PairingMatrix3D(std::vector<KroneckerOperator> blocks);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const KroneckerOperator &block(int j) const { return blocks_[j]; }
  std::size_t rows() const { return row_offsets_.back(); }
  std::size_t cols() const { return col_offsets_.back(); }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;

  void factorize();
  // Blockwise Kronecker solve; rhs and x may alias.
  void solve(std::span<const double> rhs, std::span<double> x) const;

  PairingMatrix3D transpose() const;
  Eigen::SparseMatrix<double> materialize() const;

private:
  std::vector<KroneckerOperator> blocks_;
  std::vector<std::size_t> row_offsets_{0}, col_offsets_{0};
};

// Generic pairing of any (3-k)-form space against any k-form space (trimmed or not).
PairingMatrix3D pairing_matrix(const FormSpace &rows, const FormSpace &cols);

// K_1 (dual 2-forms x primal 1-forms) with blocks G^3 (x) G^2 (x) M^1 and cyclic permutations.
PairingMatrix3D assemble_K1(const DeRhamComplex &primal, const DeRhamComplex &dual);
// K~_1 (primal 2-forms x dual 1-forms) with blocks M^3' (x) M^2' (x) G^1' and cyclic permutations.
PairingMatrix3D assemble_Ktilde1(const DeRhamComplex &primal, const DeRhamComplex &dual);

// Throws IncompatibleComplex unless the two complexes were built from the same knot data.
void check_compatible(const DeRhamComplex &primal, const DeRhamComplex &dual);

}  // namespace maxkron

#endif  // MAXKRON_PAIRING_HPP
