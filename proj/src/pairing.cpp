// SPDX-License-Identifier: Apache-2.0

#include "maxkron/pairing.hpp"

#include <string>

#include "maxkron/error.hpp"

namespace maxkron
{

BandedMatrix univariate_pairing(const UnivariateSplineSpace &row_space,
                                const UnivariateSplineSpace &col_space, bool require_square)
{
  require(row_space.knots.breakpoints() == col_space.knots.breakpoints(),
          ErrorCode::IncompatibleComplex, "pairing spaces live on different breakpoints");
  if (require_square && row_space.dim() != col_space.dim())
  {
    fail(ErrorCode::PairingDimension, "pairing is " + std::to_string(row_space.dim()) + " x " +
                                          std::to_string(col_space.dim()) + ", expected square");
  }
  const int q = (row_space.degree() + col_space.degree()) / 2 + 1;
  const QuadratureRule rule = gauss_rule(row_space.knots, q);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(row_space.dim(), col_space.dim());
  for (int i = 0; i < rule.size(); ++i)
  {
    const BasisEvaluation r = eval_basis(row_space, rule.nodes[i]);
    const BasisEvaluation c = eval_basis(col_space, rule.nodes[i]);
    for (int a = 0; a < r.count(); ++a)
    {
      for (int b = 0; b < c.count(); ++b)
      {
        g(r.index[a], c.index[b]) += rule.weights[i] * r.value(0, a) * c.value(0, b);
      }
    }
  }
  return BandedMatrix::from_dense(g);
}

BandedMatrix pairing_g(const KnotVector &kv)
{
  const KnotVector k2 = derived_knot_vector(derived_knot_vector(kv));
  return univariate_pairing({k2, BasisFlavor::CurrySchoenberg, false}, {kv, BasisFlavor::BSpline, true}, true);
}

BandedMatrix pairing_m(const KnotVector &kv)
{
  const KnotVector k1 = derived_knot_vector(kv);
  return univariate_pairing({k1, BasisFlavor::BSpline, false}, {k1, BasisFlavor::CurrySchoenberg, false}, true);
}

PairingMatrix3D::PairingMatrix3D(std::vector<KroneckerOperator> blocks) : blocks_(std::move(blocks))
{
  for (const auto &b : blocks_)
  {
    row_offsets_.push_back(row_offsets_.back() + b.rows());
    col_offsets_.push_back(col_offsets_.back() + b.cols());
  }
}

void PairingMatrix3D::apply(std::span<const double> x, std::span<double> y) const
{
  require(x.size() == cols() && y.size() == rows(), ErrorCode::InvalidArgument,
          "pairing apply: length mismatch");
  for (int j = 0; j < num_blocks(); ++j)
  {
    blocks_[j].apply(x.subspan(col_offsets_[j], blocks_[j].cols()),
                     y.subspan(row_offsets_[j], blocks_[j].rows()));
  }
}

void PairingMatrix3D::apply_transpose(std::span<const double> x, std::span<double> y) const
{
  require(x.size() == rows() && y.size() == cols(), ErrorCode::InvalidArgument,
          "pairing transpose apply: length mismatch");
  for (int j = 0; j < num_blocks(); ++j)
  {
    blocks_[j].apply_transpose(x.subspan(row_offsets_[j], blocks_[j].rows()),
                               y.subspan(col_offsets_[j], blocks_[j].cols()));
  }
}

void PairingMatrix3D::factorize()
{
  require(rows() == cols(), ErrorCode::PairingDimension, "only square pairings can be factorized");
  for (auto &b : blocks_)
  {
    b.factorize();
  }
}

void PairingMatrix3D::solve(std::span<const double> rhs, std::span<double> x) const
{
  require(rhs.size() == rows() && x.size() == rows(), ErrorCode::InvalidArgument,
          "pairing solve: length mismatch");
  for (int j = 0; j < num_blocks(); ++j)
  {
    blocks_[j].solve(rhs.subspan(row_offsets_[j], blocks_[j].rows()),
                     x.subspan(row_offsets_[j], blocks_[j].rows()));
  }
}

PairingMatrix3D PairingMatrix3D::transpose() const
{
  std::vector<KroneckerOperator> t;
  for (const auto &b : blocks_)
  {
    t.push_back(b.transpose());
  }
  return PairingMatrix3D(std::move(t));
}

Eigen::SparseMatrix<double> PairingMatrix3D::materialize() const
{
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < num_blocks(); ++j)
  {
    const Eigen::SparseMatrix<double> b = blocks_[j].materialize();
    for (int c = 0; c < b.outerSize(); ++c)
    {
      for (Eigen::SparseMatrix<double>::InnerIterator it(b, c); it; ++it)
      {
        trip.emplace_back(static_cast<int>(row_offsets_[j] + it.row()),
                          static_cast<int>(col_offsets_[j] + it.col()), it.value());
      }
    }
  }
  Eigen::SparseMatrix<double> out(static_cast<long>(rows()), static_cast<long>(cols()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

PairingMatrix3D pairing_matrix(const FormSpace &rows, const FormSpace &cols)
{
  require(rows.k + cols.k == 3 && rows.num_components() == cols.num_components(),
          ErrorCode::InvalidArgument, "pairing needs a (3-k)-form and a k-form space");
  std::vector<KroneckerOperator> blocks;
  for (int j = 0; j < rows.num_components(); ++j)
  {
    const auto &r = rows.components[j].factors;
    const auto &c = cols.components[j].factors;
    blocks.emplace_back(univariate_pairing(r[0], c[0]), univariate_pairing(r[1], c[1]),
                        univariate_pairing(r[2], c[2]));
  }
  return PairingMatrix3D(std::move(blocks));
}

void check_compatible(const DeRhamComplex &primal, const DeRhamComplex &dual)
{
  require(primal.tag == ComplexTag::Primal && dual.tag == ComplexTag::Dual,
          ErrorCode::IncompatibleComplex, "expected a primal and a dual complex");
  require(primal.knots == dual.knots, ErrorCode::IncompatibleComplex,
          "primal and dual complexes were built from different knot vectors");
}

PairingMatrix3D assemble_K1(const DeRhamComplex &primal, const DeRhamComplex &dual)
{
  check_compatible(primal, dual);
  std::array<BandedMatrix, 3> g, m;
  for (int d = 0; d < 3; ++d)
  {
    g[d] = pairing_g(primal.knots[d]);
    m[d] = pairing_m(primal.knots[d]);
  }
  std::vector<KroneckerOperator> blocks;
  blocks.emplace_back(m[0], g[1], g[2]);
  blocks.emplace_back(g[0], m[1], g[2]);
  blocks.emplace_back(g[0], g[1], m[2]);
  return PairingMatrix3D(std::move(blocks));
}

PairingMatrix3D assemble_Ktilde1(const DeRhamComplex &primal, const DeRhamComplex &dual)
{
  check_compatible(primal, dual);
  std::array<BandedMatrix, 3> gt, mt;
  for (int d = 0; d < 3; ++d)
  {
    gt[d] = pairing_g(primal.knots[d]).transpose();
    mt[d] = pairing_m(primal.knots[d]).transpose();
  }
  std::vector<KroneckerOperator> blocks;
  blocks.emplace_back(gt[0], mt[1], mt[2]);
  blocks.emplace_back(mt[0], gt[1], mt[2]);
  blocks.emplace_back(mt[0], mt[1], gt[2]);
  return PairingMatrix3D(std::move(blocks));
}

}  // namespace maxkron
