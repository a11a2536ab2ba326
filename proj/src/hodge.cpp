// SPDX-License-Identifier: Apache-2.0

#include "maxkron/hodge.hpp"

#include "maxkron/error.hpp"

namespace maxkron
{

namespace
{


Eigen::Map<const Eigen::VectorXd> as_vec(std::span<const double> s)
{
  return {s.data(), static_cast<long>(s.size())};
}

Eigen::Map<Eigen::VectorXd> as_vec(std::span<double> s)
{
  return {s.data(), static_cast<long>(s.size())};
}

Eigen::VectorXd apply(const PairingMatrix3D &k, const Eigen::VectorXd &x)
{
  Eigen::VectorXd y(static_cast<long>(k.rows()));
  k.apply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

}  // namespace

Discretization::Discretization(int degree, int n_elements, GeometryMap geometry_map)
  : p(degree),
    n(n_elements),
    geometry(std::move(geometry_map)),
    primal(build_complex({degree, degree, degree}, {n_elements, n_elements, n_elements}, ComplexTag::Primal)),
    primal_free(free_complex(primal)),
    dual(build_complex({degree, degree, degree}, {n_elements, n_elements, n_elements}, ComplexTag::Dual)),
    grid(primal.knots, geometry)
{
  curl = incidence_matrix(primal_free, 1);
  div = incidence_matrix(primal_free, 2);
  dual_curl = incidence_matrix(dual, 1);
  dual_div = incidence_matrix(dual, 2);
  e_interior = primal[1].interior_indices();
  e_boundary = primal[1].boundary_indices();
  b_interior = primal[2].interior_indices();
  k1 = assemble_K1(primal, dual);
  kt1 = assemble_Ktilde1(primal, dual);
  k1.factorize();
  kt1.factorize();
  k1_free = pairing_matrix(dual[2], primal_free[1]);
  kt2_free = pairing_matrix(primal_free[1], dual[2]);
  k2_free = pairing_matrix(dual[1], primal_free[2]);
}

std::string to_string(HodgeScheme s)
{
  switch (s)
  {
    case HodgeScheme::MassSolve:
      return "mass";
    case HodgeScheme::PairingSolve:
      return "kron";
    case HodgeScheme::PairingDense:
      return "dense";
  }
  return "?";
}

HodgeScheme hodge_scheme_from_string(const std::string &s)
{
  if (s == "mass")
  {
    return HodgeScheme::MassSolve;
  }
  if (s == "kron")
  {
    return HodgeScheme::PairingSolve;
  }
  if (s == "dense")
  {
    return HodgeScheme::PairingDense;
  }
  fail(ErrorCode::Validation, "unknown scheme '" + s + "' (expected mass, kron or dense)");
}

struct HodgeOperators::Impl
{
  std::vector<Eigen::VectorXd> lifts;       // free 1-form numbering
  std::vector<Eigen::VectorXd> e_boundary;  // per term, boundary contribution to the E right-hand side

  // PairingSolve / PairingDense
  // Upper triangles of the symmetric masses: the products are bandwidth bound and this halves the traffic.
  Eigen::SparseMatrix<double> mt2;  // dual 2-form mass, weight 1/eps
  Eigen::SparseMatrix<double> m2;   // free primal 2-form mass, weight 1/mu; interior rows are used
  Eigen::SparseMatrix<double> k1_mat, kt1_mat;
  SparseLuSolver k1_lu, kt1_lu;

  // MassSolve
  Eigen::SparseMatrix<double> m1_00;  // interior block of the primal 1-form mass, weight eps
  Eigen::SparseMatrix<double> mt1;    // dual 1-form mass, weight mu
  CholeskySolver m1_chol, mt1_chol;
};

HodgeOperators::HodgeOperators(const Discretization &disc, HodgeScheme scheme, const MaterialField &eps,
                               const MaterialField &mu, const BoundaryData &boundary)
  : disc_(&disc), scheme_(scheme), boundary_(boundary), impl_(std::make_unique<Impl>())
{
  require(boundary.time_factors.size() == boundary.spatial_terms.size(), ErrorCode::InvalidArgument,
          "boundary data needs one time factor per spatial term");
  for (const auto &term : boundary.spatial_terms)
  {
    impl_->lifts.push_back(boundary_lifting(disc.primal[1], term, disc.geometry));
  }

  if (scheme == HodgeScheme::MassSolve)
  {
    const Eigen::SparseMatrix<double> m1 = assemble_mass(disc.primal_free[1], disc.grid, eps);
    const BlockSplit rows = trimmed_block_split(select_rows(m1, disc.e_interior).eval(), disc.primal[1]);
    impl_->m1_00 = rows.interior;
    for (const auto &lift : impl_->lifts)
    {
      Eigen::VectorXd lb(static_cast<long>(disc.e_boundary.size()));
      for (std::size_t i = 0; i < disc.e_boundary.size(); ++i)
      {
        lb[static_cast<long>(i)] = lift[disc.e_boundary[i]];
      }
      impl_->e_boundary.push_back(-(rows.boundary * lb));
    }
    impl_->m1_chol.factorize(impl_->m1_00);
    impl_->mt1 = assemble_mass(disc.dual[1], disc.grid, mu);
    impl_->mt1_chol.factorize(impl_->mt1);
    return;
  }

  const auto upper = [](Eigen::Index row, Eigen::Index col, double) { return row <= col; };
  impl_->mt2 = assemble_mass(disc.dual[2], disc.grid, eps.reciprocal());
  impl_->mt2.prune(upper);
  impl_->mt2.data().squeeze();
  impl_->m2 = assemble_mass(disc.primal_free[2], disc.grid, mu.reciprocal());
  impl_->m2.prune(upper);
  impl_->m2.data().squeeze();
  for (const auto &lift : impl_->lifts)
  {
    impl_->e_boundary.push_back(-apply(disc.k1_free, lift));
  }
  if (scheme == HodgeScheme::PairingDense)
  {
    impl_->k1_mat = disc.k1.materialize();
    impl_->kt1_mat = disc.kt1.materialize();
    impl_->k1_lu.factorize(impl_->k1_mat);
    impl_->kt1_lu.factorize(impl_->kt1_mat);
  }
}

HodgeOperators::~HodgeOperators() = default;
HodgeOperators::HodgeOperators(HodgeOperators &&) noexcept = default;

Eigen::VectorXd HodgeOperators::boundary_values(double t) const
{
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(disc_->dim_e()));
  for (std::size_t k = 0; k < impl_->lifts.size(); ++k)
  {
    out += boundary_.time_factors[k](t) * impl_->lifts[k];
  }
  return out;
}

void HodgeOperators::e_rhs(std::span<const double> d, double t, bool homogeneous, Eigen::VectorXd &rhs) const
{
  require(d.size() == disc_->dim_d(), ErrorCode::InvalidArgument, "hodge_e: d has the wrong length");
  if (scheme_ == HodgeScheme::MassSolve)
  {
    Eigen::VectorXd full(static_cast<long>(disc_->dim_e()));
    disc_->kt2_free.apply(d, std::span<double>(full.data(), full.size()));
    rhs.resize(static_cast<long>(disc_->e_interior.size()));
    for (std::size_t i = 0; i < disc_->e_interior.size(); ++i)
    {
      rhs[static_cast<long>(i)] = full[disc_->e_interior[i]];
    }
  }
  else
  {
    rhs.noalias() = impl_->mt2.selfadjointView<Eigen::Upper>() * as_vec(d);
  }
  if (!homogeneous)
  {
    for (std::size_t k = 0; k < impl_->e_boundary.size(); ++k)
    {
      rhs += boundary_.time_factors[k](t) * impl_->e_boundary[k];
    }
  }
}

void HodgeOperators::h_rhs(std::span<const double> b, Eigen::VectorXd &rhs) const
{
  require(b.size() == disc_->dim_b(), ErrorCode::InvalidArgument, "hodge_h: b has the wrong length");
  if (scheme_ == HodgeScheme::MassSolve)
  {
    rhs.resize(static_cast<long>(disc_->dim_h()));
    disc_->k2_free.apply(b, std::span<double>(rhs.data(), rhs.size()));
  }
  else
  {
    Eigen::VectorXd full(static_cast<long>(disc_->dim_b()));
    full.noalias() = impl_->m2.selfadjointView<Eigen::Upper>() * as_vec(b);
    rhs.resize(static_cast<long>(disc_->b_interior.size()));
    for (std::size_t i = 0; i < disc_->b_interior.size(); ++i)
    {
      rhs[static_cast<long>(i)] = full[disc_->b_interior[i]];
    }
  }
}

void HodgeOperators::hodge_e(std::span<const double> d, double t, std::span<double> e, bool homogeneous) const
{
  require(e.size() == disc_->dim_e(), ErrorCode::InvalidArgument, "hodge_e: e has the wrong length");
  Eigen::VectorXd rhs, e0(static_cast<long>(disc_->e_interior.size()));
  e_rhs(d, t, homogeneous, rhs);
  const std::span<const double> r(rhs.data(), rhs.size());
  const std::span<double> x(e0.data(), e0.size());
  switch (scheme_)
  {
    case HodgeScheme::MassSolve:
      impl_->m1_chol.solve(r, x);
      break;
    case HodgeScheme::PairingSolve:
      disc_->k1.solve(r, x);
      break;
    case HodgeScheme::PairingDense:
      impl_->k1_lu.solve(r, x);
      break;
  }
  if (homogeneous || impl_->lifts.empty())
  {
    std::fill(e.begin(), e.end(), 0.0);
  }
  else
  {
    as_vec(e) = boundary_values(t);
  }
  for (std::size_t i = 0; i < disc_->e_interior.size(); ++i)
  {
    e[disc_->e_interior[i]] = e0[static_cast<long>(i)];
  }
}

void HodgeOperators::hodge_h(std::span<const double> b, std::span<double> h) const
{
  require(h.size() == disc_->dim_h(), ErrorCode::InvalidArgument, "hodge_h: h has the wrong length");
  Eigen::VectorXd rhs;
  h_rhs(b, rhs);
  const std::span<const double> r(rhs.data(), rhs.size());
  switch (scheme_)
  {
    case HodgeScheme::MassSolve:
      impl_->mt1_chol.solve(r, h);
      break;
    case HodgeScheme::PairingSolve:
      disc_->kt1.solve(r, h);
      break;
    case HodgeScheme::PairingDense:
      impl_->kt1_lu.solve(r, h);
      break;
  }
}

double HodgeOperators::residual_e(std::span<const double> d, std::span<const double> e, double t,
                                  bool homogeneous) const
{
  Eigen::VectorXd rhs;
  e_rhs(d, t, homogeneous, rhs);
  Eigen::VectorXd e0(static_cast<long>(disc_->e_interior.size()));
  for (std::size_t i = 0; i < disc_->e_interior.size(); ++i)
  {
    e0[static_cast<long>(i)] = e[disc_->e_interior[i]];
  }
  Eigen::VectorXd lhs;
  if (scheme_ == HodgeScheme::MassSolve)
  {
    lhs = impl_->m1_00 * e0;
  }
  else
  {
    lhs = apply(disc_->k1, e0);
  }
  const double scale = rhs.norm();
  return scale > 0.0 ? (lhs - rhs).norm() / scale : (lhs - rhs).norm();
}

double HodgeOperators::residual_h(std::span<const double> b, std::span<const double> h) const
{
  Eigen::VectorXd rhs;
  h_rhs(b, rhs);
  Eigen::VectorXd lhs;
  if (scheme_ == HodgeScheme::MassSolve)
  {
    lhs = impl_->mt1 * as_vec(h);
  }
  else
  {
    lhs = apply(disc_->kt1, Eigen::VectorXd(as_vec(h)));
  }
  const double scale = rhs.norm();
  return scale > 0.0 ? (lhs - rhs).norm() / scale : (lhs - rhs).norm();
}

}  // namespace maxkron
