// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_HODGE_HPP
#define MAXKRON_HODGE_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "maxkron/assembly.hpp"
#include "maxkron/complex.hpp"
#include "maxkron/geometry.hpp"
#include "maxkron/pairing.hpp"

namespace maxkron
{

//
// Everything that depends only on mesh, degree and geometry: both complexes, the
// quadrature grid, incidence matrices and the metric-free pairings.
//
// Unknowns: e on free primal 1-forms, b on free primal 2-forms, h on dual 1-forms,
// d on dual 2-forms. The interior of e is the homogeneous (trimmed) 1-form space.
//
struct Discretization
{
  Discretization(int degree, int n_elements, GeometryMap geometry);

  int p = 0;
  int n = 0;
  GeometryMap geometry;
  DeRhamComplex primal;       // homogeneous boundary conditions
  DeRhamComplex primal_free;
  DeRhamComplex dual;
  QuadratureGrid grid;

  IncidenceMatrix curl;       // free primal 1 -> 2
  IncidenceMatrix div;        // free primal 2 -> 3
  IncidenceMatrix dual_curl;  // dual 1 -> 2
  IncidenceMatrix dual_div;   // dual 2 -> 3

  std::vector<int> e_interior, e_boundary;  // in free 1-form numbering
  std::vector<int> b_interior;              // in free 2-form numbering

  PairingMatrix3D k1;        // dual 2 x homogeneous primal 1 (square, factorized)
  PairingMatrix3D kt1;       // homogeneous primal 2 x dual 1 (square, factorized)
  PairingMatrix3D k1_free;   // dual 2 x free primal 1
  PairingMatrix3D kt2_free;  // free primal 1 x dual 2
  PairingMatrix3D k2_free;   // dual 1 x free primal 2

  std::size_t dim_e() const { return primal_free[1].dim(); }
  std::size_t dim_b() const { return primal_free[2].dim(); }
  std::size_t dim_h() const { return dual[1].dim(); }
  std::size_t dim_d() const { return dual[2].dim(); }
  // Interior electric plus all magnetic unknowns.
  std::size_t dofs() const { return e_interior.size() + dim_b(); }
};

enum class HodgeScheme
{
  MassSolve,     // primal mass matrices, sparse Cholesky
  PairingSolve,  // pairing matrices, Kronecker banded solves
  PairingDense   // pairing matrices materialized, sparse LU
};

std::string to_string(HodgeScheme s);
HodgeScheme hodge_scheme_from_string(const std::string &s);

//
// Tangential electric boundary data sum_k f_k(t) E_k(x), lifted once per spatial term.
//
struct BoundaryData
{
  std::vector<std::function<double(double)>> time_factors;
  std::vector<ExactForm> spatial_terms;
};

//
// Discrete constitutive relations e = H_eps(d), h = H_mu(b) for one scheme.
//
class HodgeOperators
{
public:
  HodgeOperators(const Discretization &disc, HodgeScheme scheme, const MaterialField &eps,
                 const MaterialField &mu, const BoundaryData &boundary = {});
  ~HodgeOperators();
  HodgeOperators(HodgeOperators &&) noexcept;

  HodgeScheme scheme() const { return scheme_; }
  const Discretization &discretization() const { return *disc_; }
  bool has_boundary_data() const { return !boundary_.time_factors.empty(); }

  // e on free 1-forms; boundary values are the lifted data at time t unless homogeneous.
  void hodge_e(std::span<const double> d, double t, std::span<double> e, bool homogeneous = false) const;
  void hodge_h(std::span<const double> b, std::span<double> h) const;

  // Lifted boundary values at time t (free 1-form numbering, zero in the interior).
  Eigen::VectorXd boundary_values(double t) const;

  // Relative residuals of the defining linear systems.
  double residual_e(std::span<const double> d, std::span<const double> e, double t, bool homogeneous = false) const;
  double residual_h(std::span<const double> b, std::span<const double> h) const;

private:
  struct Impl;
  const Discretization *disc_;
  HodgeScheme scheme_;
  BoundaryData boundary_;
  std::unique_ptr<Impl> impl_;

  void e_rhs(std::span<const double> d, double t, bool homogeneous, Eigen::VectorXd &rhs) const;
  void h_rhs(std::span<const double> b, Eigen::VectorXd &rhs) const;
};

}  // namespace maxkron

#endif  // MAXKRON_HODGE_HPP
