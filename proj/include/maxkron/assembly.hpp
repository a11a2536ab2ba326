// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_ASSEMBLY_HPP
#define MAXKRON_ASSEMBLY_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "maxkron/complex.hpp"
#include "maxkron/geometry.hpp"

namespace maxkron
{

//
// Scalar material coefficient, constant or a function of the physical point.
//
class MaterialField
{
public:
  static MaterialField constant(double value);
  // lower_bound > 0 is checked at every sample taken during assembly.
  static MaterialField callable(std::function<double(const Eigen::Vector3d &)> f, double lower_bound);

  bool is_constant() const { return !f_; }
  double operator()(const Eigen::Vector3d &x) const;
  MaterialField reciprocal() const;

private:
  double value_ = 1.0;
  double lower_bound_ = 0.0;
  std::function<double(const Eigen::Vector3d &)> f_;
};

//
// Tensor Gauss grid with p_d + 1 points per element in direction d (or a fixed count),
// plus the geometry evaluated at every point. Point index q1 + Q1 * (q2 + Q2 * q3).
// Error norms should use more points than assembly: at p + 1 Gauss points the
// projection error superconverges and the measured norm is too optimistic.
//
class QuadratureGrid
{
public:
  QuadratureGrid(const std::array<KnotVector, 3> &knots, const GeometryMap &map, int points_per_element = 0);

  const QuadratureRule &rule(int d) const { return rules_[d]; }
  std::array<int, 3> shape() const { return {rules_[0].size(), rules_[1].size(), rules_[2].size()}; }
  std::size_t size() const { return n_; }
  const GeometryMap &geometry() const { return map_; }
  bool identity_map() const { return map_.kind() == GeometryKind::IdentityCube; }

  double weight(std::size_t q) const { return weight_[q]; }
  Eigen::Vector3d parametric(std::size_t q) const;
  Eigen::Vector3d x(std::size_t q) const;
  double det(std::size_t q) const { return identity_map() ? 1.0 : det_[q]; }
  Eigen::Matrix3d jacobian(std::size_t q) const;
  Eigen::Matrix3d inv_transpose(std::size_t q) const;

private:
  std::array<QuadratureRule, 3> rules_;
  GeometryMap map_;
  std::size_t n_ = 0;
  std::vector<double> weight_, x_, det_, jac_, inv_t_;
};

//
// Values of a univariate space at quadrature points: rows are points, columns basis
// functions, nonzeros of each row contiguous. Usable with apply_mode.
//
class Collocation1D
{
public:
  Collocation1D(const UnivariateSplineSpace &space, const QuadratureRule &rule);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int row_begin(int i) const { return begin_[i]; }
  int row_end(int i) const { return end_[i]; }
  const double *row_data(int i) const { return vals_.data() + static_cast<std::size_t>(i) * stride_; }
  double value(int i, int j) const
  {
    return j >= begin_[i] && j < end_[i] ? vals_[static_cast<std::size_t>(i) * stride_ + (j - begin_[i])] : 0.0;
  }

private:
  int rows_ = 0, cols_ = 0, stride_ = 0;
  std::vector<int> begin_, end_;
  std::vector<double> vals_;
};

// Physical field sampled at all grid points, component-major: values[c * npoints + q].
struct PointField
{
  int components = 0;
  std::vector<double> values;

  double operator()(int c, std::size_t q) const { return values[c * npoints() + q]; }
  std::size_t npoints() const { return components ? values.size() / components : 0; }
};

// Proxy components of a k-form: 1 for k = 0, 3 and 3 otherwise.
using ExactForm = std::function<Eigen::Vector3d(const Eigen::Vector3d &x)>;
PointField sample_field(const QuadratureGrid &grid, int components, const ExactForm &f);

//
// Sum-factorized evaluation of discrete forms and of load vectors on the grid.
//
class FieldSampler
{
public:
  FieldSampler(const FormSpace &space, const QuadratureGrid &grid);

  const FormSpace &space() const { return space_; }
  const QuadratureGrid &grid() const { return *grid_; }

  // Parametric proxy values at every grid point.
  PointField evaluate_parametric(std::span<const double> coeffs) const;
  // Pushed-forward physical proxy values.
  PointField evaluate(std::span<const double> coeffs) const;
  // f_i = int <proxy_i, field> dV for a physical field sampled on the grid.
  void load(const PointField &field, std::span<double> out) const;

  // sqrt(int |u_h - u|^2 dV) where u is sampled on the grid.
  double l2_error(std::span<const double> coeffs, const PointField &exact) const;
  double l2_norm(const PointField &field) const;

private:
  FormSpace space_;
  const QuadratureGrid *grid_;
  std::vector<std::array<Collocation1D, 3>> colloc_;
};

// Weighted mass matrix int gamma <proxy_i, proxy_j> dV. Throws InvalidMaterial on a
// non-positive coefficient sample.
Eigen::SparseMatrix<double> assemble_mass(const FormSpace &space, const QuadratureGrid &grid,
                                          const MaterialField &coeff = MaterialField::constant(1.0));

//
// Sparse direct solvers used by the assembly and the mass-matrix Hodge back-end.
//
class CholeskySolver
{
public:
  CholeskySolver();
  ~CholeskySolver();
  CholeskySolver(CholeskySolver &&) noexcept;
  CholeskySolver &operator=(CholeskySolver &&) noexcept;

  // Throws Factorization if the matrix is not positive definite.
  void factorize(const Eigen::SparseMatrix<double> &a);
  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::size_t size() const { return n_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_ = 0;
};

class SparseLuSolver
{
public:
  SparseLuSolver();
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver &&) noexcept;
  SparseLuSolver &operator=(SparseLuSolver &&) noexcept;

  void factorize(const Eigen::SparseMatrix<double> &a);
  void solve(std::span<const double> rhs, std::span<double> x) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_ = 0;
};

// Unweighted L2 projection onto a form space, reusing one mass factorization.
class L2Projector
{
public:
  L2Projector(const FormSpace &space, const QuadratureGrid &grid);

  Eigen::VectorXd project(const PointField &field) const;
  Eigen::VectorXd project(const ExactForm &f) const;
  const FieldSampler &sampler() const { return sampler_; }
  const Eigen::SparseMatrix<double> &mass() const { return mass_; }

private:
  FieldSampler sampler_;
  Eigen::SparseMatrix<double> mass_;
  CholeskySolver solver_;
};

Eigen::VectorXd l2_project(const FormSpace &space, const ExactForm &f, const QuadratureGrid &grid);
double l2_error(const FormSpace &space, std::span<const double> coeffs, const ExactForm &f,
                const QuadratureGrid &grid);

//
// Lifting of tangential boundary data for primal 1-forms: joint L2 projection, on the
// parametric faces, of the pulled-back tangential trace onto the traces of the boundary
// functions of free(space). Returns a vector on free(space), zero at interior indices.
//
Eigen::VectorXd boundary_lifting(const FormSpace &space, const ExactForm &trace, const GeometryMap &map);

}  // namespace maxkron

#endif  // MAXKRON_ASSEMBLY_HPP
