// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_SPLINES_HPP
#define MAXKRON_SPLINES_HPP

#include <vector>

namespace maxkron
{

//
// Open knot vectors on the parametric interval [0, 1].
//
class KnotVector
{
public:
  // Validates that the vector is nondecreasing, lives on [0, 1], is open (end knots
  // repeated degree+1 times) and spans at least degree+1 basis functions.
  KnotVector(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  const std::vector<double> &knots() const { return knots_; }
  double knot(int i) const { return knots_[i]; }

  // Number of B-splines, m = #knots - p - 1.
  int dim() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

  // Distinct knot values, i.e. the element boundaries.
  std::vector<double> breakpoints() const;
  int num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }

  // Largest interior multiplicity (0 when there are no interior knots).
  int max_interior_multiplicity() const;

  // Index i with knots[i] <= x < knots[i+1], clamped to the last nonempty span at x = 1.
  int find_span(double x) const;

  bool operator==(const KnotVector &other) const = default;

private:
  int degree_;
  std::vector<double> knots_;
};

// Uniform open knot vector with n_elements elements and single interior knots.
KnotVector make_open_knot_vector(int degree, int n_elements);

// Removes the first and last knot and lowers the degree by one.
KnotVector derived_knot_vector(const KnotVector &kv);

enum class BasisFlavor
{
  BSpline,
  CurrySchoenberg
};

//
// A univariate spline space S_p(kv), optionally with the first and last basis
// function removed. Curry-Schoenberg functions are B_i scaled by (p+1)/(t_{i+p+1}-t_i),
// so each integrates to one and the derivative map from the parent space is the
// bidiagonal difference matrix with entries -1, +1.
//
struct UnivariateSplineSpace
{
  KnotVector knots;
  BasisFlavor flavor = BasisFlavor::BSpline;
  bool trimmed = false;

  int degree() const { return knots.degree(); }
  int full_dim() const { return knots.dim(); }
  int dim() const { return trimmed ? knots.dim() - 2 : knots.dim(); }
  int offset() const { return trimmed ? 1 : 0; }

  // Scaling applied to the i-th B-spline (untrimmed numbering).
  double scale(int i) const;

  UnivariateSplineSpace untrimmed() const { return {knots, flavor, false}; }
  bool operator==(const UnivariateSplineSpace &other) const = default;
};

// Nonzero basis functions at a point. values[d * count + j] holds the d-th
// derivative of function index[j]; indices are in the (possibly trimmed) numbering.
struct BasisEvaluation
{
  int nderiv = 0;
  std::vector<int> index;
  std::vector<double> values;

  int count() const { return static_cast<int>(index.size()); }
  double value(int deriv, int j) const { return values[deriv * count() + j]; }
};

BasisEvaluation eval_basis(const UnivariateSplineSpace &space, double x, int nderiv = 0);

// Untrimmed B-spline values and derivatives (Piegl & Tiller A2.3). Returns the span
// index s; function s - p + j has derivative d stored at ders[d * (p+1) + j].
int eval_bspline_span(const KnotVector &kv, double x, int nderiv, std::vector<double> &ders);

//
// Gauss-Legendre quadrature, points_per_element nodes on every nonempty knot span.
//
struct QuadratureRule
{
  int points_per_element = 0;
  std::vector<double> element_bounds;  // n_elements + 1 breakpoints
  std::vector<double> nodes;           // element-major
  std::vector<double> weights;

  int num_elements() const { return static_cast<int>(element_bounds.size()) - 1; }
  int size() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_rule(const KnotVector &kv, int points_per_element);

// Reference Gauss-Legendre rule on [0, 1].
void gauss_legendre_unit(int n, std::vector<double> &nodes, std::vector<double> &weights);

}  // namespace maxkron

#endif  // MAXKRON_SPLINES_HPP
