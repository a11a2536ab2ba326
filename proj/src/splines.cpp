// SPDX-License-Identifier: Apache-2.0

#include "maxkron/splines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "maxkron/error.hpp"

namespace maxkron
{

KnotVector::KnotVector(int degree, std::vector<double> knots)
  : degree_(degree), knots_(std::move(knots))
{
  require(degree_ >= 0, ErrorCode::InvalidArgument, "negative spline degree");
  const int n = static_cast<int>(knots_.size());
  require(n >= 2 * (degree_ + 1), ErrorCode::InvalidArgument,
          "knot vector too short for degree " + std::to_string(degree_));
  require(std::is_sorted(knots_.begin(), knots_.end()), ErrorCode::InvalidArgument,
          "knot vector must be nondecreasing");
  require(knots_.front() == 0.0 && knots_.back() == 1.0, ErrorCode::InvalidArgument,
          "knot vector must span [0, 1]");
  for (int i = 0; i <= degree_; ++i)
  {
    require(knots_[i] == 0.0 && knots_[n - 1 - i] == 1.0, ErrorCode::InvalidArgument,
            "knot vector is not open");
  }
  require(knots_[degree_ + 1] > 0.0 && knots_[n - degree_ - 2] < 1.0,
          ErrorCode::InvalidArgument, "end knots repeated more than degree+1 times");
  for (int i = 0; i + degree_ + 1 < n; ++i)
  {
    require(knots_[i + degree_ + 1] > knots_[i], ErrorCode::InvalidArgument,
            "interior knot multiplicity exceeds degree+1");
  }
}

std::vector<double> KnotVector::breakpoints() const
{
  std::vector<double> out;
  for (double k : knots_)
  {
    if (out.empty() || k > out.back())
    {
      out.push_back(k);
    }
  }
  return out;
}

int KnotVector::max_interior_multiplicity() const
{
  int best = 0;
  int i = degree_ + 1;
  const int end = static_cast<int>(knots_.size()) - degree_ - 1;
  while (i < end)
  {
    int j = i;
    while (j < end && knots_[j] == knots_[i])
    {
      ++j;
    }
    best = std::max(best, j - i);
    i = j;
  }
  return best;
}

int KnotVector::find_span(double x) const
{
  const int m = dim();
  if (x >= knots_[m])
  {
    int s = m - 1;
    while (knots_[s] == knots_[s + 1])
    {
      --s;
    }
    return s;
  }
  // Last index with knots[s] <= x, restricted to [p, m-1].
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + m + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

KnotVector make_open_knot_vector(int degree, int n_elements)
{
  require(degree >= 0, ErrorCode::InvalidArgument, "degree must be nonnegative");
  require(n_elements >= 1, ErrorCode::InvalidArgument, "need at least one element");
  std::vector<double> knots(degree + 1, 0.0);
  for (int j = 1; j < n_elements; ++j)
  {
    knots.push_back(static_cast<double>(j) / n_elements);
  }
  knots.insert(knots.end(), degree + 1, 1.0);
  return KnotVector(degree, std::move(knots));
}

KnotVector derived_knot_vector(const KnotVector &kv)
{
  require(kv.degree() >= 1, ErrorCode::InvalidArgument,
          "cannot differentiate a degree-0 spline space");
  const auto &k = kv.knots();
  return KnotVector(kv.degree() - 1, std::vector<double>(k.begin() + 1, k.end() - 1));
}

double UnivariateSplineSpace::scale(int i) const
{
  if (flavor == BasisFlavor::BSpline)
  {
    return 1.0;
  }
  const int p = knots.degree();
  return (p + 1) / (knots.knot(i + p + 1) - knots.knot(i));
}

int eval_bspline_span(const KnotVector &kv, double x, int nderiv, std::vector<double> &ders)
{
  const int p = kv.degree();
  const int span = kv.find_span(x);
  const auto &U = kv.knots();

  // ndu holds basis values (upper triangle) and knot differences (lower triangle).
  std::vector<double> ndu((p + 1) * (p + 1)), left(p + 1), right(p + 1);
  auto NDU = [&](int r, int c) -> double & { return ndu[r * (p + 1) + c]; };
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j)
  {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r)
    {
      NDU(j, r) = right[r + 1] + left[j - r];
      const double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    NDU(j, j) = saved;
  }

  ders.assign((nderiv + 1) * (p + 1), 0.0);
  for (int j = 0; j <= p; ++j)
  {
    ders[j] = NDU(j, p);
  }
  const int nd = std::min(nderiv, p);
  std::vector<double> a(2 * (p + 1));
  auto A = [&](int s, int c) -> double & { return a[s * (p + 1) + c]; };
  for (int r = 0; r <= p; ++r)
  {
    int s1 = 0, s2 = 1;
    A(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k)
    {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k)
      {
        A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
        d = A(s2, 0) * NDU(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j)
      {
        A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
        d += A(s2, j) * NDU(rk + j, pk);
      }
      if (r <= pk)
      {
        A(s2, k) = -A(s1, k - 1) / NDU(pk + 1, r);
        d += A(s2, k) * NDU(r, pk);
      }
      ders[k * (p + 1) + r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= nd; ++k)
  {
    for (int j = 0; j <= p; ++j)
    {
      ders[k * (p + 1) + j] *= factor;
    }
    factor *= (p - k);
  }
  return span;
}

BasisEvaluation eval_basis(const UnivariateSplineSpace &space, double x, int nderiv)
{
  if (!(x >= 0.0 && x <= 1.0))
  {
    fail(ErrorCode::Domain, "evaluation point " + std::to_string(x) + " outside [0, 1]");
  }
  require(nderiv >= 0 && nderiv <= space.degree(), ErrorCode::InvalidArgument,
          "derivative order exceeds spline degree");
  const int p = space.degree();
  std::vector<double> ders;
  const int span = eval_bspline_span(space.knots, x, nderiv, ders);

  BasisEvaluation out;
  out.nderiv = nderiv;
  std::vector<int> keep;
  for (int j = 0; j <= p; ++j)
  {
    const int i = span - p + j;
    if (space.trimmed && (i == 0 || i == space.full_dim() - 1))
    {
      continue;
    }
    keep.push_back(j);
    out.index.push_back(i - space.offset());
  }
  const int count = static_cast<int>(keep.size());
  out.values.resize((nderiv + 1) * count);
  for (int d = 0; d <= nderiv; ++d)
  {
    for (int c = 0; c < count; ++c)
    {
      const int j = keep[c];
      out.values[d * count + c] = ders[d * (p + 1) + j] * space.scale(span - p + j);
    }
  }
  return out;
}

void gauss_legendre_unit(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  require(n >= 1, ErrorCode::InvalidArgument, "need at least one quadrature point");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1)
      {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1)
    {
      p1 = x;
      p0 = 1.0;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map from [-1, 1] to [0, 1].
    nodes[i] = 0.5 * (1.0 - x);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1)
  {
    nodes[n / 2] = 0.5;
  }
}

QuadratureRule gauss_rule(const KnotVector &kv, int points_per_element)
{
  require(points_per_element >= 1, ErrorCode::InvalidArgument,
          "need at least one quadrature point per element");
  std::vector<double> ref_nodes, ref_weights;
  gauss_legendre_unit(points_per_element, ref_nodes, ref_weights);

  QuadratureRule rule;
  rule.points_per_element = points_per_element;
  rule.element_bounds = kv.breakpoints();
  for (int e = 0; e < rule.num_elements(); ++e)
  {
    const double a = rule.element_bounds[e], b = rule.element_bounds[e + 1];
    for (int q = 0; q < points_per_element; ++q)
    {
      rule.nodes.push_back(a + (b - a) * ref_nodes[q]);
      rule.weights.push_back((b - a) * ref_weights[q]);
    }
  }
  return rule;
}

}  // namespace maxkron
