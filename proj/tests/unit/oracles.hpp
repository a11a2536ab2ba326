// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used only by the tests.

#ifndef MAXKRON_TESTS_ORACLES_HPP
#define MAXKRON_TESTS_ORACLES_HPP

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "maxkron/complex.hpp"
#include "maxkron/geometry.hpp"

namespace oracle
{

// Cox-de Boor recursion for B_{i,p}(x) on knots t, with the right-continuous convention
// except at x = t.back(), where the last nonempty span is closed.
inline double cox_de_boor(const std::vector<double> &t, int i, int p, double x)
{
  if (p == 0)
  {
    const double last = t.back();
    if (x == last)
    {
      // Only the last nonempty span contains the right end point.
      int s = static_cast<int>(t.size()) - 2;
      while (t[s] == t[s + 1])
      {
        --s;
      }
      return i == s ? 1.0 : 0.0;
    }
    return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  }
  double v = 0.0;
  if (t[i + p] > t[i])
  {
    v += (x - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, x);
  }
  if (t[i + p + 1] > t[i + 1])
  {
    v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, x);
  }
  return v;
}

// Dense Kronecker product a (x) b.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
  {
    for (int j = 0; j < a.cols(); ++j)
    {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Eigen::VectorXd random_vector(std::mt19937_64 &rng, long n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i)
  {
    v[i] = u(rng);
  }
  return v;
}

inline double rel_err(const Eigen::VectorXd &a, const Eigen::VectorXd &b)
{
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_err(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Composite Gauss-Legendre on [a, b] with nsub panels of 8 points, for analytic checks
// independent of the library quadrature.
template <class F>
double integrate(F f, double a, double b, int nsub = 64)
{
  static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975363};
  static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                              0.2223810344533745, 0.1012285362903763};
  double s = 0.0;
  const double h = (b - a) / nsub;
  for (int k = 0; k < nsub; ++k)
  {
    const double c = a + (k + 0.5) * h;
    for (int q = 0; q < 8; ++q)
    {
      s += 0.5 * h * w[q] * f(c + 0.5 * h * x[q]);
    }
  }
  return s;
}

// Gauss-Legendre 8-point nodes on [0, 1] for every element of the given breakpoints.
inline void tensor_points(const std::vector<double> &breaks, std::vector<double> &x, std::vector<double> &w)
{
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  x.clear();
  w.clear();
  for (std::size_t e = 0; e + 1 < breaks.size(); ++e)
  {
    const double a = breaks[e], h = breaks[e + 1] - breaks[e];
    for (int q = 0; q < 8; ++q)
    {
      x.push_back(a + 0.5 * h * (1.0 + gx[q]));
      w.push_back(0.5 * h * gw[q]);
    }
  }
}

// Dense (points x dim) values of a univariate space via Cox-de Boor, applying the
// Curry-Schoenberg scaling and trimming by hand.
inline Eigen::MatrixXd univariate_values(const maxkron::UnivariateSplineSpace &s, const std::vector<double> &x)
{
  const auto &t = s.knots.knots();
  const int p = s.knots.degree();
  const int m = s.knots.dim();
  const int first = s.trimmed ? 1 : 0, last = s.trimmed ? m - 2 : m - 1;
  Eigen::MatrixXd v(static_cast<long>(x.size()), last - first + 1);
  for (std::size_t q = 0; q < x.size(); ++q)
  {
    for (int i = first; i <= last; ++i)
    {
      double scale = 1.0;
      if (s.flavor == maxkron::BasisFlavor::CurrySchoenberg)
      {
        scale = (p + 1) / (t[i + p + 1] - t[i]);
      }
      v(static_cast<long>(q), i - first) = scale * cox_de_boor(t, i, p, x[q]);
    }
  }
  return v;
}

// Dense values of a tensor space at the tensor grid x1 x x2 x x3 (direction 1 fastest).
inline Eigen::MatrixXd tensor_values(const maxkron::TensorSpace &s, const std::array<std::vector<double>, 3> &x)
{
  const Eigen::MatrixXd v1 = univariate_values(s.factors[0], x[0]);
  const Eigen::MatrixXd v2 = univariate_values(s.factors[1], x[1]);
  const Eigen::MatrixXd v3 = univariate_values(s.factors[2], x[2]);
  return kron(v3, kron(v2, v1));
}

// Brute-force pairing of two form spaces with the proxy dot product, by 3D quadrature
// over all component pairs (cross-component terms included, they must vanish).
inline Eigen::MatrixXd brute_pairing(const maxkron::FormSpace &rows, const maxkron::FormSpace &cols)
{
  std::array<std::vector<double>, 3> x, w;
  for (int d = 0; d < 3; ++d)
  {
    tensor_points(rows.components[0].factors[d].knots.breakpoints(), x[d], w[d]);
  }
  Eigen::VectorXd wt = kron(Eigen::Map<Eigen::VectorXd>(w[2].data(), w[2].size()),
                            kron(Eigen::Map<Eigen::VectorXd>(w[1].data(), w[1].size()),
                                 Eigen::Map<Eigen::VectorXd>(w[0].data(), w[0].size())));
  const long np = wt.size();
  // Proxy values: for each proxy direction a (points x dim) matrix.
  const int ncomp = rows.num_components();
  auto proxy = [&](const maxkron::FormSpace &s)
  {
    std::vector<Eigen::MatrixXd> out(ncomp, Eigen::MatrixXd::Zero(np, static_cast<long>(s.dim())));
    for (int c = 0; c < ncomp; ++c)
    {
      out[c].middleCols(static_cast<long>(s.offset(c)), static_cast<long>(s.components[c].dim())) =
          tensor_values(s.components[c], x);
    }
    return out;
  };
  const auto pr = proxy(rows), pc = proxy(cols);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<long>(rows.dim()), static_cast<long>(cols.dim()));
  for (int c = 0; c < ncomp; ++c)
  {
    k += pr[c].transpose() * wt.asDiagonal() * pc[c];
  }
  return k;
}

// Brute-force mass matrix on a mapped domain: physical proxies are formed point by
// point from the parametric ones (DF^{-T} u, DF u / det, u / det) and integrated with
// det DF. Quadrature points per direction are given, or 8-point Gauss per element.
inline Eigen::MatrixXd brute_mass(const maxkron::FormSpace &s, const maxkron::GeometryMap &map,
                                  std::array<std::vector<double>, 3> x = {},
                                  std::array<std::vector<double>, 3> w = {})
{
  for (int d = 0; d < 3; ++d)
  {
    if (x[d].empty())
    {
      tensor_points(s.components[0].factors[d].knots.breakpoints(), x[d], w[d]);
    }
  }
  const int ncomp = s.num_components();
  std::vector<Eigen::MatrixXd> pr(ncomp);
  const long n = static_cast<long>(s.dim());
  for (int c = 0; c < ncomp; ++c)
  {
    pr[c] = Eigen::MatrixXd::Zero(static_cast<long>(x[0].size() * x[1].size() * x[2].size()), n);
    pr[c].middleCols(static_cast<long>(s.offset(c)), static_cast<long>(s.components[c].dim())) =
        tensor_values(s.components[c], x);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  long q = 0;
  for (std::size_t k = 0; k < x[2].size(); ++k)
  {
    for (std::size_t j = 0; j < x[1].size(); ++j)
    {
      for (std::size_t i = 0; i < x[0].size(); ++i, ++q)
      {
        const maxkron::MetricSample ms = map.metric_at(Eigen::Vector3d(x[0][i], x[1][j], x[2][k]));
        const double wq = w[0][i] * w[1][j] * w[2][k] * ms.det;
        Eigen::MatrixXd phys(ncomp, n);
        for (int c = 0; c < ncomp; ++c)
        {
          phys.row(c) = pr[c].row(q);
        }
        if (s.k == 1)
        {
          phys = ms.jacobian.inverse().transpose() * phys;
        }
        else if (s.k == 2)
        {
          phys = ms.jacobian * phys / ms.det;
        }
        else if (s.k == 3)
        {
          phys /= ms.det;
        }
        m += wq * phys.transpose() * phys;
      }
    }
  }
  return m;
}

}  // namespace oracle

#endif  // MAXKRON_TESTS_ORACLES_HPP
