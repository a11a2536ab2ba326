// SPDX-License-Identifier: Apache-2.0

#include "maxkron/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "maxkron/error.hpp"

namespace maxkron
{

GeometryMap GeometryMap::identity()
{
  return GeometryMap{};
}

GeometryMap GeometryMap::nurbs(std::array<KnotVector, 3> knots, std::vector<Eigen::Vector3d> control_points,
                               std::vector<double> weights)
{
  GeometryMap g;
  g.kind_ = GeometryKind::NurbsVolume;
  const std::size_t n = static_cast<std::size_t>(knots[0].dim()) * knots[1].dim() * knots[2].dim();
  require(control_points.size() == n, ErrorCode::InvalidGeometry,
          "expected " + std::to_string(n) + " control points");
  if (weights.empty())
  {
    weights.assign(n, 1.0);
  }
  require(weights.size() == n, ErrorCode::InvalidGeometry, "weights and control points differ in count");
  for (double w : weights)
  {
    require(w > 0.0, ErrorCode::InvalidGeometry, "NURBS weights must be positive");
  }
  g.knots_ = std::move(knots);
  g.points_ = std::move(control_points);
  g.weights_ = std::move(weights);
  return g;
}

std::array<int, 3> GeometryMap::control_shape() const
{
  if (!knots_)
  {
    return {0, 0, 0};
  }
  return {(*knots_)[0].dim(), (*knots_)[1].dim(), (*knots_)[2].dim()};
}

Eigen::Vector3d GeometryMap::map(const Eigen::Vector3d &u) const
{
  if (kind_ == GeometryKind::IdentityCube)
  {
    return u;
  }
  return metric_at(u).x;
}

MetricSample GeometryMap::metric_at(const Eigen::Vector3d &u) const
{
  for (int d = 0; d < 3; ++d)
  {
    if (!(u[d] >= 0.0 && u[d] <= 1.0))
    {
      fail(ErrorCode::Domain, "parametric point outside [0,1]^3");
    }
  }
  MetricSample m;
  m.point = u;
  if (kind_ == GeometryKind::IdentityCube)
  {
    m.x = u;
    m.jacobian.setIdentity();
    m.inv_transpose.setIdentity();
    m.det = 1.0;
    return m;
  }

  const auto &kv = *knots_;
  std::array<std::vector<double>, 3> ders;
  std::array<int, 3> first{};
  std::array<int, 3> p{};
  for (int d = 0; d < 3; ++d)
  {
    p[d] = kv[d].degree();
    first[d] = eval_bspline_span(kv[d], u[d], 1, ders[d]) - p[d];
  }
  const auto shape = control_shape();

  // Homogeneous sums A = sum N w P, W = sum N w and their parametric derivatives.
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Matrix3d da = Eigen::Matrix3d::Zero();
  double w = 0.0;
  Eigen::Vector3d dw = Eigen::Vector3d::Zero();
  for (int k = 0; k <= p[2]; ++k)
  {
    for (int j = 0; j <= p[1]; ++j)
    {
      for (int i = 0; i <= p[0]; ++i)
      {
        const std::size_t idx = (first[0] + i) + shape[0] * ((first[1] + j) + static_cast<std::size_t>(shape[1]) * (first[2] + k));
        const double n0 = ders[0][i], n1 = ders[1][j], n2 = ders[2][k];
        const double d0 = ders[0][p[0] + 1 + i], d1 = ders[1][p[1] + 1 + j], d2 = ders[2][p[2] + 1 + k];
        const double wi = weights_[idx];
        const Eigen::Vector3d &pt = points_[idx];
        const double nn = n0 * n1 * n2 * wi;
        const Eigen::Vector3d dn(d0 * n1 * n2 * wi, n0 * d1 * n2 * wi, n0 * n1 * d2 * wi);
        a += nn * pt;
        w += nn;
        da += pt * dn.transpose();
        dw += dn;
      }
    }
  }
  m.x = a / w;
  m.jacobian = (da - m.x * dw.transpose()) / w;
  m.det = m.jacobian.determinant();
  if (!(m.det > 0.0))
  {
    fail(ErrorCode::DegenerateGeometry, "non-positive Jacobian determinant");
  }
  m.inv_transpose = m.jacobian.inverse().transpose();
  return m;
}

double GeometryMap::min_det_on_grid(int n) const
{
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
  {
    for (int j = 0; j < n; ++j)
    {
      for (int i = 0; i < n; ++i)
      {
        const Eigen::Vector3d u(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1),
                                static_cast<double>(k) / (n - 1));
        try
        {
          best = std::min(best, metric_at(u).det);
        }
        catch (const Error &)
        {
          return 0.0;
        }
      }
    }
  }
  return best;
}

nlohmann::json GeometryMap::to_json() const
{
  nlohmann::json j;
  if (kind_ == GeometryKind::IdentityCube)
  {
    j["kind"] = "identity_cube";
    return j;
  }
  j["kind"] = "nurbs";
  for (int d = 0; d < 3; ++d)
  {
    j["degree"].push_back((*knots_)[d].degree());
    j["knots"].push_back((*knots_)[d].knots());
  }
  for (const auto &pt : points_)
  {
    j["control_points"].push_back({pt[0], pt[1], pt[2]});
  }
  j["weights"] = weights_;
  return j;
}

GeometryMap identity_cube()
{
  return GeometryMap::identity();
}

GeometryMap nurbs_unit_cube()
{
  const KnotVector kv = make_open_knot_vector(2, 1);
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < 3; ++k)
  {
    for (int j = 0; j < 3; ++j)
    {
      for (int i = 0; i < 3; ++i)
      {
        pts.emplace_back(0.5 * i, 0.5 * j, 0.5 * k);
      }
    }
  }
  return GeometryMap::nurbs({kv, kv, kv}, std::move(pts));
}

GeometryMap coaxial_quarter(std::optional<Eigen::Vector3d> displacement)
{
  const double s2 = std::numbers::sqrt2;
  const KnotVector kv = make_open_knot_vector(2, 1);
  const Eigen::Vector2d arc[3] = {{1.0, 0.0}, {1.0, -1.0}, {0.0, -1.0}};
  const double arc_w[3] = {1.0, s2 / 2.0, 1.0};
  const double radius[3] = {1.0, 0.5 * (1.0 + s2), s2};
  const double height[3] = {0.0, 0.5, 1.0};

  std::vector<Eigen::Vector3d> pts;
  std::vector<double> w;
  for (int k = 0; k < 3; ++k)
  {
    for (int j = 0; j < 3; ++j)
    {
      for (int i = 0; i < 3; ++i)
      {
        pts.emplace_back(radius[j] * arc[i][0], radius[j] * arc[i][1], height[k]);
        w.push_back(arc_w[i]);
      }
    }
  }
  if (displacement)
  {
    require(displacement->norm() < 0.05, ErrorCode::InvalidGeometry,
            "control point displacement must be smaller than 0.05");
    pts[1 + 3 * (1 + 3 * 1)] += *displacement;
  }
  GeometryMap g = GeometryMap::nurbs({kv, kv, kv}, std::move(pts), std::move(w));
  require(g.min_det_on_grid(10) > 0.0, ErrorCode::InvalidGeometry,
          "coaxial map is not orientation preserving");
  return g;
}

Eigen::Vector3d push_forward_kform(const MetricSample &m, int k, const Eigen::Vector3d &u)
{
  require(m.det > 0.0, ErrorCode::DegenerateGeometry, "degenerate metric sample");
  switch (k)
  {
    case 0:
      return u;
    case 1:
      return m.inv_transpose * u;
    case 2:
      return m.jacobian * u / m.det;
    case 3:
      return u / m.det;
    default:
      fail(ErrorCode::InvalidArgument, "form degree must be 0..3");
  }
}

double push_forward_scalar(const MetricSample &m, int k, double u)
{
  require(k == 0 || k == 3, ErrorCode::InvalidArgument, "scalar proxies exist for k = 0, 3");
  return push_forward_kform(m, k, Eigen::Vector3d(u, 0.0, 0.0))[0];
}

}  // namespace maxkron
