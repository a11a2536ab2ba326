// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_GEOMETRY_HPP
#define MAXKRON_GEOMETRY_HPP

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "maxkron/splines.hpp"

namespace maxkron
{

enum class GeometryKind
{
  IdentityCube,
  NurbsVolume
};

struct MetricSample
{
  Eigen::Vector3d point;          // parametric
  Eigen::Vector3d x;              // physical
  Eigen::Matrix3d jacobian;       // DF, column d = dF/du_d
  double det = 1.0;
  Eigen::Matrix3d inv_transpose;  // DF^{-T}
};

//
// Parametrization F: [0,1]^3 -> Omega, either the identity or a trivariate NURBS.
//
class GeometryMap
{
public:
  static GeometryMap identity();
  // Control points indexed i1 + n1 * (i2 + n2 * i3); weights default to one.
  static GeometryMap nurbs(std::array<KnotVector, 3> knots, std::vector<Eigen::Vector3d> control_points,
                           std::vector<double> weights = {});

  GeometryKind kind() const { return kind_; }
  // True when DF is diagonal everywhere, which lets assembly skip cross-component blocks.
  bool diagonal_metric() const { return kind_ == GeometryKind::IdentityCube; }

  Eigen::Vector3d map(const Eigen::Vector3d &u) const;
  // Throws Domain outside [0,1]^3 and DegenerateGeometry when det DF <= 0.
  MetricSample metric_at(const Eigen::Vector3d &u) const;

  const std::array<KnotVector, 3> &knots() const { return *knots_; }
  const std::vector<Eigen::Vector3d> &control_points() const { return points_; }
  const std::vector<double> &weights() const { return weights_; }
  std::array<int, 3> control_shape() const;

  // Smallest det DF on an n^3 grid of parametric points including the faces.
  double min_det_on_grid(int n) const;

  nlohmann::json to_json() const;

private:
  GeometryKind kind_ = GeometryKind::IdentityCube;
  std::optional<std::array<KnotVector, 3>> knots_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<double> weights_;
};

GeometryMap identity_cube();

// Degree-2 NURBS representation of the unit cube (control points on the Greville grid).
GeometryMap nurbs_unit_cube();

//
// Quarter of the coaxial cable 1 < x^2 + y^2 < 2, 0 < z < 1, in the quadrant x > 0, y < 0.
// u runs along the arcs from (r, 0) to (0, -r), v is radial and w = z. Degree 2 in each
// direction, one element. The optional displacement moves the central control point.
// Throws InvalidGeometry if |displacement| >= 0.05 or det DF is not positive.
//
GeometryMap coaxial_quarter(std::optional<Eigen::Vector3d> displacement = std::nullopt);

// Physical proxy of a k-form from its parametric proxy at a sample.
// k = 0: unchanged; k = 1: DF^{-T} u; k = 2: DF u / det; k = 3: u / det (first entry).
Eigen::Vector3d push_forward_kform(const MetricSample &m, int k, const Eigen::Vector3d &u);
double push_forward_scalar(const MetricSample &m, int k, double u);

}  // namespace maxkron

#endif  // MAXKRON_GEOMETRY_HPP
