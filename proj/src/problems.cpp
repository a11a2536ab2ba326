// SPDX-License-Identifier: Apache-2.0

#include "maxkron/problems.hpp"

#include <cmath>
#include <numbers>

namespace maxkron
{

Eigen::Vector3d SeparableField::operator()(const Eigen::Vector3d &x, double t) const
{
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < space.size(); ++k)
  {
    v += time[k](t) * space[k](x);
  }
  return v;
}

ExactForm SeparableField::at(double t) const
{
  return [f = *this, t](const Eigen::Vector3d &x) { return f(x, t); };
}

double cavity_frequency()
{
  return std::numbers::sqrt2 * std::numbers::pi;
}

ExactSolution cavity_mode(double amplitude)
{
  const double pi = std::numbers::pi;
  const double w = cavity_frequency();
  const double a = amplitude;
  ExactSolution s;
  s.e.time = {[w](double t) { return std::cos(w * t); }};
  s.e.space = {[a, pi](const Eigen::Vector3d &x)
               { return Eigen::Vector3d(0.0, 0.0, a * std::sin(pi * x[0]) * std::sin(pi * x[1])); }};
  s.h.time = {[w](double t) { return std::sin(w * t); }};
  s.h.space = {[a, pi, w](const Eigen::Vector3d &x)
               {
                 return Eigen::Vector3d(-a * pi / w * std::sin(pi * x[0]) * std::cos(pi * x[1]),
                                        a * pi / w * std::cos(pi * x[0]) * std::sin(pi * x[1]), 0.0);
               }};
  s.a.time = s.h.time;
  s.a.space = {[a, pi, w](const Eigen::Vector3d &x)
               { return Eigen::Vector3d(0.0, 0.0, -a / w * std::sin(pi * x[0]) * std::sin(pi * x[1])); }};
  s.c.time = s.e.time;
  s.c.space = {[a, pi](const Eigen::Vector3d &x)
               { return Eigen::Vector3d(0.0, -a / pi * std::cos(pi * x[0]) * std::sin(pi * x[1]), 0.0); }};
  s.energy = a * a / 8.0;
  return s;
}

ExactSolution tem_mode(double amplitude)
{
  const double pi = std::numbers::pi;
  const double a = amplitude;
  // g(z - t) = cos(pi z) cos(pi t) + sin(pi z) sin(pi t); G = sin(pi s) / pi.
  const std::function<double(double)> ct = [pi](double t) { return std::cos(pi * t); };
  const std::function<double(double)> st = [pi](double t) { return std::sin(pi * t); };
  auto radial = [a](const Eigen::Vector3d &x, double f)
  {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Eigen::Vector3d(a * f * x[0] / r2, a * f * x[1] / r2, 0.0);
  };
  auto azimuthal = [a](const Eigen::Vector3d &x, double f)
  {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Eigen::Vector3d(-a * f * x[1] / r2, a * f * x[0] / r2, 0.0);
  };
  ExactSolution s;
  s.e.time = {ct, st};
  s.e.space = {[=](const Eigen::Vector3d &x) { return radial(x, std::cos(pi * x[2])); },
               [=](const Eigen::Vector3d &x) { return radial(x, std::sin(pi * x[2])); }};
  s.h.time = {ct, st};
  s.h.space = {[=](const Eigen::Vector3d &x) { return azimuthal(x, std::cos(pi * x[2])); },
               [=](const Eigen::Vector3d &x) { return azimuthal(x, std::sin(pi * x[2])); }};
  // G(z - t) = (sin(pi z) cos(pi t) - cos(pi z) sin(pi t)) / pi
  s.a.time = {ct, st};
  s.a.space = {[=](const Eigen::Vector3d &x) { return radial(x, std::sin(pi * x[2]) / pi); },
               [=](const Eigen::Vector3d &x) { return radial(x, -std::cos(pi * x[2]) / pi); }};
  s.c.time = {ct, st};
  s.c.space = {[=](const Eigen::Vector3d &x) { return azimuthal(x, -std::sin(pi * x[2]) / pi); },
               [=](const Eigen::Vector3d &x) { return azimuthal(x, std::cos(pi * x[2]) / pi); }};
  s.boundary.time_factors = s.e.time;
  s.boundary.spatial_terms = s.e.space;
  return s;
}

}  // namespace maxkron
