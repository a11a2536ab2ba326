// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_PROBLEMS_HPP
#define MAXKRON_PROBLEMS_HPP

#include <functional>
#include <vector>

#include "maxkron/assembly.hpp"
#include "maxkron/hodge.hpp"

namespace maxkron
{

// F(x, t) = sum_k f_k(t) F_k(x).
struct SeparableField
{
  std::vector<std::function<double(double)>> time;
  std::vector<ExactForm> space;

  Eigen::Vector3d operator()(const Eigen::Vector3d &x, double t) const;
  ExactForm at(double t) const;
};

//
// Exact Maxwell solution with eps = mu = 1 together with potentials
// B = curl A (E = -dA/dt) and D = curl C, used for solenoidal initial data.
//
struct ExactSolution
{
  SeparableField e, h, a, c;
  // Tangential E data on the boundary; empty for perfect conductors.
  BoundaryData boundary;
  // Energy 1/2 int |E|^2 + |H|^2 when constant in time, otherwise negative.
  double energy = -1.0;
};

// Lowest cube mode: E = (0, 0, sin(pi x) sin(pi y)) cos(w t), w = sqrt(2) pi.
ExactSolution cavity_mode(double amplitude = 1.0);
double cavity_frequency();

// TEM wave in the coaxial quarter: E = g(z - t) r^/r, H = g(z - t) phi^/r, g(s) = cos(pi s).
ExactSolution tem_mode(double amplitude = 1.0);

}  // namespace maxkron

#endif  // MAXKRON_PROBLEMS_HPP
