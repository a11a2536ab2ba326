// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "maxkron/error.hpp"
#include "maxkron/integrator.hpp"
#include "oracles.hpp"

using namespace maxkron;

namespace
{

const MaterialField one = MaterialField::constant(1.0);

// Numerical check of the exact solutions against Maxwell's equations by central differences.
void check_maxwell(const ExactSolution &s, const Eigen::Vector3d &x, double t)
{
  const double h = 1e-5;
  auto curl = [&](const SeparableField &f)
  {
    Eigen::Matrix3d j;  // j(i, k) = d f_i / d x_k
    for (int k = 0; k < 3; ++k)
    {
      Eigen::Vector3d a = x, b = x;
      a[k] -= h;
      b[k] += h;
      j.col(k) = (f(b, t) - f(a, t)) / (2 * h);
    }
    return Eigen::Vector3d(j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1));
  };
  auto dt = [&](const SeparableField &f) { return Eigen::Vector3d((f(x, t + h) - f(x, t - h)) / (2 * h)); };
  CHECK((curl(s.e) + dt(s.h)).norm() < 1e-7);
  CHECK((curl(s.h) - dt(s.e)).norm() < 1e-7);
  CHECK((curl(s.a) - s.h(x, t)).norm() < 1e-7);
  CHECK((dt(s.a) + s.e(x, t)).norm() < 1e-7);
  CHECK((curl(s.c) - s.e(x, t)).norm() < 1e-7);
}

}  // namespace

TEST_CASE("exact solutions satisfy Maxwell's equations")
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const GeometryMap coax = coaxial_quarter();
  for (int i = 0; i < 10; ++i)
  {
    check_maxwell(cavity_mode(), {u(rng), u(rng), u(rng)}, u(rng));
    check_maxwell(tem_mode(), coax.map({u(rng), u(rng), u(rng)}), u(rng));
  }
  CHECK(std::abs(cavity_frequency() - std::numbers::sqrt2 * std::numbers::pi) < 1e-15);
  // PEC: tangential E of the cavity mode vanishes on x = 0.
  CHECK(cavity_mode().e({0.0, 0.3, 0.4}, 0.1).norm() < 1e-15);
}

TEST_CASE("zero state stays zero")
{
  const Discretization disc(2, 2, identity_cube());
  const HodgeOperators hodge(disc, HodgeScheme::PairingSolve, one, one);
  const Leapfrog lf(hodge, 0.01);
  const auto zero = [](const Eigen::Vector3d &) { return Eigen::Vector3d::Zero(); };
  FieldState s = init_state(hodge, zero, zero);
  CHECK(lf.energy(s) == 0.0);
  lf.run(s, 20);
  CHECK(s.d.norm() == 0.0);
  CHECK(s.b.norm() == 0.0);
  CHECK(s.step == 20);
  CHECK(std::abs(s.t - 0.2) < 1e-14);
  CHECK_THROWS_AS(Leapfrog(hodge, 0.0), Error);
}

TEST_CASE("initial energy of the cavity mode")
{
  const ExactSolution mode = cavity_mode();
  double prev = 1.0;
  for (int n : {2, 4, 8})
  {
    const Discretization disc(3, n, identity_cube());
    const HodgeOperators hodge(disc, HodgeScheme::PairingSolve, one, one);
    // b at t = 0 here, so that the energy is the t = 0 mode energy.
    const FieldState s = init_state(hodge, mode.e.at(0.0), mode.h.at(0.0));
    const Leapfrog lf(hodge, 1e-3);
    const double err = std::abs(lf.energy(s) - mode.energy);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("scheme 1 energy equals the mass-matrix energy")
{
  std::mt19937_64 rng(4);
  const Discretization disc(2, 3, coaxial_quarter());
  const HodgeOperators hodge(disc, HodgeScheme::MassSolve, one, one);
  FieldState s;
  s.d = oracle::random_vector(rng, static_cast<long>(disc.dim_d()));
  s.b = oracle::random_vector(rng, static_cast<long>(disc.dim_b()));
  update_derived(hodge, s);
  const Leapfrog lf(hodge, 0.01);
  const Eigen::SparseMatrix<double> m1 = assemble_mass(disc.primal_free[1], disc.grid);
  const Eigen::SparseMatrix<double> mt1 = assemble_mass(disc.dual[1], disc.grid);
  const double ref = 0.5 * (s.e.dot(m1 * s.e) + s.h.dot(mt1 * s.h));
  CHECK(std::abs(lf.energy(s) - ref) < 1e-11 * ref);
}

TEST_CASE("leapfrog is time reversible")
{
  const ExactSolution tem = tem_mode();
  const Discretization disc(2, 2, coaxial_quarter());
  for (HodgeScheme scheme : {HodgeScheme::PairingSolve, HodgeScheme::MassSolve})
  {
    const HodgeOperators hodge(disc, scheme, one, one);
    const Leapfrog lf(hodge, 0.01);
    FieldState s = init_state(hodge, tem.e.at(0.0), tem.h.at(0.005));
    const FieldState s0 = s;
    for (int i = 0; i < 50; ++i)
    {
      lf.step(s);
    }
    for (int i = 0; i < 50; ++i)
    {
      lf.step_back(s);
    }
    CHECK(oracle::rel_err(s.d, s0.d) < 1e-9);
    CHECK(oracle::rel_err(s.b, s0.b) < 1e-9);
    CHECK(s.step == 0);
  }
}

TEST_CASE("Gauss laws are preserved")
{
  const ExactSolution mode = cavity_mode();
  const Discretization disc(3, 3, identity_cube());
  const HodgeOperators hodge(disc, HodgeScheme::PairingSolve, one, one);
  const double dt = 0.5 * estimate_cfl(hodge).dt_max;
  const Leapfrog lf(hodge, dt);
  FieldState s = init_state_solenoidal(hodge, mode.c.at(0.0), mode.a.at(0.5 * dt));
  const GaussResidual r0 = lf.gauss_residual(s);
  CHECK(r0.b < 1e-12);
  CHECK(r0.d < 1e-12);
  lf.run(s, 1000);
  const GaussResidual r = lf.gauss_residual(s);
  CHECK(r.b <= r0.b + 1e-10);
  CHECK(r.d <= r0.d + 1e-10);

  // Plain L2 projections are not discretely solenoidal, but the residual does not grow.
  FieldState p = init_state(hodge, mode.e.at(0.0), mode.h.at(0.5 * dt));
  const GaussResidual p0 = lf.gauss_residual(p);
  lf.run(p, 200);
  CHECK(lf.gauss_residual(p).b <= p0.b + 1e-10);
  CHECK(lf.gauss_residual(p).d <= p0.d + 1e-10);
}

TEST_CASE("divergent sources are rejected")
{
  const Discretization disc(2, 2, identity_cube());
  const HodgeOperators hodge(disc, HodgeScheme::PairingSolve, one, one);
  const long nd = static_cast<long>(disc.dim_d());
  std::mt19937_64 rng(3);
  const Eigen::VectorXd noise = oracle::random_vector(rng, nd);
  SourceTerm bad{[noise](double) { return noise; }};
  CHECK_THROWS_AS(Leapfrog(hodge, 0.01, bad), Error);
  // The curl of anything is admissible.
  const Eigen::VectorXd c = oracle::random_vector(rng, static_cast<long>(disc.dim_h()));
  const Eigen::VectorXd j = disc.dual_curl.real * c;
  SourceTerm good{[j](double t) { return Eigen::VectorXd(std::sin(t) * j); }};
  const Leapfrog lf(hodge, 0.01, good, {0.0, 0.3});
  FieldState s = init_state(hodge, [](const Eigen::Vector3d &) { return Eigen::Vector3d::Zero(); },
                            [](const Eigen::Vector3d &) { return Eigen::Vector3d::Zero(); });
  lf.run(s, 10);
  CHECK(s.d.norm() > 0.0);
  CHECK(lf.gauss_residual(s).d < 1e-12);
}

TEST_CASE("CFL estimate and stability threshold")
{
  const Discretization disc(2, 2, identity_cube());
  for (HodgeScheme scheme : {HodgeScheme::PairingSolve, HodgeScheme::MassSolve})
  {
    const HodgeOperators hodge(disc, scheme, one, one);
    const CflEstimate lz = estimate_cfl(hodge, 42, 1e-10, 500, CflMethod::Lanczos);
    const CflEstimate pw = estimate_cfl(hodge, 42, 1e-8, 5000, CflMethod::PowerIteration);
    CHECK(lz.converged);
    CHECK(lz.dt_max > 0.0);
    // power iteration approaches the top eigenvalue from below
    CHECK(pw.lambda_max <= lz.lambda_max * (1 + 1e-9));
    CHECK(pw.lambda_max > 0.9 * lz.lambda_max);
    // the same seed reproduces the estimate
    CHECK(estimate_cfl(hodge, 42, 1e-10).lambda_max == lz.lambda_max);

    const ExactSolution mode = cavity_mode();
    {
      const Leapfrog lf(hodge, 0.99 * lz.dt_max);
      FieldState s = init_state(hodge, mode.e.at(0.0), mode.h.at(0.0));
      lf.run(s, 2000);
      CHECK(lf.energy(s) < 10.0);
    }
    {
      const Leapfrog lf(hodge, 1.05 * lz.dt_max);
      FieldState s = init_state(hodge, mode.e.at(0.0), mode.h.at(0.0));
      CHECK_THROWS_AS(lf.run(s, 2000), Error);
    }
  }
}
