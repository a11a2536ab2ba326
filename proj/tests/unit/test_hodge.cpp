// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "maxkron/error.hpp"
#include "maxkron/hodge.hpp"
#include "maxkron/problems.hpp"
#include "oracles.hpp"

using namespace maxkron;

namespace
{

std::span<const double> cs(const Eigen::VectorXd &v)
{
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<double> ms(Eigen::VectorXd &v)
{
  return {v.data(), static_cast<std::size_t>(v.size())};
}

const MaterialField one = MaterialField::constant(1.0);

}  // namespace

TEST_CASE("discretization dimensions")
{
  const Discretization disc(3, 4, identity_cube());
  CHECK(disc.dim_d() == disc.e_interior.size());
  CHECK(disc.dim_h() == disc.b_interior.size());
  CHECK(disc.e_interior.size() + disc.e_boundary.size() == disc.dim_e());
  CHECK(disc.k1.rows() == disc.k1.cols());
  CHECK(disc.kt1.rows() == disc.kt1.cols());
  CHECK(disc.curl.rows() == static_cast<long>(disc.dim_b()));
  CHECK(disc.dual_curl.rows() == static_cast<long>(disc.dim_d()));
  CHECK((disc.div.real * disc.curl.real).norm() == 0.0);
}

TEST_CASE("pairings do not depend on the geometry")
{
  const Discretization a(3, 2, identity_cube());
  const Discretization b(3, 2, coaxial_quarter(Eigen::Vector3d(0.01, 0.0, 0.0)));
  for (auto m : {&Discretization::k1, &Discretization::kt1, &Discretization::k1_free, &Discretization::kt2_free,
                 &Discretization::k2_free})
  {
    const Eigen::SparseMatrix<double> x = (a.*m).materialize(), y = (b.*m).materialize();
    REQUIRE(x.nonZeros() == y.nonZeros());
    CHECK(std::equal(x.valuePtr(), x.valuePtr() + x.nonZeros(), y.valuePtr()));
    CHECK(std::equal(x.innerIndexPtr(), x.innerIndexPtr() + x.nonZeros(), y.innerIndexPtr()));
  }
}

TEST_CASE("defining residuals and dense agreement")
{
  std::mt19937_64 rng(7);
  for (int p : {2, 3, 4})
  {
    for (int n : {2, 4})
    {
      for (const GeometryMap &g : {identity_cube(), coaxial_quarter()})
      {
        if (n == 4 && g.kind() != GeometryKind::IdentityCube && p == 4)
        {
          continue;
        }
        CAPTURE(p);
        CAPTURE(n);
        const Discretization disc(p, n, g);
        const Eigen::VectorXd d = oracle::random_vector(rng, static_cast<long>(disc.dim_d()));
        const Eigen::VectorXd b = oracle::random_vector(rng, static_cast<long>(disc.dim_b()));
        Eigen::VectorXd e_kron, h_kron;
        for (HodgeScheme s : {HodgeScheme::PairingSolve, HodgeScheme::PairingDense, HodgeScheme::MassSolve})
        {
          const HodgeOperators hodge(disc, s, one, one);
          Eigen::VectorXd e(static_cast<long>(disc.dim_e())), h(static_cast<long>(disc.dim_h()));
          hodge.hodge_e(cs(d), 0.0, ms(e));
          hodge.hodge_h(cs(b), ms(h));
          CHECK(hodge.residual_e(cs(d), cs(e), 0.0) < 1e-10);
          CHECK(hodge.residual_h(cs(b), cs(h)) < 1e-10);
          for (int i : disc.e_boundary)
          {
            CHECK(e[i] == 0.0);
          }
          if (s == HodgeScheme::PairingSolve)
          {
            e_kron = e;
            h_kron = h;
          }
          else if (s == HodgeScheme::PairingDense)
          {
            CHECK(oracle::rel_err(e, e_kron) < 1e-10);
            CHECK(oracle::rel_err(h, h_kron) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("hodge maps are linear and vanish on zero data")
{
  std::mt19937_64 rng(9);
  const Discretization disc(2, 3, coaxial_quarter());
  for (HodgeScheme s : {HodgeScheme::PairingSolve, HodgeScheme::MassSolve})
  {
    const HodgeOperators hodge(disc, s, one, MaterialField::constant(2.0));
    const Eigen::VectorXd d1 = oracle::random_vector(rng, static_cast<long>(disc.dim_d()));
    const Eigen::VectorXd d2 = oracle::random_vector(rng, static_cast<long>(disc.dim_d()));
    Eigen::VectorXd e1(static_cast<long>(disc.dim_e())), e2 = e1, e12 = e1;
    hodge.hodge_e(cs(d1), 0.0, ms(e1));
    hodge.hodge_e(cs(d2), 0.0, ms(e2));
    const Eigen::VectorXd comb = 2.0 * d1 - 0.5 * d2;
    hodge.hodge_e(cs(comb), 0.0, ms(e12));
    CHECK(oracle::rel_err(e12, 2.0 * e1 - 0.5 * e2) < 1e-12);

    const Eigen::VectorXd zd = Eigen::VectorXd::Zero(static_cast<long>(disc.dim_d()));
    const Eigen::VectorXd zb = Eigen::VectorXd::Zero(static_cast<long>(disc.dim_b()));
    Eigen::VectorXd h(static_cast<long>(disc.dim_h()));
    hodge.hodge_e(cs(zd), 0.0, ms(e1));
    hodge.hodge_h(cs(zb), ms(h));
    CHECK(e1.norm() == 0.0);
    CHECK(h.norm() == 0.0);
    CHECK_FALSE(hodge.has_boundary_data());
  }
}

TEST_CASE("schemes agree on projected smooth data")
{
  // Both Hodge maps approximate the identity E = D; their difference shrinks under refinement.
  const ExactSolution mode = cavity_mode();
  const ExactForm ez = mode.e.at(0.0);
  double prev = 1.0;
  for (int n : {2, 4, 8})
  {
    const Discretization disc(2, n, identity_cube());
    const Eigen::VectorXd d = L2Projector(disc.dual[2], disc.grid).project(ez);
    Eigen::VectorXd e1(static_cast<long>(disc.dim_e())), e2 = e1;
    HodgeOperators(disc, HodgeScheme::MassSolve, one, one).hodge_e(cs(d), 0.0, ms(e1));
    HodgeOperators(disc, HodgeScheme::PairingSolve, one, one).hodge_e(cs(d), 0.0, ms(e2));
    const Eigen::VectorXd diff = e1 - e2;
    const QuadratureGrid fine(disc.primal.knots, disc.geometry, 5);
    const FieldSampler s(disc.primal_free[1], fine);
    const PointField zero = sample_field(fine, 3, [](const Eigen::Vector3d &) { return Eigen::Vector3d::Zero(); });
    const double err = s.l2_error(cs(diff), zero);
    CHECK(err < 0.6 * prev);
    prev = err;
  }
}

TEST_CASE("inhomogeneous boundary data")
{
  const ExactSolution tem = tem_mode();
  const Discretization disc(2, 2, coaxial_quarter());
  for (HodgeScheme s : {HodgeScheme::PairingSolve, HodgeScheme::MassSolve})
  {
    const HodgeOperators hodge(disc, s, one, one, tem.boundary);
    CHECK(hodge.has_boundary_data());
    const double t = 0.3;
    const Eigen::VectorXd lift = hodge.boundary_values(t);
    const Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<long>(disc.dim_d()));
    Eigen::VectorXd e(static_cast<long>(disc.dim_e()));
    hodge.hodge_e(cs(d), t, ms(e));
    for (int i : disc.e_boundary)
    {
      CHECK(e[i] == lift[i]);
    }
    CHECK(lift.norm() > 0.1);
    CHECK(hodge.residual_e(cs(d), cs(e), t) < 1e-10);
    hodge.hodge_e(cs(d), t, ms(e), true);
    CHECK(e.norm() == 0.0);

    // Lifted trace is linear in the time factors.
    const Eigen::VectorXd l0 = hodge.boundary_values(0.0), lh = hodge.boundary_values(0.5);
    CHECK(oracle::rel_err(lift, std::cos(0.3 * std::numbers::pi) * l0 + std::sin(0.3 * std::numbers::pi) * lh) <
          1e-13);
  }
}

TEST_CASE("scheme names")
{
  CHECK(hodge_scheme_from_string("kron") == HodgeScheme::PairingSolve);
  CHECK(to_string(HodgeScheme::MassSolve) == "mass");
  CHECK(to_string(hodge_scheme_from_string("dense")) == "dense");
  CHECK_THROWS_AS(hodge_scheme_from_string("cg"), Error);
}
