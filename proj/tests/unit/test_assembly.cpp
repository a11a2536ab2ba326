// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "maxkron/assembly.hpp"
#include "maxkron/error.hpp"
#include "oracles.hpp"

using namespace maxkron;

namespace
{

QuadratureGrid grid_for(const DeRhamComplex &c, const GeometryMap &g)
{
  return QuadratureGrid(c.knots, g);
}

Eigen::VectorXd random_coeffs(std::mt19937_64 &rng, std::size_t n)
{
  return oracle::random_vector(rng, static_cast<long>(n));
}

}  // namespace

TEST_CASE("single bubble mass")
{
  const DeRhamComplex c = build_complex({2, 2, 2}, {1, 1, 1}, ComplexTag::Primal);
  const QuadratureGrid grid = grid_for(c, identity_cube());
  const auto m = assemble_mass(c[0], grid);
  REQUIRE(m.rows() == 1);
  CHECK(std::abs(m.coeff(0, 0) - std::pow(2.0 / 15.0, 3)) < 1e-15);
  const auto m2 = assemble_mass(c[0], grid, MaterialField::constant(2.5));
  CHECK(std::abs(m2.coeff(0, 0) - 2.5 * std::pow(2.0 / 15.0, 3)) < 1e-15);
}

TEST_CASE("mass matrices match brute-force quadrature")
{
  for (int p : {2, 3})
  {
    for (auto tag : {ComplexTag::Primal, ComplexTag::Dual})
    {
      if (tag == ComplexTag::Dual && p == 2)
      {
        continue;
      }
      const DeRhamComplex cx = build_complex({p, p, p}, {2, 3, 2}, tag);
      for (const GeometryMap &g : {identity_cube(), coaxial_quarter(Eigen::Vector3d(0.01, 0.0, 0.0))})
      {
        const QuadratureGrid grid = grid_for(cx, g);
        for (int k = 0; k <= 3; ++k)
        {
          CAPTURE(p);
          CAPTURE(k);
          const Eigen::MatrixXd m(assemble_mass(cx[k], grid));
          // Same rule as the assembly, so the comparison is exact on the rational map too.
          std::array<std::vector<double>, 3> x, w;
          for (int d = 0; d < 3; ++d)
          {
            x[d] = grid.rule(d).nodes;
            w[d] = grid.rule(d).weights;
          }
          CHECK(oracle::rel_err(m, oracle::brute_mass(cx[k], g, x, w)) < 1e-13);
          if (g.kind() == GeometryKind::IdentityCube)
          {
            CHECK(oracle::rel_err(m, oracle::brute_mass(cx[k], g)) < 1e-13);
          }
          CHECK((m - m.transpose()).norm() < 1e-15 * m.norm());
          CHECK(m.llt().info() == Eigen::Success);
        }
      }
    }
  }
}

TEST_CASE("mapped mass converges to the exact integral")
{
  // Quadrature error on the coaxial map drops with refinement.
  const GeometryMap g = coaxial_quarter();
  double prev = 1.0;
  for (int n : {1, 2, 4})
  {
    const DeRhamComplex cx = build_complex({2, 2, 2}, {n, n, n}, ComplexTag::Primal);
    const QuadratureGrid grid = grid_for(cx, g);
    const Eigen::MatrixXd m(assemble_mass(cx[1], grid));
    const double e = oracle::rel_err(m, oracle::brute_mass(cx[1], g));
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("cube and NURBS cube agree")
{
  const DeRhamComplex cx = build_complex({3, 3, 3}, {2, 2, 2}, ComplexTag::Primal);
  const QuadratureGrid a = grid_for(cx, identity_cube());
  const QuadratureGrid b = grid_for(cx, nurbs_unit_cube());
  for (int k = 0; k <= 3; ++k)
  {
    const Eigen::MatrixXd ma(assemble_mass(cx[k], a));
    const Eigen::MatrixXd mb(assemble_mass(cx[k], b));
    CHECK(oracle::rel_err(ma, mb) < 1e-12);
  }
}

TEST_CASE("material coefficient")
{
  const DeRhamComplex cx = build_complex({2, 2, 2}, {2, 2, 2}, ComplexTag::Primal);
  const QuadratureGrid grid = grid_for(cx, identity_cube());
  const Eigen::MatrixXd m1(assemble_mass(cx[1], grid));
  const Eigen::MatrixXd m3(assemble_mass(cx[1], grid, MaterialField::constant(3.0)));
  CHECK(oracle::rel_err(m3, 3.0 * m1) < 1e-15);
  const auto var = MaterialField::callable([](const Eigen::Vector3d &x) { return 1.0 + x[0]; }, 0.5);
  const Eigen::MatrixXd mv(assemble_mass(cx[1], grid, var));
  CHECK((mv - m1).norm() > 0.1 * m1.norm());
  CHECK(mv.llt().info() == Eigen::Success);

  const auto bad = MaterialField::callable([](const Eigen::Vector3d &x) { return x[0] - 0.5; }, 0.1);
  try
  {
    assemble_mass(cx[1], grid, bad);
    CHECK(false);
  }
  catch (const Error &e)
  {
    CHECK(e.code() == ErrorCode::InvalidMaterial);
  }
  CHECK_THROWS_AS(MaterialField::constant(0.0), Error);
  CHECK(MaterialField::constant(4.0).reciprocal()(Eigen::Vector3d::Zero()) == 0.25);
}

TEST_CASE("load of a discrete field equals mass times coefficients")
{
  std::mt19937_64 rng(11);
  const DeRhamComplex cx = build_complex({3, 2, 3}, {2, 3, 2}, ComplexTag::Dual);
  const QuadratureGrid grid = grid_for(cx, coaxial_quarter());
  for (int k = 0; k <= 3; ++k)
  {
    const FieldSampler s(cx[k], grid);
    const Eigen::VectorXd c = random_coeffs(rng, cx[k].dim());
    const PointField f = s.evaluate(std::span<const double>(c.data(), c.size()));
    Eigen::VectorXd l(c.size());
    s.load(f, std::span<double>(l.data(), l.size()));
    const Eigen::VectorXd mc = assemble_mass(cx[k], grid) * c;
    CHECK(oracle::rel_err(l, mc) < 1e-12);
    // projection reproduces members
    const L2Projector proj(cx[k], grid);
    CHECK(oracle::rel_err(proj.project(f), c) < 1e-10);
    CHECK(s.l2_error(std::span<const double>(c.data(), c.size()), f) < 1e-14);
  }
}

TEST_CASE("evaluation matches pointwise basis evaluation")
{
  std::mt19937_64 rng(13);
  const DeRhamComplex cx = build_complex({2, 2, 2}, {2, 2, 2}, ComplexTag::Primal);
  const GeometryMap g = coaxial_quarter();
  const QuadratureGrid grid = grid_for(cx, g);
  const FieldSampler s(cx[1], grid);
  const Eigen::VectorXd c = random_coeffs(rng, cx[1].dim());
  const PointField f = s.evaluate(std::span<const double>(c.data(), c.size()));
  for (std::size_t q : {std::size_t{0}, std::size_t{17}, grid.size() / 2, grid.size() - 1})
  {
    const Eigen::Vector3d u = grid.parametric(q);
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int comp = 0; comp < 3; ++comp)
    {
      const auto vals = oracle::tensor_values(cx[1].components[comp], {{{u[0]}, {u[1]}, {u[2]}}});
      v[comp] = (vals * c.segment(static_cast<long>(cx[1].offset(comp)), vals.cols()))(0);
    }
    const Eigen::Vector3d phys = push_forward_kform(g.metric_at(u), 1, v);
    for (int comp = 0; comp < 3; ++comp)
    {
      CHECK(std::abs(f(comp, q) - phys[comp]) < 1e-12);
    }
    CHECK((grid.x(q) - g.map(u)).norm() < 1e-15);
  }
}

TEST_CASE("cavity field norm and projection error")
{
  const double pi = std::numbers::pi;
  const ExactForm ez = [pi](const Eigen::Vector3d &x)
  { return Eigen::Vector3d(0.0, 0.0, std::sin(pi * x[0]) * std::sin(pi * x[1])); };
  double prev = 1.0;
  for (int n : {4, 8})
  {
    const DeRhamComplex cx = build_complex({3, 3, 3}, {n, n, n}, ComplexTag::Primal);
    const QuadratureGrid grid = grid_for(cx, identity_cube());
    const QuadratureGrid fine(cx.knots, identity_cube(), 6);
    const FieldSampler s(cx[1], fine);
    const PointField f = sample_field(fine, 3, ez);
    if (n == 8)
    {
      CHECK(std::abs(s.l2_norm(f) - 0.5) < 1e-9);
    }
    const Eigen::VectorXd c = l2_project(cx[1], ez, grid);
    const double e = l2_error(cx[1], std::span<const double>(c.data(), c.size()), ez, fine);
    if (n > 4)
    {
      CHECK(std::log2(prev / e) > 3.8);  // fourth order at p = 3
    }
    prev = e;
  }
}

TEST_CASE("sparse solvers")
{
  const DeRhamComplex cx = build_complex({2, 2, 2}, {3, 3, 3}, ComplexTag::Primal);
  const QuadratureGrid grid = grid_for(cx, identity_cube());
  const Eigen::SparseMatrix<double> m = assemble_mass(cx[1], grid);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd b = random_coeffs(rng, m.rows());
  Eigen::VectorXd x(b.size()), y(b.size());
  CholeskySolver chol;
  CHECK_THROWS_AS(chol.solve(std::span<const double>(b.data(), b.size()), std::span<double>(x.data(), x.size())),
                  Error);
  chol.factorize(m);
  chol.solve(std::span<const double>(b.data(), b.size()), std::span<double>(x.data(), x.size()));
  CHECK((m * x - b).norm() < 1e-12 * b.norm() * std::max(1.0, x.norm()));
  SparseLuSolver lu;
  lu.factorize(m);
  lu.solve(std::span<const double>(b.data(), b.size()), std::span<double>(y.data(), y.size()));
  CHECK(oracle::rel_err(x, y) < 1e-10);

  Eigen::SparseMatrix<double> neg = -m;
  CHECK_THROWS_AS(chol.factorize(neg), Error);
}

TEST_CASE("boundary lifting reproduces traces of discrete fields")
{
  std::mt19937_64 rng(17);
  for (const GeometryMap &g : {identity_cube(), nurbs_unit_cube()})
  {
    const DeRhamComplex cx = build_complex({2, 2, 2}, {2, 3, 2}, ComplexTag::Primal);
    const FormSpace full = cx[1].free();
    const QuadratureGrid grid = grid_for(cx, g);
    // A member of the free space, evaluated exactly as a physical field.
    const Eigen::VectorXd c = random_coeffs(rng, full.dim());
    const ExactForm e = [&](const Eigen::Vector3d &x)
    {
      Eigen::Vector3d v;
      for (int comp = 0; comp < 3; ++comp)
      {
        const auto vals = oracle::tensor_values(full.components[comp], {{{x[0]}, {x[1]}, {x[2]}}});
        v[comp] = (vals * c.segment(static_cast<long>(full.offset(comp)), vals.cols()))(0);
      }
      return v;
    };
    const Eigen::VectorXd lift = boundary_lifting(cx[1], e, g);
    REQUIRE(lift.size() == static_cast<long>(full.dim()));
    for (int i : cx[1].boundary_indices())
    {
      CHECK(std::abs(lift[i] - c[i]) < 1e-11);
    }
    for (int i : cx[1].interior_indices())
    {
      CHECK(lift[i] == 0.0);
    }
  }
}
