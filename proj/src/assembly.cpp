// SPDX-License-Identifier: Apache-2.0

#include "maxkron/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/CholmodSupport>
#include <Eigen/UmfPackSupport>

#include "maxkron/banded.hpp"
#include "maxkron/error.hpp"

namespace maxkron
{

MaterialField MaterialField::constant(double value)
{
  require(value > 0.0 && std::isfinite(value), ErrorCode::InvalidMaterial,
          "material coefficient must be positive");
  MaterialField m;
  m.value_ = value;
  m.lower_bound_ = value;
  return m;
}

MaterialField MaterialField::callable(std::function<double(const Eigen::Vector3d &)> f, double lower_bound)
{
  require(lower_bound > 0.0, ErrorCode::InvalidMaterial, "material lower bound must be positive");
  MaterialField m;
  m.f_ = std::move(f);
  m.lower_bound_ = lower_bound;
  return m;
}

double MaterialField::operator()(const Eigen::Vector3d &x) const
{
  if (!f_)
  {
    return value_;
  }
  const double v = f_(x);
  if (!(v >= lower_bound_) || !std::isfinite(v))
  {
    fail(ErrorCode::InvalidMaterial, "material coefficient sample " + std::to_string(v) + " below its bound");
  }
  return v;
}

MaterialField MaterialField::reciprocal() const
{
  if (!f_)
  {
    return constant(1.0 / value_);
  }
  auto f = f_;
  // 1/gamma is bounded below by 1/sup gamma, which is unknown; positivity is what matters.
  return callable([f](const Eigen::Vector3d &x) { return 1.0 / f(x); },
                  std::numeric_limits<double>::min());
}

QuadratureGrid::QuadratureGrid(const std::array<KnotVector, 3> &knots, const GeometryMap &map,
                               int points_per_element)
  : map_(map)
{
  require(points_per_element >= 0, ErrorCode::InvalidArgument, "negative quadrature point count");
  for (int d = 0; d < 3; ++d)
  {
    rules_[d] = gauss_rule(knots[d], points_per_element > 0 ? points_per_element : knots[d].degree() + 1);
  }
  const auto s = shape();
  n_ = static_cast<std::size_t>(s[0]) * s[1] * s[2];
  weight_.resize(n_);
  for (int k = 0; k < s[2]; ++k)
  {
    for (int j = 0; j < s[1]; ++j)
    {
      for (int i = 0; i < s[0]; ++i)
      {
        weight_[i + s[0] * (j + static_cast<std::size_t>(s[1]) * k)] =
            rules_[0].weights[i] * rules_[1].weights[j] * rules_[2].weights[k];
      }
    }
  }
  if (identity_map())
  {
    return;
  }
  x_.resize(3 * n_);
  det_.resize(n_);
  jac_.resize(9 * n_);
  inv_t_.resize(9 * n_);
  for (std::size_t q = 0; q < n_; ++q)
  {
    const MetricSample m = map_.metric_at(parametric(q));
    Eigen::Map<Eigen::Vector3d>(x_.data() + 3 * q) = m.x;
    det_[q] = m.det;
    Eigen::Map<Eigen::Matrix3d>(jac_.data() + 9 * q) = m.jacobian;
    Eigen::Map<Eigen::Matrix3d>(inv_t_.data() + 9 * q) = m.inv_transpose;
  }
}

Eigen::Vector3d QuadratureGrid::parametric(std::size_t q) const
{
  const auto s = shape();
  const std::size_t i = q % s[0], j = (q / s[0]) % s[1], k = q / (static_cast<std::size_t>(s[0]) * s[1]);
  return {rules_[0].nodes[i], rules_[1].nodes[j], rules_[2].nodes[k]};
}

Eigen::Vector3d QuadratureGrid::x(std::size_t q) const
{
  if (identity_map())
  {
    return parametric(q);
  }
  return Eigen::Map<const Eigen::Vector3d>(x_.data() + 3 * q);
}

Eigen::Matrix3d QuadratureGrid::jacobian(std::size_t q) const
{
  if (identity_map())
  {
    return Eigen::Matrix3d::Identity();
  }
  return Eigen::Map<const Eigen::Matrix3d>(jac_.data() + 9 * q);
}

Eigen::Matrix3d QuadratureGrid::inv_transpose(std::size_t q) const
{
  if (identity_map())
  {
    return Eigen::Matrix3d::Identity();
  }
  return Eigen::Map<const Eigen::Matrix3d>(inv_t_.data() + 9 * q);
}

Collocation1D::Collocation1D(const UnivariateSplineSpace &space, const QuadratureRule &rule)
  : rows_(rule.size()), cols_(space.dim()), stride_(space.degree() + 1)
{
  begin_.resize(rows_);
  end_.resize(rows_);
  vals_.assign(static_cast<std::size_t>(rows_) * stride_, 0.0);
  for (int i = 0; i < rows_; ++i)
  {
    const BasisEvaluation b = eval_basis(space, rule.nodes[i]);
    if (b.count() == 0)
    {
      begin_[i] = end_[i] = 0;
      continue;
    }
    begin_[i] = b.index.front();
    end_[i] = b.index.back() + 1;
    for (int j = 0; j < b.count(); ++j)
    {
      vals_[static_cast<std::size_t>(i) * stride_ + (b.index[j] - begin_[i])] = b.value(0, j);
    }
  }
}

PointField sample_field(const QuadratureGrid &grid, int components, const ExactForm &f)
{
  PointField out{components, std::vector<double>(components * grid.size())};
  for (std::size_t q = 0; q < grid.size(); ++q)
  {
    const Eigen::Vector3d v = f(grid.x(q));
    for (int c = 0; c < components; ++c)
    {
      out.values[c * grid.size() + q] = v[c];
    }
  }
  return out;
}

FieldSampler::FieldSampler(const FormSpace &space, const QuadratureGrid &grid) : space_(space), grid_(&grid)
{
  for (const auto &comp : space.components)
  {
    colloc_.push_back({Collocation1D(comp.factors[0], grid.rule(0)), Collocation1D(comp.factors[1], grid.rule(1)),
                       Collocation1D(comp.factors[2], grid.rule(2))});
  }
}

PointField FieldSampler::evaluate_parametric(std::span<const double> coeffs) const
{
  require(coeffs.size() == space_.dim(), ErrorCode::InvalidArgument, "coefficient length mismatch");
  const auto q = grid_->shape();
  const std::size_t np = grid_->size();
  PointField out{space_.num_components(), std::vector<double>(space_.num_components() * np)};
  std::vector<double> t1, t2;
  for (int c = 0; c < space_.num_components(); ++c)
  {
    const auto n = space_.components[c].shape();
    const auto &col = colloc_[c];
    t1.resize(static_cast<std::size_t>(q[0]) * n[1] * n[2]);
    t2.resize(static_cast<std::size_t>(q[0]) * q[1] * n[2]);
    apply_mode(col[0], coeffs.subspan(space_.offset(c), space_.components[c].dim()), std::span<double>(t1), 1,
               static_cast<std::size_t>(n[1]) * n[2]);
    apply_mode(col[1], std::span<const double>(t1), std::span<double>(t2), q[0], n[2]);
    apply_mode(col[2], std::span<const double>(t2), std::span<double>(out.values).subspan(c * np, np),
               static_cast<std::size_t>(q[0]) * q[1], 1);
  }
  return out;
}

PointField FieldSampler::evaluate(std::span<const double> coeffs) const
{
  PointField f = evaluate_parametric(coeffs);
  if (grid_->identity_map())
  {
    return f;
  }
  const std::size_t np = grid_->size();
  const int k = space_.k;
  for (std::size_t q = 0; q < np; ++q)
  {
    if (k == 0)
    {
      continue;
    }
    if (k == 3)
    {
      f.values[q] /= grid_->det(q);
      continue;
    }
    const Eigen::Vector3d u(f.values[q], f.values[np + q], f.values[2 * np + q]);
    const Eigen::Vector3d v = k == 1 ? Eigen::Vector3d(grid_->inv_transpose(q) * u)
                                     : Eigen::Vector3d(grid_->jacobian(q) * u / grid_->det(q));
    for (int c = 0; c < 3; ++c)
    {
      f.values[c * np + q] = v[c];
    }
  }
  return f;
}

void FieldSampler::load(const PointField &field, std::span<double> out) const
{
  require(out.size() == space_.dim() && field.components == space_.num_components(), ErrorCode::InvalidArgument,
          "load: size mismatch");
  const std::size_t np = grid_->size();
  const int k = space_.k;
  // Weighted parametric integrand: g = w det (pullback of field) in the proxy sense.
  std::vector<double> g(field.values.size());
  for (std::size_t q = 0; q < np; ++q)
  {
    const double w = grid_->weight(q);
    if (grid_->identity_map())
    {
      for (int c = 0; c < field.components; ++c)
      {
        g[c * np + q] = w * field.values[c * np + q];
      }
      continue;
    }
    const double det = grid_->det(q);
    if (k == 0 || k == 3)
    {
      g[q] = w * field.values[q] * (k == 0 ? det : 1.0);
      continue;
    }
    const Eigen::Vector3d u(field.values[q], field.values[np + q], field.values[2 * np + q]);
    const Eigen::Vector3d v = k == 1 ? Eigen::Vector3d(det * grid_->inv_transpose(q).transpose() * u)
                                     : Eigen::Vector3d(grid_->jacobian(q).transpose() * u);
    for (int c = 0; c < 3; ++c)
    {
      g[c * np + q] = w * v[c];
    }
  }
  const auto q = grid_->shape();
  std::vector<double> t1, t2;
  for (int c = 0; c < space_.num_components(); ++c)
  {
    const auto n = space_.components[c].shape();
    const auto &col = colloc_[c];
    t2.resize(static_cast<std::size_t>(q[0]) * q[1] * n[2]);
    t1.resize(static_cast<std::size_t>(q[0]) * n[1] * n[2]);
    apply_mode_transpose(col[2], std::span<const double>(g).subspan(c * np, np), std::span<double>(t2),
                         static_cast<std::size_t>(q[0]) * q[1], 1);
    apply_mode_transpose(col[1], std::span<const double>(t2), std::span<double>(t1), q[0], n[2]);
    apply_mode_transpose(col[0], std::span<const double>(t1), out.subspan(space_.offset(c), space_.components[c].dim()),
                         1, static_cast<std::size_t>(n[1]) * n[2]);
  }
}

double FieldSampler::l2_error(std::span<const double> coeffs, const PointField &exact) const
{
  require(exact.components == space_.num_components() && exact.npoints() == grid_->size(),
          ErrorCode::InvalidArgument, "l2_error: sample shape mismatch");
  const PointField h = evaluate(coeffs);
  const std::size_t np = grid_->size();
  double s = 0.0;
  for (std::size_t q = 0; q < np; ++q)
  {
    double e2 = 0.0;
    for (int c = 0; c < h.components; ++c)
    {
      const double d = h.values[c * np + q] - exact.values[c * np + q];
      e2 += d * d;
    }
    s += grid_->weight(q) * grid_->det(q) * e2;
  }
  return std::sqrt(s);
}

double FieldSampler::l2_norm(const PointField &field) const
{
  const std::size_t np = grid_->size();
  double s = 0.0;
  for (std::size_t q = 0; q < np; ++q)
  {
    double e2 = 0.0;
    for (int c = 0; c < field.components; ++c)
    {
      e2 += field.values[c * np + q] * field.values[c * np + q];
    }
    s += grid_->weight(q) * grid_->det(q) * e2;
  }
  return std::sqrt(s);
}

namespace
{

// Basis values of one univariate space restricted to each element: functions
// [first, first + count) are active, vals[(e * nq + q) * stride + j].
struct ElementBasis
{
  int nq = 0, stride = 0;
  std::vector<int> first, count;
  std::vector<double> vals;
};

ElementBasis element_basis(const UnivariateSplineSpace &space, const QuadratureRule &rule)
{
  const Collocation1D col(space, rule);
  ElementBasis eb;
  eb.nq = rule.points_per_element;
  eb.stride = space.degree() + 1;
  const int ne = rule.num_elements();
  eb.first.resize(ne);
  eb.count.resize(ne);
  eb.vals.assign(static_cast<std::size_t>(ne) * eb.nq * eb.stride, 0.0);
  for (int e = 0; e < ne; ++e)
  {
    int lo = col.cols(), hi = 0;
    for (int q = 0; q < eb.nq; ++q)
    {
      const int r = e * eb.nq + q;
      if (col.row_end(r) > col.row_begin(r))
      {
        lo = std::min(lo, col.row_begin(r));
        hi = std::max(hi, col.row_end(r));
      }
    }
    eb.first[e] = lo;
    eb.count[e] = std::max(0, hi - lo);
    require(eb.count[e] <= eb.stride, ErrorCode::InvalidArgument, "unexpected number of active functions");
    for (int q = 0; q < eb.nq; ++q)
    {
      for (int j = 0; j < eb.count[e]; ++j)
      {
        eb.vals[(static_cast<std::size_t>(e) * eb.nq + q) * eb.stride + j] = col.value(e * eb.nq + q, lo + j);
      }
    }
  }
  return eb;
}

// For every function i of space a: range [lo, hi] of functions of b sharing an element.
void overlap_ranges(const ElementBasis &a, const ElementBasis &b, int dim_a, std::vector<int> &lo,
                    std::vector<int> &hi)
{
  lo.assign(dim_a, std::numeric_limits<int>::max());
  hi.assign(dim_a, -1);
  for (std::size_t e = 0; e < a.first.size(); ++e)
  {
    if (a.count[e] == 0 || b.count[e] == 0)
    {
      continue;
    }
    for (int i = a.first[e]; i < a.first[e] + a.count[e]; ++i)
    {
      lo[i] = std::min(lo[i], b.first[e]);
      hi[i] = std::max(hi[i], b.first[e] + b.count[e] - 1);
    }
  }
}

}  // namespace

Eigen::SparseMatrix<double> assemble_mass(const FormSpace &space, const QuadratureGrid &grid,
                                          const MaterialField &coeff)
{
  const int ncomp = space.num_components();
  const int k = space.k;
  const bool coupled = !(grid.identity_map() || ncomp == 1);

  std::vector<std::array<ElementBasis, 3>> eb(ncomp);
  for (int c = 0; c < ncomp; ++c)
  {
    for (int d = 0; d < 3; ++d)
    {
      eb[c][d] = element_basis(space.components[c].factors[d], grid.rule(d));
    }
  }

  // Sparsity pattern. Row (a, I) holds, for each coupled component b, the tensor box
  // of overlap ranges; columns inside a box are ordered J3, J2, J1, so the CSR position
  // of any entry follows from the box origin and extents without searching.
  struct Ranges
  {
    std::array<std::vector<int>, 3> lo, hi;
  };
  std::vector<std::vector<Ranges>> ranges(ncomp, std::vector<Ranges>(ncomp));
  for (int a = 0; a < ncomp; ++a)
  {
    for (int b = 0; b < ncomp; ++b)
    {
      if (!coupled && a != b)
      {
        continue;
      }
      for (int d = 0; d < 3; ++d)
      {
        overlap_ranges(eb[a][d], eb[b][d], space.components[a].factors[d].dim(), ranges[a][b].lo[d],
                       ranges[a][b].hi[d]);
      }
    }
  }
  const std::size_t n = space.dim();
  std::vector<long long> rowptr(n + 1, 0);
  std::vector<long long> box_start(n * ncomp, -1);
  for (int a = 0; a < ncomp; ++a)
  {
    const auto sh = space.components[a].shape();
    const std::size_t off = space.offset(a);
    for (int i3 = 0; i3 < sh[2]; ++i3)
    {
      for (int i2 = 0; i2 < sh[1]; ++i2)
      {
        for (int i1 = 0; i1 < sh[0]; ++i1)
        {
          const std::size_t r = off + i1 + sh[0] * (i2 + static_cast<std::size_t>(sh[1]) * i3);
          long long len = 0;
          for (int b = 0; b < ncomp; ++b)
          {
            if (!coupled && a != b)
            {
              continue;
            }
            const auto &rg = ranges[a][b];
            box_start[r * ncomp + b] = len;
            len += static_cast<long long>(rg.hi[0][i1] - rg.lo[0][i1] + 1) * (rg.hi[1][i2] - rg.lo[1][i2] + 1) *
                   (rg.hi[2][i3] - rg.lo[2][i3] + 1);
          }
          rowptr[r + 1] = len;
        }
      }
    }
  }
  for (std::size_t r = 0; r < n; ++r)
  {
    rowptr[r + 1] += rowptr[r];
  }
  const long long nnz = rowptr[n];
  require(nnz < std::numeric_limits<int>::max(), ErrorCode::Unsupported, "mass matrix too large");

  // The matrix is symmetric, so the CSR arrays are also its CSC arrays.
  Eigen::SparseMatrix<double> m(static_cast<long>(n), static_cast<long>(n));
  m.resizeNonZeros(nnz);
  int *outer = m.outerIndexPtr();
  int *inner = m.innerIndexPtr();
  double *vals = m.valuePtr();
  for (std::size_t r = 0; r <= n; ++r)
  {
    outer[r] = static_cast<int>(rowptr[r]);
  }
  std::fill(vals, vals + nnz, 0.0);
  for (int a = 0; a < ncomp; ++a)
  {
    const auto sh = space.components[a].shape();
    const std::size_t off = space.offset(a);
    for (int i3 = 0; i3 < sh[2]; ++i3)
    {
      for (int i2 = 0; i2 < sh[1]; ++i2)
      {
        for (int i1 = 0; i1 < sh[0]; ++i1)
        {
          const std::size_t r = off + i1 + sh[0] * (i2 + static_cast<std::size_t>(sh[1]) * i3);
          for (int b = 0; b < ncomp; ++b)
          {
            if (!coupled && a != b)
            {
              continue;
            }
            const auto &rg = ranges[a][b];
            const auto shb = space.components[b].shape();
            long long pos = rowptr[r] + box_start[r * ncomp + b];
            for (int j3 = rg.lo[2][i3]; j3 <= rg.hi[2][i3]; ++j3)
            {
              for (int j2 = rg.lo[1][i2]; j2 <= rg.hi[1][i2]; ++j2)
              {
                for (int j1 = rg.lo[0][i1]; j1 <= rg.hi[0][i1]; ++j1)
                {
                  inner[pos++] = static_cast<int>(space.offset(b) + j1 + shb[0] * (j2 + static_cast<std::size_t>(shb[1]) * j3));
                }
              }
            }
          }
        }
      }
    }
  }

  // Element loop with sum-factorized local matrices.
  const int ne[3] = {grid.rule(0).num_elements(), grid.rule(1).num_elements(), grid.rule(2).num_elements()};
  const int nq[3] = {grid.rule(0).points_per_element, grid.rule(1).points_per_element,
                     grid.rule(2).points_per_element};
  const auto gs = grid.shape();
  const int nqe = nq[0] * nq[1] * nq[2];
  std::vector<double> g(nqe), gamma(nqe);
  std::vector<Eigen::Matrix3d> metric(nqe);
  std::vector<double> t1, t2, loc;
  std::array<std::vector<double>, 3> ab;

  for (int e3 = 0; e3 < ne[2]; ++e3)
  {
    for (int e2 = 0; e2 < ne[1]; ++e2)
    {
      for (int e1 = 0; e1 < ne[0]; ++e1)
      {
        // Metric tensor and weights at the element's points.
        for (int q3 = 0; q3 < nq[2]; ++q3)
        {
          for (int q2 = 0; q2 < nq[1]; ++q2)
          {
            for (int q1 = 0; q1 < nq[0]; ++q1)
            {
              const int l = q1 + nq[0] * (q2 + nq[1] * q3);
              const std::size_t q = (e1 * nq[0] + q1) +
                                    gs[0] * ((e2 * nq[1] + q2) + static_cast<std::size_t>(gs[1]) * (e3 * nq[2] + q3));
              const double w = grid.weight(q);
              gamma[l] = coeff.is_constant() ? coeff(Eigen::Vector3d::Zero()) : coeff(grid.x(q));
              if (grid.identity_map())
              {
                metric[l] = w * gamma[l] * Eigen::Matrix3d::Identity();
                continue;
              }
              const double det = grid.det(q);
              switch (k)
              {
                case 0:
                  metric[l] = w * gamma[l] * det * Eigen::Matrix3d::Identity();
                  break;
                case 1:
                {
                  const Eigen::Matrix3d it = grid.inv_transpose(q);
                  metric[l] = w * gamma[l] * det * (it.transpose() * it);
                  break;
                }
                case 2:
                {
                  const Eigen::Matrix3d j = grid.jacobian(q);
                  metric[l] = w * gamma[l] / det * (j.transpose() * j);
                  break;
                }
                default:
                  metric[l] = w * gamma[l] / det * Eigen::Matrix3d::Identity();
                  break;
              }
            }
          }
        }

        const int e[3] = {e1, e2, e3};
        for (int a = 0; a < ncomp; ++a)
        {
          for (int b = 0; b < ncomp; ++b)
          {
            if (!coupled && a != b)
            {
              continue;
            }
            int na[3], nb[3], fa[3], fb[3];
            for (int d = 0; d < 3; ++d)
            {
              na[d] = eb[a][d].count[e[d]];
              nb[d] = eb[b][d].count[e[d]];
              fa[d] = eb[a][d].first[e[d]];
              fb[d] = eb[b][d].first[e[d]];
              // ab[d][(q * na + i) * nb + j] = A_d(q, i) B_d(q, j)
              ab[d].resize(static_cast<std::size_t>(nq[d]) * na[d] * nb[d]);
              for (int q = 0; q < nq[d]; ++q)
              {
                const double *va = eb[a][d].vals.data() + (static_cast<std::size_t>(e[d]) * nq[d] + q) * eb[a][d].stride;
                const double *vb = eb[b][d].vals.data() + (static_cast<std::size_t>(e[d]) * nq[d] + q) * eb[b][d].stride;
                for (int i = 0; i < na[d]; ++i)
                {
                  for (int j = 0; j < nb[d]; ++j)
                  {
                    ab[d][(static_cast<std::size_t>(q) * na[d] + i) * nb[d] + j] = va[i] * vb[j];
                  }
                }
              }
            }
            const int p1 = na[0] * nb[0], p2 = na[1] * nb[1], p3 = na[2] * nb[2];
            if (p1 == 0 || p2 == 0 || p3 == 0)
            {
              continue;
            }
            for (int l = 0; l < nqe; ++l)
            {
              g[l] = metric[l](a, b);
            }
            // t1[(q3 * nq2 + q2) * p1 + ij1]
            t1.assign(static_cast<std::size_t>(nq[2]) * nq[1] * p1, 0.0);
            for (int q23 = 0; q23 < nq[1] * nq[2]; ++q23)
            {
              double *dst = t1.data() + static_cast<std::size_t>(q23) * p1;
              for (int q1 = 0; q1 < nq[0]; ++q1)
              {
                const double gv = g[q1 + nq[0] * q23];
                const double *src = ab[0].data() + static_cast<std::size_t>(q1) * p1;
                for (int ij = 0; ij < p1; ++ij)
                {
                  dst[ij] += gv * src[ij];
                }
              }
            }
            // t2[(q3 * p2 + ij2) * p1 + ij1]
            t2.assign(static_cast<std::size_t>(nq[2]) * p2 * p1, 0.0);
            for (int q3 = 0; q3 < nq[2]; ++q3)
            {
              for (int q2 = 0; q2 < nq[1]; ++q2)
              {
                const double *src = t1.data() + (static_cast<std::size_t>(q3) * nq[1] + q2) * p1;
                for (int ij2 = 0; ij2 < p2; ++ij2)
                {
                  const double f = ab[1][static_cast<std::size_t>(q2) * p2 + ij2];
                  double *dst = t2.data() + (static_cast<std::size_t>(q3) * p2 + ij2) * p1;
                  for (int ij1 = 0; ij1 < p1; ++ij1)
                  {
                    dst[ij1] += f * src[ij1];
                  }
                }
              }
            }
            // loc[(ij3 * p2 + ij2) * p1 + ij1]
            loc.assign(static_cast<std::size_t>(p3) * p2 * p1, 0.0);
            for (int q3 = 0; q3 < nq[2]; ++q3)
            {
              const double *src = t2.data() + static_cast<std::size_t>(q3) * p2 * p1;
              for (int ij3 = 0; ij3 < p3; ++ij3)
              {
                const double f = ab[2][static_cast<std::size_t>(q3) * p3 + ij3];
                double *dst = loc.data() + static_cast<std::size_t>(ij3) * p2 * p1;
                for (int t = 0; t < p2 * p1; ++t)
                {
                  dst[t] += f * src[t];
                }
              }
            }

            // Scatter.
            const auto sha = space.components[a].shape();
            const std::size_t off_a = space.offset(a);
            const auto &rg = ranges[a][b];
            for (int i3 = 0; i3 < na[2]; ++i3)
            {
              const int I3 = fa[2] + i3;
              for (int i2 = 0; i2 < na[1]; ++i2)
              {
                const int I2 = fa[1] + i2;
                for (int i1 = 0; i1 < na[0]; ++i1)
                {
                  const int I1 = fa[0] + i1;
                  const std::size_t r = off_a + I1 + sha[0] * (I2 + static_cast<std::size_t>(sha[1]) * I3);
                  const long long base = rowptr[r] + box_start[r * ncomp + b];
                  const int w1 = rg.hi[0][I1] - rg.lo[0][I1] + 1;
                  const int w2 = rg.hi[1][I2] - rg.lo[1][I2] + 1;
                  for (int j3 = 0; j3 < nb[2]; ++j3)
                  {
                    const int J3 = fb[2] + j3 - rg.lo[2][I3];
                    for (int j2 = 0; j2 < nb[1]; ++j2)
                    {
                      const int J2 = fb[1] + j2 - rg.lo[1][I2];
                      double *dst = vals + base + (static_cast<long long>(J3) * w2 + J2) * w1 + (fb[0] - rg.lo[0][I1]);
                      const double *src = loc.data() +
                                          ((static_cast<std::size_t>(i3 * nb[2] + j3) * p2 + (i2 * nb[1] + j2)) * p1) +
                                          static_cast<std::size_t>(i1) * nb[0];
                      for (int j1 = 0; j1 < nb[0]; ++j1)
                      {
                        dst[j1] += src[j1];
                      }
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  return m;
}

struct CholeskySolver::Impl
{
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
};

CholeskySolver::CholeskySolver() = default;
CholeskySolver::~CholeskySolver() = default;
CholeskySolver::CholeskySolver(CholeskySolver &&) noexcept = default;
CholeskySolver &CholeskySolver::operator=(CholeskySolver &&) noexcept = default;

void CholeskySolver::factorize(const Eigen::SparseMatrix<double> &a)
{
  impl_ = std::make_unique<Impl>();
  impl_->llt.compute(a);
  if (impl_->llt.info() != Eigen::Success)
  {
    fail(ErrorCode::Factorization, "sparse Cholesky factorization failed");
  }
  n_ = static_cast<std::size_t>(a.rows());
}

void CholeskySolver::solve(std::span<const double> rhs, std::span<double> x) const
{
  require(impl_ != nullptr, ErrorCode::State, "Cholesky solve before factorize()");
  require(rhs.size() == n_ && x.size() == n_, ErrorCode::InvalidArgument, "Cholesky solve: length mismatch");
  Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<long>(n_)) =
      impl_->llt.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<long>(n_)));
}

struct SparseLuSolver::Impl
{
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
};

SparseLuSolver::SparseLuSolver() = default;
SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver &&) noexcept = default;
SparseLuSolver &SparseLuSolver::operator=(SparseLuSolver &&) noexcept = default;

void SparseLuSolver::factorize(const Eigen::SparseMatrix<double> &a)
{
  impl_ = std::make_unique<Impl>();
  impl_->lu.compute(a);
  if (impl_->lu.info() != Eigen::Success)
  {
    fail(ErrorCode::Factorization, "sparse LU factorization failed");
  }
  n_ = static_cast<std::size_t>(a.rows());
}

void SparseLuSolver::solve(std::span<const double> rhs, std::span<double> x) const
{
  require(impl_ != nullptr, ErrorCode::State, "LU solve before factorize()");
  require(rhs.size() == n_ && x.size() == n_, ErrorCode::InvalidArgument, "LU solve: length mismatch");
  Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<long>(n_)) =
      impl_->lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<long>(n_)));
}

L2Projector::L2Projector(const FormSpace &space, const QuadratureGrid &grid)
  : sampler_(space, grid), mass_(assemble_mass(space, grid))
{
  solver_.factorize(mass_);
}

Eigen::VectorXd L2Projector::project(const PointField &field) const
{
  const long n = static_cast<long>(sampler_.space().dim());
  Eigen::VectorXd f(n), c(n);
  sampler_.load(field, std::span<double>(f.data(), n));
  solver_.solve(std::span<const double>(f.data(), n), std::span<double>(c.data(), n));
  return c;
}

Eigen::VectorXd L2Projector::project(const ExactForm &f) const
{
  return project(sample_field(sampler_.grid(), sampler_.space().num_components(), f));
}

Eigen::VectorXd l2_project(const FormSpace &space, const ExactForm &f, const QuadratureGrid &grid)
{
  return L2Projector(space, grid).project(f);
}

double l2_error(const FormSpace &space, std::span<const double> coeffs, const ExactForm &f,
                const QuadratureGrid &grid)
{
  const FieldSampler s(space, grid);
  return s.l2_error(coeffs, sample_field(grid, space.num_components(), f));
}

Eigen::VectorXd boundary_lifting(const FormSpace &space, const ExactForm &trace, const GeometryMap &map)
{
  require(space.k == 1 && space.tag == ComplexTag::Primal, ErrorCode::Unsupported,
          "boundary lifting is defined for primal 1-forms only");
  const FormSpace full = space.free();
  const std::vector<int> boundary = space.boundary_indices();
  std::vector<int> local(full.dim(), -1);
  for (std::size_t i = 0; i < boundary.size(); ++i)
  {
    local[boundary[i]] = static_cast<int>(i);
  }
  const long nb = static_cast<long>(boundary.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  std::vector<Eigen::Triplet<double>> trip;

  for (int d = 0; d < 3; ++d)
  {
    const int e = (d + 1) % 3, f = (d + 2) % 3;
    // Face points: Gauss rules in the two in-face directions.
    for (int side = 0; side < 2; ++side)
    {
      for (int c : {e, f})
      {
        const TensorSpace &comp = full.components[c];
        if (!space.components[c].factors[d].trimmed)
        {
          continue;  // no boundary functions of this component on this face
        }
        const auto sh = comp.shape();
        const int end_index = side == 0 ? 0 : sh[d] - 1;
        const UnivariateSplineSpace &se = comp.factors[e];
        const UnivariateSplineSpace &sf = comp.factors[f];
        const QuadratureRule re = gauss_rule(se.knots, se.degree() + 1);
        const QuadratureRule rf = gauss_rule(sf.knots, sf.degree() + 1);
        const Collocation1D ce(se, re), cf(sf, rf);

        // Gram matrix on the face is the Kronecker product of the 1D Gram matrices.
        auto gram = [](const Collocation1D &col, const QuadratureRule &r)
        {
          Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(col.cols(), col.cols());
          for (int q = 0; q < col.rows(); ++q)
          {
            for (int i = col.row_begin(q); i < col.row_end(q); ++i)
            {
              for (int j = col.row_begin(q); j < col.row_end(q); ++j)
              {
                gm(i, j) += r.weights[q] * col.value(q, i) * col.value(q, j);
              }
            }
          }
          return gm;
        };
        const Eigen::MatrixXd ge = gram(ce, re), gf = gram(cf, rf);
        auto global = [&](int ie, int jf)
        {
          int idx[3];
          idx[d] = end_index;
          idx[e] = ie;
          idx[f] = jf;
          return static_cast<int>(full.offset(c)) + idx[0] + sh[0] * (idx[1] + sh[1] * idx[2]);
        };
        for (int i1 = 0; i1 < ge.rows(); ++i1)
        {
          for (int j1 = 0; j1 < gf.rows(); ++j1)
          {
            const int r = local[global(i1, j1)];
            for (int i2 = std::max(0, i1 - se.degree()); i2 < std::min<int>(ge.cols(), i1 + se.degree() + 1); ++i2)
            {
              for (int j2 = std::max(0, j1 - sf.degree()); j2 < std::min<int>(gf.cols(), j1 + sf.degree() + 1); ++j2)
              {
                const double v = ge(i1, i2) * gf(j1, j2);
                if (v != 0.0)
                {
                  trip.emplace_back(r, local[global(i2, j2)], v);
                }
              }
            }
          }
        }
        // Load: int phi_e phi_f (DF^T E)_c over the parametric face.
        for (int qf = 0; qf < rf.size(); ++qf)
        {
          for (int qe = 0; qe < re.size(); ++qe)
          {
            Eigen::Vector3d u;
            u[d] = side;
            u[e] = re.nodes[qe];
            u[f] = rf.nodes[qf];
            const MetricSample m = map.metric_at(u);
            const double g = (m.jacobian.transpose() * trace(m.x))[c];
            const double w = re.weights[qe] * rf.weights[qf] * g;
            if (w == 0.0)
            {
              continue;
            }
            for (int i = ce.row_begin(qe); i < ce.row_end(qe); ++i)
            {
              for (int j = cf.row_begin(qf); j < cf.row_end(qf); ++j)
              {
                rhs[local[global(i, j)]] += w * ce.value(qe, i) * cf.value(qf, j);
              }
            }
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(nb, nb);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd xb(nb);
  if (nb > 0)
  {
    CholeskySolver solver;
    solver.factorize(a);
    solver.solve(std::span<const double>(rhs.data(), nb), std::span<double>(xb.data(), nb));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(full.dim()));
  for (long i = 0; i < nb; ++i)
  {
    out[boundary[i]] = xb[i];
  }
  return out;
}

}  // namespace maxkron
