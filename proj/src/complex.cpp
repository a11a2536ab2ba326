// SPDX-License-Identifier: Apache-2.0

#include "maxkron/complex.hpp"

#include <string>

#include "maxkron/error.hpp"
#include "maxkron/kronecker.hpp"

namespace maxkron
{

std::size_t FormSpace::dim() const
{
  std::size_t n = 0;
  for (const auto &c : components)
  {
    n += c.dim();
  }
  return n;
}

std::size_t FormSpace::offset(int component) const
{
  std::size_t n = 0;
  for (int c = 0; c < component; ++c)
  {
    n += components[c].dim();
  }
  return n;
}

FormSpace FormSpace::free() const
{
  FormSpace out = *this;
  out.bc = BoundaryCondition::Free;
  for (auto &c : out.components)
  {
    c = c.untrimmed();
  }
  return out;
}

std::vector<int> FormSpace::interior_indices() const
{
  std::vector<int> out;
  int base = 0;
  for (const auto &comp : components)
  {
    const TensorSpace full = comp.untrimmed();
    const auto shape = full.shape();
    auto keep = [&](int d, int i)
    {
      return !comp.factors[d].trimmed || (i > 0 && i < shape[d] - 1);
    };
    for (int i3 = 0; i3 < shape[2]; ++i3)
    {
      for (int i2 = 0; i2 < shape[1]; ++i2)
      {
        for (int i1 = 0; i1 < shape[0]; ++i1)
        {
          if (keep(0, i1) && keep(1, i2) && keep(2, i3))
          {
            out.push_back(base + i1 + shape[0] * (i2 + shape[1] * i3));
          }
        }
      }
    }
    base += static_cast<int>(full.dim());
  }
  return out;
}

std::vector<int> FormSpace::boundary_indices() const
{
  const auto interior = interior_indices();
  const int n = static_cast<int>(free().dim());
  std::vector<int> out;
  out.reserve(n - interior.size());
  std::size_t pos = 0;
  for (int i = 0; i < n; ++i)
  {
    if (pos < interior.size() && interior[pos] == i)
    {
      ++pos;
    }
    else
    {
      out.push_back(i);
    }
  }
  return out;
}

namespace
{

// Whether direction d of component c of a k-form uses the derivative (W) space.
bool uses_w(int k, int c, int d)
{
  switch (k)
  {
    case 0:
      return false;
    case 1:
      return d == c;
    case 2:
      return d != c;
    default:
      return true;
  }
}

FormSpace make_form_space(int k, ComplexTag tag, BoundaryCondition bc,
                          const std::array<UnivariateSplineSpace, 3> &v,
                          const std::array<UnivariateSplineSpace, 3> &w)
{
  FormSpace s{k, tag, bc, {}};
  const int ncomp = (k == 0 || k == 3) ? 1 : 3;
  for (int c = 0; c < ncomp; ++c)
  {
    s.components.push_back(TensorSpace{{uses_w(k, c, 0) ? w[0] : v[0], uses_w(k, c, 1) ? w[1] : v[1],
                                        uses_w(k, c, 2) ? w[2] : v[2]}});
  }
  return s;
}

}  // namespace

DeRhamComplex build_complex(const std::array<KnotVector, 3> &knots, ComplexTag tag)
{
  std::array<int, 3> degree{};
  for (int d = 0; d < 3; ++d)
  {
    degree[d] = knots[d].degree();
    require(degree[d] >= 2, ErrorCode::UnsupportedDegree,
            "complex needs degree >= 2 in every direction, got " + std::to_string(degree[d]));
    require(knots[d].max_interior_multiplicity() <= degree[d] - 1, ErrorCode::InvalidArgument,
            "interior knot multiplicity must not exceed p - 1");
  }
  const bool primal = tag == ComplexTag::Primal;
  std::vector<UnivariateSplineSpace> vs, ws, vs_trim;
  for (int d = 0; d < 3; ++d)
  {
    const KnotVector k1 = derived_knot_vector(knots[d]);
    const KnotVector k2 = derived_knot_vector(k1);
    if (primal)
    {
      vs.push_back({knots[d], BasisFlavor::BSpline, false});
      vs_trim.push_back({knots[d], BasisFlavor::BSpline, true});
      ws.push_back({k1, BasisFlavor::CurrySchoenberg, false});
    }
    else
    {
      vs.push_back({k1, BasisFlavor::BSpline, false});
      vs_trim.push_back(vs.back());
      ws.push_back({k2, BasisFlavor::CurrySchoenberg, false});
    }
  }
  const std::array<UnivariateSplineSpace, 3> v{vs_trim[0], vs_trim[1], vs_trim[2]};
  const std::array<UnivariateSplineSpace, 3> w{ws[0], ws[1], ws[2]};

  DeRhamComplex c{tag, degree, knots,
                  {make_form_space(0, tag, BoundaryCondition::Free, v, w),
                   make_form_space(1, tag, BoundaryCondition::Free, v, w),
                   make_form_space(2, tag, BoundaryCondition::Free, v, w),
                   make_form_space(3, tag, BoundaryCondition::Free, v, w)}};
  if (primal)
  {
    for (int k = 0; k < 3; ++k)
    {
      c.spaces[k].bc = BoundaryCondition::Homogeneous;
    }
  }
  return c;
}

DeRhamComplex build_complex(std::array<int, 3> degree, std::array<int, 3> n_elements, ComplexTag tag)
{
  for (int d = 0; d < 3; ++d)
  {
    require(degree[d] >= 2, ErrorCode::UnsupportedDegree,
            "complex needs degree >= 2 in every direction, got " + std::to_string(degree[d]));
  }
  return build_complex({make_open_knot_vector(degree[0], n_elements[0]),
                        make_open_knot_vector(degree[1], n_elements[1]),
                        make_open_knot_vector(degree[2], n_elements[2])},
                       tag);
}

DeRhamComplex free_complex(const DeRhamComplex &c)
{
  DeRhamComplex out = c;
  for (auto &s : out.spaces)
  {
    s = s.free();
  }
  return out;
}

void IncidenceMatrix::apply(std::span<const double> x, std::span<double> y) const
{
  require(static_cast<long>(x.size()) == cols() && static_cast<long>(y.size()) == rows(),
          ErrorCode::InvalidArgument, "incidence apply: length mismatch");
  Eigen::Map<Eigen::VectorXd>(y.data(), rows()) =
      real * Eigen::Map<const Eigen::VectorXd>(x.data(), cols());
}

void IncidenceMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const
{
  require(static_cast<long>(x.size()) == rows() && static_cast<long>(y.size()) == cols(),
          ErrorCode::InvalidArgument, "incidence transpose apply: length mismatch");
  Eigen::Map<Eigen::VectorXd>(y.data(), cols()) =
      real.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), rows());
}

Eigen::SparseMatrix<int, Eigen::RowMajor> univariate_difference(const UnivariateSplineSpace &v)
{
  const int m = v.full_dim();
  std::vector<Eigen::Triplet<int>> trip;
  for (int i = 0; i < m - 1; ++i)
  {
    for (auto [j, val] : {std::pair{i, -1}, std::pair{i + 1, 1}})
    {
      const int col = j - v.offset();
      if (col >= 0 && col < v.dim())
      {
        trip.emplace_back(i, col, val);
      }
    }
  }
  Eigen::SparseMatrix<int, Eigen::RowMajor> out(m - 1, v.dim());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

namespace
{

using IntMat = Eigen::SparseMatrix<int, Eigen::RowMajor>;

IntMat identity(int n)
{
  IntMat out(n, n);
  out.setIdentity();
  return out;
}

// Block of d acting on one source component: difference in direction dd, identity elsewhere.
IntMat directional_block(const TensorSpace &from, int dd)
{
  std::array<IntMat, 3> f;
  for (int d = 0; d < 3; ++d)
  {
    f[d] = d == dd ? univariate_difference(from.factors[d]) : identity(from.factors[d].dim());
  }
  return kron(f[2], kron(f[1], f[0]));
}

}  // namespace

IncidenceMatrix incidence_matrix(const FormSpace &from, const FormSpace &to)
{
  require(from.tag == to.tag && to.k == from.k + 1 && from.k >= 0 && from.k <= 2,
          ErrorCode::InvalidArgument, "incidence matrix needs consecutive spaces of one complex");

  // (target component, source component, direction, sign)
  struct Term
  {
    int to, from, dir, sign;
  };
  std::vector<Term> terms;
  switch (from.k)
  {
    case 0:
      terms = {{0, 0, 0, 1}, {1, 0, 1, 1}, {2, 0, 2, 1}};
      break;
    case 1:
      for (int c = 0; c < 3; ++c)
      {
        const int a = (c + 1) % 3, b = (c + 2) % 3;
        terms.push_back({c, b, a, 1});
        terms.push_back({c, a, b, -1});
      }
      break;
    default:
      terms = {{0, 0, 0, 1}, {0, 1, 1, 1}, {0, 2, 2, 1}};
      break;
  }

  std::vector<Eigen::Triplet<int>> trip;
  for (const auto &t : terms)
  {
    const IntMat block = directional_block(from.components[t.from], t.dir);
    require(static_cast<std::size_t>(block.rows()) == to.components[t.to].dim(),
            ErrorCode::IncompatibleComplex, "incidence block does not match target component");
    const int r0 = static_cast<int>(to.offset(t.to)), c0 = static_cast<int>(from.offset(t.from));
    for (int i = 0; i < block.outerSize(); ++i)
    {
      for (IntMat::InnerIterator it(block, i); it; ++it)
      {
        trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                          t.sign * it.value());
      }
    }
  }
  IncidenceMatrix out;
  out.integer.resize(static_cast<long>(to.dim()), static_cast<long>(from.dim()));
  out.integer.setFromTriplets(trip.begin(), trip.end());
  out.real = out.integer.cast<double>();
  return out;
}

IncidenceMatrix incidence_matrix(const DeRhamComplex &c, int k)
{
  require(k >= 0 && k <= 2, ErrorCode::InvalidArgument, "incidence degree must be 0, 1 or 2");
  return incidence_matrix(c.spaces[k], c.spaces[k + 1]);
}

void check_partition(std::span<const int> interior, std::span<const int> boundary, std::size_t n)
{
  std::vector<char> seen(n, 0);
  for (auto part : {interior, boundary})
  {
    for (int i : part)
    {
      require(i >= 0 && static_cast<std::size_t>(i) < n && !seen[i], ErrorCode::InvalidArgument,
              "index sets do not form a partition");
      seen[i] = 1;
    }
  }
  require(interior.size() + boundary.size() == n, ErrorCode::InvalidArgument,
          "index sets do not cover all indices");
}

Eigen::SparseMatrix<double> select_columns(const Eigen::SparseMatrix<double> &a, std::span<const int> cols)
{
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
  {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, cols[j]); it; ++it)
    {
      trip.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  Eigen::SparseMatrix<double> out(a.rows(), static_cast<long>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::SparseMatrix<double> select_rows(const Eigen::SparseMatrix<double> &a, std::span<const int> rows)
{
  Eigen::SparseMatrix<double> t = a.transpose();
  return Eigen::SparseMatrix<double>(select_columns(t, rows).transpose());
}

BlockSplit trimmed_block_split(const Eigen::SparseMatrix<double> &op, const FormSpace &space)
{
  const auto interior = space.interior_indices();
  const auto boundary = space.boundary_indices();
  const std::size_t n = space.free().dim();
  check_partition(interior, boundary, n);
  require(static_cast<std::size_t>(op.cols()) == n, ErrorCode::InvalidArgument,
          "operator columns do not match the untrimmed space");
  return {select_columns(op, interior), select_columns(op, boundary)};
}

}  // namespace maxkron
