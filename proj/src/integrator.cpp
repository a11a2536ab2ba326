// SPDX-License-Identifier: Apache-2.0

#include "maxkron/integrator.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "maxkron/error.hpp"

namespace maxkron
{

namespace
{

std::span<const double> cspan(const Eigen::VectorXd &v)
{
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<double> mspan(Eigen::VectorXd &v)
{
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd apply(const IncidenceMatrix &m, const Eigen::VectorXd &x)
{
  return m.real * x;
}

}  // namespace

Leapfrog::Leapfrog(const HodgeOperators &hodge, double dt, std::optional<SourceTerm> source,
                   std::vector<double> source_check_times)
  : hodge_(&hodge), dt_(dt), source_(std::move(source))
{
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "time step must be positive");
  if (source_)
  {
    const auto &disc = hodge.discretization();
    for (double t : source_check_times)
    {
      const Eigen::VectorXd j = source_->current(t);
      require(static_cast<std::size_t>(j.size()) == disc.dim_d(), ErrorCode::InvalidArgument,
              "source has the wrong length");
      const double r = apply(disc.dual_div, j).lpNorm<Eigen::Infinity>();
      require(r <= 1e-12 * std::max(1.0, j.lpNorm<Eigen::Infinity>()), ErrorCode::InvalidArgument,
              "source current is not discretely divergence free");
    }
  }
}

void Leapfrog::step(FieldState &s) const
{
  const auto &disc = hodge_->discretization();
  s.d += dt_ * apply(disc.dual_curl, s.h);
  if (source_)
  {
    s.d -= dt_ * source_->current(s.t + 0.5 * dt_);
  }
  s.t += dt_;
  ++s.step;
  hodge_->hodge_e(cspan(s.d), s.t, mspan(s.e));
  s.b -= dt_ * apply(disc.curl, s.e);
  hodge_->hodge_h(cspan(s.b), mspan(s.h));
}

void Leapfrog::step_back(FieldState &s) const
{
  const auto &disc = hodge_->discretization();
  s.b += dt_ * apply(disc.curl, s.e);
  hodge_->hodge_h(cspan(s.b), mspan(s.h));
  s.d -= dt_ * apply(disc.dual_curl, s.h);
  if (source_)
  {
    s.d += dt_ * source_->current(s.t - 0.5 * dt_);
  }
  s.t -= dt_;
  --s.step;
  hodge_->hodge_e(cspan(s.d), s.t, mspan(s.e));
}

double Leapfrog::energy(const FieldState &s) const
{
  const auto &disc = hodge_->discretization();
  Eigen::VectorXd kd(static_cast<long>(disc.dim_e())), kb(static_cast<long>(disc.dim_h()));
  disc.kt2_free.apply(cspan(s.d), mspan(kd));
  disc.k2_free.apply(cspan(s.b), mspan(kb));
  return 0.5 * (s.e.dot(kd) + s.h.dot(kb));
}

GaussResidual Leapfrog::gauss_residual(const FieldState &s) const
{
  const auto &disc = hodge_->discretization();
  return {apply(disc.div, s.b).lpNorm<Eigen::Infinity>(), apply(disc.dual_div, s.d).lpNorm<Eigen::Infinity>()};
}

void Leapfrog::run(FieldState &s, long steps, const StepCallback &callback, double blowup_factor) const
{
  using clock = std::chrono::steady_clock;
  const double e0 = energy(s);
  if (callback)
  {
    callback(s, {s.t, e0, gauss_residual(s), 0.0});
  }
  for (long n = 0; n < steps; ++n)
  {
    const auto start = clock::now();
    step(s);
    const double wall = std::chrono::duration<double>(clock::now() - start).count();
    const double en = energy(s);
    if (!std::isfinite(en) || (e0 > 0.0 && en > blowup_factor * e0))
    {
      fail(ErrorCode::UnstableIntegration,
           "instability detected at step " + std::to_string(s.step) + " (t = " + std::to_string(s.t) +
               ", energy = " + std::to_string(en) + ")");
    }
    if (callback)
    {
      callback(s, {s.t, en, gauss_residual(s), wall});
    }
  }
}

void update_derived(const HodgeOperators &hodge, FieldState &s)
{
  const auto &disc = hodge.discretization();
  s.e.resize(static_cast<long>(disc.dim_e()));
  s.h.resize(static_cast<long>(disc.dim_h()));
  hodge.hodge_e(cspan(s.d), s.t, mspan(s.e));
  hodge.hodge_h(cspan(s.b), mspan(s.h));
}

FieldState init_state(const HodgeOperators &hodge, const ExactForm &d0, const ExactForm &b_half, double t0)
{
  const auto &disc = hodge.discretization();
  FieldState s;
  s.t = t0;
  s.d = L2Projector(disc.dual[2], disc.grid).project(d0);
  s.b = L2Projector(disc.primal_free[2], disc.grid).project(b_half);
  update_derived(hodge, s);
  return s;
}

FieldState init_state_solenoidal(const HodgeOperators &hodge, const ExactForm &c0, const ExactForm &a_half,
                                 double t0)
{
  const auto &disc = hodge.discretization();
  FieldState s;
  s.t = t0;
  s.d = apply(disc.dual_curl, L2Projector(disc.dual[1], disc.grid).project(c0));
  s.b = apply(disc.curl, L2Projector(disc.primal_free[1], disc.grid).project(a_half));
  update_derived(hodge, s);
  return s;
}

namespace
{

// x -> (-L x, W x) with W x = K~2^T hodge_E(x), the energy Gram applied to x.
struct CflOperator
{
  const HodgeOperators &hodge;
  const Discretization &disc;
  mutable Eigen::VectorXd e, b, h;

  explicit CflOperator(const HodgeOperators &hg)
    : hodge(hg),
      disc(hg.discretization()),
      e(static_cast<long>(disc.dim_e())),
      b(static_cast<long>(disc.dim_b())),
      h(static_cast<long>(disc.dim_h()))
  {
  }

  void gram(const Eigen::VectorXd &x, Eigen::VectorXd &wx) const
  {
    hodge.hodge_e(cspan(x), 0.0, mspan(e), true);
    wx.resize(static_cast<long>(disc.dim_d()));
    disc.kt2_free.apply_transpose(cspan(e), mspan(wx));
  }

  // Uses the e left behind by the last gram() call.
  void apply_last(Eigen::VectorXd &y) const
  {
    b = disc.curl.real * e;
    hodge.hodge_h(cspan(b), mspan(h));
    y = disc.dual_curl.real * h;
  }
};

}  // namespace

CflEstimate estimate_cfl(const HodgeOperators &hodge, std::uint64_t seed, double tol, int max_iterations,
                         CflMethod method)
{
  require(tol > 0.0 && max_iterations > 0, ErrorCode::InvalidArgument, "invalid CFL iteration parameters");
  const auto &disc = hodge.discretization();
  const long n = static_cast<long>(disc.dim_d());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i)
  {
    x[i] = dist(rng);
  }
  const CflOperator op(hodge);
  CflEstimate est;
  Eigen::VectorXd wx, y;

  if (method == CflMethod::PowerIteration)
  {
    double lambda = 0.0;
    op.gram(x, wx);
    x /= std::sqrt(x.dot(wx));
    for (int it = 1; it <= max_iterations; ++it)
    {
      op.gram(x, wx);
      op.apply_last(y);
      const double rq = wx.dot(y);  // <x, Ax> with <x, x> = 1
      est.iterations = it;
      const bool done = it > 1 && std::abs(rq - lambda) <= tol * std::abs(rq);
      lambda = rq;
      if (done)
      {
        est.converged = true;
        break;
      }
      op.gram(y, wx);
      x = y / std::sqrt(y.dot(wx));
    }
    est.lambda_max = lambda;
  }
  else
  {
    // Lanczos in the W inner product with full reorthogonalization.
    std::vector<Eigen::VectorXd> v, wv;
    std::vector<double> alpha, beta;
    op.gram(x, wx);
    double nrm = std::sqrt(x.dot(wx));
    v.push_back(x / nrm);
    wv.push_back(wx / nrm);
    // op caches hodge_E of the unnormalized vector; A is linear, so rescale its image.
    double e_scale = 1.0 / nrm;
    double theta_prev = 0.0;
    for (int it = 1; it <= max_iterations; ++it)
    {
      op.apply_last(y);
      y *= e_scale;
      const double a = wv.back().dot(y);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass)
      {
        for (std::size_t i = 0; i < v.size(); ++i)
        {
          y -= wv[i].dot(y) * v[i];
        }
      }
      op.gram(y, wx);
      const double bnorm = std::sqrt(std::max(0.0, y.dot(wx)));
      est.iterations = it;

      const int k = static_cast<int>(alpha.size());
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i)
      {
        t(i, i) = alpha[i];
        if (i + 1 < k)
        {
          t(i, i + 1) = t(i + 1, i) = beta[i];
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      const double theta = es.eigenvalues()(k - 1);
      const double resid = bnorm * std::abs(es.eigenvectors()(k - 1, k - 1));
      est.lambda_max = theta;
      if (resid <= tol * std::abs(theta) || (it > 1 && std::abs(theta - theta_prev) <= 1e-3 * tol * theta) ||
          bnorm <= 1e-14 * std::abs(theta))
      {
        est.converged = true;
        break;
      }
      theta_prev = theta;
      beta.push_back(bnorm);
      v.push_back(y / bnorm);
      wv.push_back(wx / bnorm);
      e_scale = 1.0 / bnorm;
    }
  }
  require(est.lambda_max > 0.0, ErrorCode::State, "CFL estimate found no positive eigenvalue");
  est.dt_max = 2.0 / std::sqrt(est.lambda_max);
  return est;
}

}  // namespace maxkron
