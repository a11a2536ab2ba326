// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_INTEGRATOR_HPP
#define MAXKRON_INTEGRATOR_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "maxkron/hodge.hpp"
#include "maxkron/problems.hpp"

namespace maxkron
{

//
// Leapfrog state: d, e at time t; b, h at t + dt / 2.
//
struct FieldState
{
  Eigen::VectorXd d, b, e, h;
  double t = 0.0;
  long step = 0;
};

// Discrete current j(t) in the dual 2-form space.
struct SourceTerm
{
  std::function<Eigen::VectorXd(double)> current;
};

struct GaussResidual
{
  double b = 0.0;  // |D2 b|_inf
  double d = 0.0;  // |D~2 d|_inf
};

struct StepRecord
{
  double t = 0.0;  // time of d and e
  double energy = 0.0;
  GaussResidual gauss;
  double walltime = 0.0;  // seconds spent in the step
};

using StepCallback = std::function<void(const FieldState &, const StepRecord &)>;

class Leapfrog
{
public:
  // Throws InvalidArgument for dt <= 0 and for a source with nonzero discrete divergence.
  Leapfrog(const HodgeOperators &hodge, double dt, std::optional<SourceTerm> source = std::nullopt,
           std::vector<double> source_check_times = {0.0});

  double dt() const { return dt_; }
  const HodgeOperators &hodge() const { return *hodge_; }

  void step(FieldState &s) const;
  // Exact inverse of step() up to round-off.
  void step_back(FieldState &s) const;

  double energy(const FieldState &s) const;
  GaussResidual gauss_residual(const FieldState &s) const;

  // Advances `steps` steps. Throws UnstableIntegration on NaN or when the energy exceeds
  // blowup_factor times the initial energy. The callback also sees the initial state.
  void run(FieldState &s, long steps, const StepCallback &callback = {}, double blowup_factor = 1e6) const;

private:
  const HodgeOperators *hodge_;
  double dt_;
  std::optional<SourceTerm> source_;
};

// d from the L2 projection of D at t0, b from that of B at t0 + dt / 2; e, h from the Hodge maps.
FieldState init_state(const HodgeOperators &hodge, const ExactForm &d0, const ExactForm &b_half, double t0 = 0.0);
// Same from the potentials: d = D~1 (projection of C), b = D1 (projection of A); exactly solenoidal.
FieldState init_state_solenoidal(const HodgeOperators &hodge, const ExactForm &c0, const ExactForm &a_half,
                                 double t0 = 0.0);
// Recomputes e and h from d and b.
void update_derived(const HodgeOperators &hodge, FieldState &s);

enum class CflMethod
{
  PowerIteration,
  Lanczos
};

struct CflEstimate
{
  double dt_max = 0.0;
  double lambda_max = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of D~1 hodge_H D1 hodge_E (homogeneous data), self-adjoint in the energy
// inner product <x, y> = hodge_E(x)^T K~2 y; dt_max = 2 / sqrt(lambda_max).
CflEstimate estimate_cfl(const HodgeOperators &hodge, std::uint64_t seed = 42, double tol = 1e-6,
                         int max_iterations = 500, CflMethod method = CflMethod::Lanczos);

}  // namespace maxkron

#endif  // MAXKRON_INTEGRATOR_HPP
