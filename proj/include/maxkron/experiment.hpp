// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_EXPERIMENT_HPP
#define MAXKRON_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxkron/hodge.hpp"
#include "maxkron/integrator.hpp"
#include "maxkron/problems.hpp"

namespace maxkron
{

enum class ExperimentKind
{
  Cavity,
  Coaxial,
  Convergence,
  CflStudy,
  PerfStudy
};

enum class GeometryChoice
{
  Cube,
  Coaxial,
  CoaxialPerturbed
};

enum class InitialData
{
  Projection,  // L2 projections of D and B
  Solenoidal   // curls of projected potentials, exactly divergence free
};

struct ExperimentConfig
{
  ExperimentKind experiment = ExperimentKind::Cavity;
  HodgeScheme scheme = HodgeScheme::PairingSolve;
  int p = 3;
  int n = 4;
  double T = 2.0;
  std::optional<double> dt;  // empty: automatic from the CFL estimate
  double cfl_safety = 0.9;
  std::string output = "results";
  std::uint64_t seed = 42;
  GeometryChoice geometry = GeometryChoice::Cube;
  std::vector<int> levels;   // convergence / studies: n values
  std::vector<int> degrees;  // convergence / studies: p values
  std::vector<HodgeScheme> schemes;  // studies; defaults depend on the experiment
  long timed_steps = 100;
  long warmup_steps = 5;
  InitialData initial_data = InitialData::Projection;

  // Unknown keys and invalid values throw Validation naming the field.
  static ExperimentConfig from_json(const nlohmann::json &j);
  nlohmann::json to_json() const;
};

// Throws Parse (with line information) for malformed JSON.
ExperimentConfig parse_config(const std::filesystem::path &path);

std::string to_string(ExperimentKind k);
std::string to_string(GeometryChoice g);
GeometryMap make_geometry(GeometryChoice g);

struct RunMetrics
{
  double h = 0.0;
  int p = 0;
  int n = 0;
  std::size_t dofs = 0;
  double err_e = 0.0;
  double err_h = 0.0;
  double dt = 0.0;
  long steps = 0;
  double walltime_per_step = 0.0;
  HodgeScheme scheme = HodgeScheme::PairingSolve;
};

struct RunResult
{
  RunMetrics metrics;
  std::vector<StepRecord> trace;
  std::optional<CflEstimate> cfl;
};

// One time-domain run of the cavity mode (cube geometries) or the TEM mode (coaxial ones).
// With record_errors = false the space-time errors are skipped.
RunResult run_problem(const ExperimentConfig &cfg, int p, int n, HodgeScheme scheme, bool record_errors = true);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

struct ConvergenceOrder
{
  int p = 0;
  HodgeScheme scheme = HodgeScheme::PairingSolve;
  double order_e = 0.0;
  double order_h = 0.0;
};

struct ConvergenceResult
{
  std::vector<RunMetrics> runs;
  std::vector<ConvergenceOrder> orders;
};

using RunProgress = std::function<void(const RunMetrics &)>;

// Orders from the finest three levels; throws Validation with fewer than three levels.
ConvergenceResult run_convergence(const ExperimentConfig &cfg, const RunProgress &progress = {});

struct CflRow
{
  HodgeScheme scheme;
  int p;
  int n;
  double h;
  CflEstimate estimate;
};

struct CflStudyResult
{
  std::vector<CflRow> rows;
  // Slopes per scheme: log dt_max vs log p at fixed n, and vs log h at fixed p.
  std::vector<std::pair<HodgeScheme, double>> slope_p, slope_h;
};

// Sweeps cfg.degrees at n = cfg.n and cfg.levels at p = cfg.p.
CflStudyResult run_cfl_study(const ExperimentConfig &cfg);

struct PerfRow
{
  HodgeScheme scheme;
  int p;
  int n;
  std::size_t dofs;
  double walltime_per_step;
  double setup_time;
};

struct PerfStudyResult
{
  std::vector<PerfRow> rows;
  std::vector<std::tuple<HodgeScheme, int, double>> slopes;  // (scheme, p, time-vs-DoFs slope)
};

PerfStudyResult run_perf_study(const ExperimentConfig &cfg);

// Energy trace analysis: drift rate with the leapfrog oscillation regressed out.
struct EnergyAnalysis
{
  double mean = 0.0;
  double band = 0.0;          // (max - min) / mean
  double linear_slope = 0.0;  // plain least-squares slope
  double drift = 0.0;         // slope of the harmonic regression
  double frequency = 0.0;     // fitted oscillation angular frequency
};

EnergyAnalysis analyze_energy(const std::vector<StepRecord> &trace);

// Runs the configured experiment and writes its CSV files and the config echo into out_dir.
void run_experiment(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                    const RunProgress &progress = {});

}  // namespace maxkron

#endif  // MAXKRON_EXPERIMENT_HPP
