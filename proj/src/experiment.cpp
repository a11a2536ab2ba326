// SPDX-License-Identifier: Apache-2.0

#include "maxkron/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "maxkron/error.hpp"

namespace maxkron
{

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start)
{
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

const std::vector<std::pair<std::string, ExperimentKind>> kExperiments = {
    {"cavity", ExperimentKind::Cavity},
    {"coaxial", ExperimentKind::Coaxial},
    {"convergence", ExperimentKind::Convergence},
    {"cfl_study", ExperimentKind::CflStudy},
    {"perf_study", ExperimentKind::PerfStudy}};

const std::vector<std::pair<std::string, GeometryChoice>> kGeometries = {
    {"cube", GeometryChoice::Cube},
    {"coaxial", GeometryChoice::Coaxial},
    {"coaxial_perturbed", GeometryChoice::CoaxialPerturbed}};

template <class E>
E lookup(const std::vector<std::pair<std::string, E>> &table, const std::string &key, const std::string &field)
{
  for (const auto &[name, value] : table)
  {
    if (name == key)
    {
      return value;
    }
  }
  std::string names;
  for (const auto &entry : table)
  {
    names += (names.empty() ? "" : ", ") + entry.first;
  }
  fail(ErrorCode::Validation, "field '" + field + "': unknown value '" + key + "' (expected " + names + ")");
}

template <class E>
std::string name_of(const std::vector<std::pair<std::string, E>> &table, E value)
{
  for (const auto &[name, v] : table)
  {
    if (v == value)
    {
      return name;
    }
  }
  return "?";
}

[[noreturn]] void invalid(const std::string &field, const std::string &why)
{
  fail(ErrorCode::Validation, "field '" + field + "': " + why);
}

int get_int(const nlohmann::json &j, const std::string &field)
{
  if (!j.is_number_integer())
  {
    invalid(field, "expected an integer");
  }
  return j.get<int>();
}

double get_number(const nlohmann::json &j, const std::string &field)
{
  if (!j.is_number())
  {
    invalid(field, "expected a number");
  }
  return j.get<double>();
}

std::string get_string(const nlohmann::json &j, const std::string &field)
{
  if (!j.is_string())
  {
    invalid(field, "expected a string");
  }
  return j.get<std::string>();
}

bool power_of_two(int n)
{
  return n > 0 && (n & (n - 1)) == 0;
}

void check_degree(int p, const std::string &field)
{
  if (p < 2 || p > 6)
  {
    invalid(field, "degree " + std::to_string(p) + " outside the supported range [2, 6]");
  }
}

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::ofstream open_csv(const std::filesystem::path &path, const std::string &header)
{
  std::ofstream f(path);
  require(f.good(), ErrorCode::InvalidArgument, "cannot write " + path.string());
  f << header << '\n';
  return f;
}

void write_metrics(const std::filesystem::path &path, const std::vector<RunMetrics> &rows)
{
  auto f = open_csv(path, "h,p,dofs,err_E_rel,err_H_rel,dt,steps,walltime_per_step_s");
  for (const auto &m : rows)
  {
    f << fmt(m.h) << ',' << m.p << ',' << m.dofs << ',' << fmt(m.err_e) << ',' << fmt(m.err_h) << ','
      << fmt(m.dt) << ',' << m.steps << ',' << fmt(m.walltime_per_step) << '\n';
  }
}

void write_energy(const std::filesystem::path &path, const std::vector<StepRecord> &trace)
{
  auto f = open_csv(path, "t,energy,gauss_b,gauss_d");
  for (const auto &r : trace)
  {
    f << fmt(r.t) << ',' << fmt(r.energy) << ',' << fmt(r.gauss.b) << ',' << fmt(r.gauss.d) << '\n';
  }
}

//
// Space-time L2 errors by trapezoid accumulation of spatial errors at the sample times.
//
class ErrorTracker
{
public:
  ErrorTracker(const Discretization &disc, const SeparableField &exact, const FormSpace &space)
    : grid_(disc.primal.knots, disc.geometry, disc.p + 2), sampler_(space, grid_), exact_(exact)
  {
    for (const auto &term : exact.space)
    {
      terms_.push_back(sample_field(grid_, 3, term));
    }
    wdet_.resize(grid_.size());
    for (std::size_t q = 0; q < grid_.size(); ++q)
    {
      wdet_[q] = grid_.weight(q) * grid_.det(q);
    }
  }

  void sample(const Eigen::VectorXd &coeffs, double t)
  {
    const PointField f = sampler_.evaluate({coeffs.data(), static_cast<std::size_t>(coeffs.size())});
    const std::size_t np = grid_.size();
    std::vector<double> factors(terms_.size());
    for (std::size_t k = 0; k < terms_.size(); ++k)
    {
      factors[k] = exact_.time[k](t);
    }
    double err = 0.0, ref = 0.0;
    for (int c = 0; c < 3; ++c)
    {
      const double *fh = f.values.data() + c * np;
      for (std::size_t q = 0; q < np; ++q)
      {
        double u = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k)
        {
          u += factors[k] * terms_[k].values[c * np + q];
        }
        const double diff = fh[q] - u;
        err += wdet_[q] * diff * diff;
        ref += wdet_[q] * u * u;
      }
    }
    if (has_prev_)
    {
      const double w = 0.5 * (t - t_prev_);
      err_int_ += w * (err + err_prev_);
      ref_int_ += w * (ref + ref_prev_);
    }
    has_prev_ = true;
    t_prev_ = t;
    err_prev_ = err;
    ref_prev_ = ref;
  }

  double relative() const
  {
    if (ref_int_ > 0.0)
    {
      return std::sqrt(err_int_ / ref_int_);
    }
    // single sample: the spatial error
    return ref_prev_ > 0.0 ? std::sqrt(err_prev_ / ref_prev_) : std::sqrt(err_prev_);
  }

private:
  QuadratureGrid grid_;
  FieldSampler sampler_;
  const SeparableField &exact_;
  std::vector<PointField> terms_;
  std::vector<double> wdet_;
  bool has_prev_ = false;
  double t_prev_ = 0.0, err_prev_ = 0.0, ref_prev_ = 0.0;
  double err_int_ = 0.0, ref_int_ = 0.0;
};

ExactSolution problem_for(GeometryChoice g)
{
  return g == GeometryChoice::Cube ? cavity_mode() : tem_mode();
}

long step_count(double T, double dt)
{
  return static_cast<long>(std::ceil(T / dt - 1e-9));
}

// Timing does not depend on the data; discrete curls of random potentials avoid the projection
// solves, whose factorizations dominate memory on the finest meshes.
FieldState random_solenoidal_state(const HodgeOperators &hodge, std::uint64_t seed)
{
  const auto &disc = hodge.discretization();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random = [&](std::size_t n)
  {
    Eigen::VectorXd v(static_cast<long>(n));
    for (auto &x : v)
    {
      x = u(rng);
    }
    return v;
  };
  FieldState s;
  s.d = disc.dual_curl.real * random(disc.dim_h());
  s.b = disc.curl.real * random(disc.dim_e());
  update_derived(hodge, s);
  return s;
}

std::vector<HodgeScheme> schemes_or(const ExperimentConfig &cfg, std::vector<HodgeScheme> fallback)
{
  return cfg.schemes.empty() ? fallback : cfg.schemes;
}

}  // namespace

std::string to_string(ExperimentKind k)
{
  return name_of(kExperiments, k);
}

std::string to_string(GeometryChoice g)
{
  return name_of(kGeometries, g);
}

GeometryMap make_geometry(GeometryChoice g)
{
  switch (g)
  {
    case GeometryChoice::Cube:
      return identity_cube();
    case GeometryChoice::Coaxial:
      return coaxial_quarter();
    case GeometryChoice::CoaxialPerturbed:
      return coaxial_quarter(Eigen::Vector3d(0.01, 0.0, 0.0));
  }
  return identity_cube();
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json &j)
{
  if (!j.is_object())
  {
    fail(ErrorCode::Validation, "config must be a JSON object");
  }
  static const std::vector<std::string> known = {
      "experiment", "scheme", "p", "n", "T", "dt", "cfl_safety", "output", "seed", "geometry", "levels",
      "degrees", "schemes", "timed_steps", "warmup_steps", "initial_data"};
  for (const auto &[key, value] : j.items())
  {
    if (std::find(known.begin(), known.end(), key) == known.end())
    {
      invalid(key, "unknown key");
    }
  }
  if (!j.contains("experiment"))
  {
    invalid("experiment", "required");
  }
  ExperimentConfig c;
  c.experiment = lookup(kExperiments, get_string(j["experiment"], "experiment"), "experiment");
  if (c.experiment == ExperimentKind::Coaxial)
  {
    c.geometry = GeometryChoice::Coaxial;
  }
  if (c.experiment == ExperimentKind::PerfStudy)
  {
    c.geometry = GeometryChoice::CoaxialPerturbed;
  }
  if (j.contains("scheme"))
  {
    try
    {
      c.scheme = hodge_scheme_from_string(get_string(j["scheme"], "scheme"));
    }
    catch (const Error &e)
    {
      invalid("scheme", e.what());
    }
  }
  if (j.contains("schemes"))
  {
    if (!j["schemes"].is_array())
    {
      invalid("schemes", "expected an array");
    }
    for (const auto &s : j["schemes"])
    {
      try
      {
        c.schemes.push_back(hodge_scheme_from_string(get_string(s, "schemes")));
      }
      catch (const Error &e)
      {
        invalid("schemes", e.what());
      }
    }
  }
  if (j.contains("p"))
  {
    c.p = get_int(j["p"], "p");
  }
  check_degree(c.p, "p");
  if (j.contains("n"))
  {
    c.n = get_int(j["n"], "n");
  }
  if (c.n < 1)
  {
    invalid("n", "must be at least 1");
  }
  if (j.contains("T"))
  {
    c.T = get_number(j["T"], "T");
  }
  if (!(c.T > 0.0))
  {
    invalid("T", "must be positive");
  }
  if (j.contains("dt"))
  {
    const auto &v = j["dt"];
    if (v.is_string())
    {
      if (v.get<std::string>() != "auto")
      {
        invalid("dt", "expected a positive number or \"auto\"");
      }
    }
    else
    {
      c.dt = get_number(v, "dt");
      if (!(*c.dt > 0.0))
      {
        invalid("dt", "must be positive");
      }
    }
  }
  if (j.contains("cfl_safety"))
  {
    c.cfl_safety = get_number(j["cfl_safety"], "cfl_safety");
  }
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0))
  {
    invalid("cfl_safety", "must lie in (0, 1]");
  }
  if (j.contains("output"))
  {
    c.output = get_string(j["output"], "output");
  }
  if (j.contains("seed"))
  {
    if (!j["seed"].is_number_unsigned())
    {
      invalid("seed", "expected a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("geometry"))
  {
    c.geometry = lookup(kGeometries, get_string(j["geometry"], "geometry"), "geometry");
  }
  auto int_list = [&](const char *field, std::vector<int> &out)
  {
    if (!j.contains(field))
    {
      return;
    }
    if (!j[field].is_array() || j[field].empty())
    {
      invalid(field, "expected a non-empty array of integers");
    }
    for (const auto &v : j[field])
    {
      out.push_back(get_int(v, field));
    }
  };
  int_list("levels", c.levels);
  int_list("degrees", c.degrees);
  for (int p : c.degrees)
  {
    check_degree(p, "degrees");
  }
  for (int n : c.levels)
  {
    if (c.experiment == ExperimentKind::Convergence ? !power_of_two(n) : n < 1)
    {
      invalid("levels", "mesh level " + std::to_string(n) +
                            (c.experiment == ExperimentKind::Convergence ? " is not a power of two" : " is not positive"));
    }
  }
  if (j.contains("timed_steps"))
  {
    c.timed_steps = get_int(j["timed_steps"], "timed_steps");
  }
  if (c.timed_steps < 1)
  {
    invalid("timed_steps", "must be at least 1");
  }
  if (j.contains("warmup_steps"))
  {
    c.warmup_steps = get_int(j["warmup_steps"], "warmup_steps");
  }
  if (c.warmup_steps < 0)
  {
    invalid("warmup_steps", "must be non-negative");
  }
  if (j.contains("initial_data"))
  {
    const std::string s = get_string(j["initial_data"], "initial_data");
    if (s == "projection")
    {
      c.initial_data = InitialData::Projection;
    }
    else if (s == "solenoidal")
    {
      c.initial_data = InitialData::Solenoidal;
    }
    else
    {
      invalid("initial_data", "expected \"projection\" or \"solenoidal\"");
    }
  }
  if (c.experiment == ExperimentKind::Convergence && c.levels.empty())
  {
    invalid("levels", "required for convergence runs");
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const
{
  nlohmann::json j;
  j["experiment"] = maxkron::to_string(experiment);
  j["scheme"] = maxkron::to_string(scheme);
  j["p"] = p;
  j["n"] = n;
  j["T"] = T;
  if (dt)
  {
    j["dt"] = *dt;
  }
  else
  {
    j["dt"] = "auto";
  }
  j["cfl_safety"] = cfl_safety;
  j["output"] = output;
  j["seed"] = seed;
  j["geometry"] = maxkron::to_string(geometry);
  if (!levels.empty())
  {
    j["levels"] = levels;
  }
  if (!degrees.empty())
  {
    j["degrees"] = degrees;
  }
  if (!schemes.empty())
  {
    for (auto s : schemes)
    {
      j["schemes"].push_back(maxkron::to_string(s));
    }
  }
  j["timed_steps"] = timed_steps;
  j["warmup_steps"] = warmup_steps;
  j["initial_data"] = initial_data == InitialData::Projection ? "projection" : "solenoidal";
  return j;
}

ExperimentConfig parse_config(const std::filesystem::path &path)
{
  std::ifstream f(path);
  require(f.good(), ErrorCode::Parse, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::parse_error &e)
  {
    const std::size_t pos = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n');
    fail(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  return ExperimentConfig::from_json(j);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::InvalidArgument, "log-log slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunResult run_problem(const ExperimentConfig &cfg, int p, int n, HodgeScheme scheme, bool record_errors)
{
  const MaterialField one = MaterialField::constant(1.0);
  const Discretization disc(p, n, make_geometry(cfg.geometry));
  const ExactSolution sol = problem_for(cfg.geometry);
  const HodgeOperators hodge(disc, scheme, one, one, sol.boundary);

  RunResult result;
  double dt = 0.0;
  if (cfg.dt)
  {
    dt = *cfg.dt;
  }
  else
  {
    result.cfl = estimate_cfl(hodge, cfg.seed);
    dt = cfg.cfl_safety * result.cfl->dt_max;
  }
  const long steps = step_count(cfg.T, dt);
  FieldState s = cfg.initial_data == InitialData::Projection
                     ? init_state(hodge, sol.e.at(0.0), sol.h.at(0.5 * dt))
                     : init_state_solenoidal(hodge, sol.c.at(0.0), sol.a.at(0.5 * dt));
  const Leapfrog lf(hodge, dt);

  std::optional<ErrorTracker> err_e, err_h;
  if (record_errors)
  {
    err_e.emplace(disc, sol.e, disc.primal_free[1]);
    err_h.emplace(disc, sol.h, disc.dual[1]);
  }
  double wall = 0.0;
  result.trace.reserve(static_cast<std::size_t>(steps) + 1);
  lf.run(s, steps,
         [&](const FieldState &st, const StepRecord &rec)
         {
           wall += rec.walltime;
           result.trace.push_back(rec);
           if (record_errors)
           {
             err_e->sample(st.e, st.t);
             err_h->sample(st.h, st.t + 0.5 * dt);
           }
         });

  RunMetrics &m = result.metrics;
  m.h = 1.0 / n;
  m.p = p;
  m.n = n;
  m.dofs = disc.dofs();
  m.err_e = record_errors ? err_e->relative() : std::nan("");
  m.err_h = record_errors ? err_h->relative() : std::nan("");
  m.dt = dt;
  m.steps = steps;
  m.walltime_per_step = steps > 0 ? wall / steps : 0.0;
  m.scheme = scheme;
  return result;
}

ConvergenceResult run_convergence(const ExperimentConfig &cfg, const RunProgress &progress)
{
  require(cfg.levels.size() >= 3, ErrorCode::Validation, "convergence orders need at least three mesh levels");
  std::vector<int> levels = cfg.levels;
  std::sort(levels.begin(), levels.end());
  const std::vector<int> degrees = cfg.degrees.empty() ? std::vector<int>{cfg.p} : cfg.degrees;
  ConvergenceResult out;
  for (HodgeScheme scheme : schemes_or(cfg, {cfg.scheme}))
  {
    for (int p : degrees)
    {
      std::vector<double> h, ee, eh;
      for (int n : levels)
      {
        const RunMetrics m = run_problem(cfg, p, n, scheme).metrics;
        out.runs.push_back(m);
        if (progress)
        {
          progress(m);
        }
        h.push_back(m.h);
        ee.push_back(m.err_e);
        eh.push_back(m.err_h);
      }
      const std::size_t k = h.size() - 3;
      const std::vector<double> hf(h.begin() + k, h.end()), ef(ee.begin() + k, ee.end()),
          hf2(eh.begin() + k, eh.end());
      out.orders.push_back({p, scheme, loglog_slope(hf, ef), loglog_slope(hf, hf2)});
    }
  }
  return out;
}

CflStudyResult run_cfl_study(const ExperimentConfig &cfg)
{
  const MaterialField one = MaterialField::constant(1.0);
  const GeometryMap g = make_geometry(cfg.geometry);
  const std::vector<int> degrees = cfg.degrees.empty() ? std::vector<int>{2, 3, 4, 5, 6} : cfg.degrees;
  const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{2, 4, 8, 16} : cfg.levels;
  CflStudyResult out;
  for (HodgeScheme scheme : schemes_or(cfg, {HodgeScheme::MassSolve, HodgeScheme::PairingSolve}))
  {
    std::vector<double> ps, dtp, hs, dth;
    for (int p : degrees)
    {
      const Discretization disc(p, cfg.n, g);
      const HodgeOperators hodge(disc, scheme, one, one);
      const CflEstimate e = estimate_cfl(hodge, cfg.seed);
      out.rows.push_back({scheme, p, cfg.n, 1.0 / cfg.n, e});
      ps.push_back(p);
      dtp.push_back(e.dt_max);
    }
    for (int n : levels)
    {
      const Discretization disc(cfg.p, n, g);
      const HodgeOperators hodge(disc, scheme, one, one);
      const CflEstimate e = estimate_cfl(hodge, cfg.seed);
      out.rows.push_back({scheme, cfg.p, n, 1.0 / n, e});
      hs.push_back(1.0 / n);
      dth.push_back(e.dt_max);
    }
    if (ps.size() >= 2)
    {
      out.slope_p.emplace_back(scheme, loglog_slope(ps, dtp));
    }
    if (hs.size() >= 2)
    {
      out.slope_h.emplace_back(scheme, loglog_slope(hs, dth));
    }
  }
  return out;
}

PerfStudyResult run_perf_study(const ExperimentConfig &cfg)
{
  const MaterialField one = MaterialField::constant(1.0);
  const GeometryMap g = make_geometry(cfg.geometry);
  const ExactSolution sol = problem_for(cfg.geometry);
  const std::vector<int> degrees = cfg.degrees.empty() ? std::vector<int>{2, 3, 4} : cfg.degrees;
  const std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{2, 4, 8, 16} : cfg.levels;
  const std::vector<HodgeScheme> schemes =
      schemes_or(cfg, {HodgeScheme::PairingSolve, HodgeScheme::PairingDense, HodgeScheme::MassSolve});
  const double dt = cfg.dt.value_or(1e-4);
  constexpr long window = 10;
  PerfStudyResult out;
  for (int p : degrees)
  {
    for (int n : levels)
    {
      const Discretization disc(p, n, g);
      for (HodgeScheme scheme : schemes)
      {
        const auto t0 = clock_type::now();
        const HodgeOperators hodge(disc, scheme, one, one, sol.boundary);
        const double setup = seconds_since(t0);
        FieldState s = random_solenoidal_state(hodge, cfg.seed);
        const Leapfrog lf(hodge, dt);
        for (long i = 0; i < cfg.warmup_steps; ++i)
        {
          lf.step(s);
        }
        std::vector<double> means;
        for (long done = 0; done < cfg.timed_steps; done += window)
        {
          const long len = std::min(window, cfg.timed_steps - done);
          const auto start = clock_type::now();
          for (long i = 0; i < len; ++i)
          {
            lf.step(s);
          }
          means.push_back(seconds_since(start) / len);
        }
        require(std::isfinite(lf.energy(s)), ErrorCode::UnstableIntegration,
                "perf run became unstable; reduce dt");
        std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
        out.rows.push_back({scheme, p, n, disc.dofs(), means[means.size() / 2], setup});
      }
    }
    for (HodgeScheme scheme : schemes)
    {
      std::vector<double> dofs, times;
      for (const auto &r : out.rows)
      {
        if (r.p == p && r.scheme == scheme)
        {
          dofs.push_back(static_cast<double>(r.dofs));
          times.push_back(r.walltime_per_step);
        }
      }
      if (dofs.size() >= 2)
      {
        out.slopes.emplace_back(scheme, p, loglog_slope(dofs, times));
      }
    }
  }
  return out;
}

EnergyAnalysis analyze_energy(const std::vector<StepRecord> &trace)
{
  require(trace.size() >= 8, ErrorCode::InvalidArgument, "energy analysis needs at least 8 samples");
  const long m = static_cast<long>(trace.size());
  Eigen::VectorXd t(m), e(m);
  for (long i = 0; i < m; ++i)
  {
    t[i] = trace[static_cast<std::size_t>(i)].t;
    e[i] = trace[static_cast<std::size_t>(i)].energy;
  }
  EnergyAnalysis a;
  a.mean = e.mean();
  a.band = (e.maxCoeff() - e.minCoeff()) / a.mean;

  // Columns scaled to the unit interval for conditioning; slopes converted back.
  const double t0 = t[0], span = std::max(t[m - 1] - t[0], 1e-300);
  const Eigen::VectorXd s = (t.array() - t0) / span;
  auto fit = [&](double omega, Eigen::VectorXd *coef)
  {
    Eigen::MatrixXd a_mat(m, omega > 0.0 ? 4 : 2);
    a_mat.col(0).setOnes();
    a_mat.col(1) = s;
    if (omega > 0.0)
    {
      a_mat.col(2) = (omega * t.array()).cos();
      a_mat.col(3) = (omega * t.array()).sin();
    }
    const Eigen::VectorXd c = a_mat.colPivHouseholderQr().solve(e);
    if (coef)
    {
      *coef = c;
    }
    return (a_mat * c - e).squaredNorm();
  };
  Eigen::VectorXd c;
  fit(0.0, &c);
  a.linear_slope = c[1] / span;

  // Oscillation frequency: best single-harmonic fit over a grid, refined by golden section.
  const double dt = span / static_cast<double>(m - 1);
  const double w_min = 2.0 * std::numbers::pi / span, w_max = std::numbers::pi / dt;
  const int grid = 4000;
  double best_w = 0.0, best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i)
  {
    const double w = w_min * std::pow(w_max / w_min, static_cast<double>(i) / grid);
    const double r = fit(w, nullptr);
    if (r < best_r)
    {
      best_r = r;
      best_w = w;
    }
  }
  double lo = best_w * std::pow(w_max / w_min, -1.0 / grid), hi = best_w * std::pow(w_max / w_min, 1.0 / grid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it)
  {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (fit(x1, nullptr) < fit(x2, nullptr))
    {
      hi = x2;
    }
    else
    {
      lo = x1;
    }
  }
  a.frequency = 0.5 * (lo + hi);
  fit(a.frequency, &c);
  a.drift = c[1] / span;
  return a;
}

void run_experiment(const ExperimentConfig &cfg, const std::filesystem::path &out_dir, const RunProgress &progress)
{
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream echo(out_dir / "config.echo.json");
    echo << std::setw(2) << cfg.to_json() << '\n';
  }
  switch (cfg.experiment)
  {
    case ExperimentKind::Cavity:
    case ExperimentKind::Coaxial:
    {
      const RunResult r = run_problem(cfg, cfg.p, cfg.n, cfg.scheme);
      if (progress)
      {
        progress(r.metrics);
      }
      write_metrics(out_dir / "metrics.csv", {r.metrics});
      write_energy(out_dir / "energy.csv", r.trace);
      break;
    }
    case ExperimentKind::Convergence:
    {
      const ConvergenceResult r = run_convergence(cfg, progress);
      for (HodgeScheme scheme : schemes_or(cfg, {cfg.scheme}))
      {
        std::vector<RunMetrics> rows;
        std::copy_if(r.runs.begin(), r.runs.end(), std::back_inserter(rows),
                     [&](const RunMetrics &m) { return m.scheme == scheme; });
        write_metrics(out_dir / ("metrics_" + to_string(scheme) + ".csv"), rows);
        if (scheme == schemes_or(cfg, {cfg.scheme}).front())
        {
          write_metrics(out_dir / "metrics.csv", rows);
        }
      }
      auto f = open_csv(out_dir / "orders.csv", "scheme,p,order_E,order_H");
      for (const auto &o : r.orders)
      {
        f << to_string(o.scheme) << ',' << o.p << ',' << fmt(o.order_e) << ',' << fmt(o.order_h) << '\n';
      }
      break;
    }
    case ExperimentKind::CflStudy:
    {
      const CflStudyResult r = run_cfl_study(cfg);
      auto f = open_csv(out_dir / "cfl.csv", "scheme,p,n,h,dt_max,lambda_max,iterations,converged");
      for (const auto &row : r.rows)
      {
        f << to_string(row.scheme) << ',' << row.p << ',' << row.n << ',' << fmt(row.h) << ','
          << fmt(row.estimate.dt_max) << ',' << fmt(row.estimate.lambda_max) << ',' << row.estimate.iterations
          << ',' << (row.estimate.converged ? 1 : 0) << '\n';
      }
      auto g = open_csv(out_dir / "cfl_slopes.csv", "scheme,sweep,slope");
      for (const auto &[scheme, slope] : r.slope_p)
      {
        g << to_string(scheme) << ",p," << fmt(slope) << '\n';
      }
      for (const auto &[scheme, slope] : r.slope_h)
      {
        g << to_string(scheme) << ",h," << fmt(slope) << '\n';
      }
      break;
    }
    case ExperimentKind::PerfStudy:
    {
      const PerfStudyResult r = run_perf_study(cfg);
      auto f = open_csv(out_dir / "perf.csv", "scheme,p,n,dofs,walltime_per_step_s,setup_s");
      for (const auto &row : r.rows)
      {
        f << to_string(row.scheme) << ',' << row.p << ',' << row.n << ',' << row.dofs << ','
          << fmt(row.walltime_per_step) << ',' << fmt(row.setup_time) << '\n';
      }
      auto g = open_csv(out_dir / "perf_slopes.csv", "scheme,p,slope");
      for (const auto &[scheme, p, slope] : r.slopes)
      {
        g << to_string(scheme) << ',' << p << ',' << fmt(slope) << '\n';
      }
      break;
    }
  }
}

}  // namespace maxkron
