#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfeller/feller.hpp"
#include "vfeller/kernels.hpp"
#include "vfeller/model.hpp"

namespace vfeller {

enum class SimScheme { ConvolutionEuler, MarkovianLift };
const char* to_string(SimScheme s);

struct SimConfig {
  ModelSpec model = ModelSpec::cir(1.0, 1.0, 1.0, 1.0);
  KernelSpec kernel = KernelSpec::constant(1.0);
  double horizon = 1.0;
  double dt = 1e-3;
  int n_paths = 1000;
  std::uint64_t seed = 0;
  SimScheme scheme = SimScheme::ConvolutionEuler;
  double hit_eps = 0.0;      // <= 0: 1e-4 times the interval width (or max(1, |x0|))
  double blowup_cap = 0.0;   // <= 0: 1e6 * max(1, |x0|)
  int threads = 0;           // <= 0: hardware concurrency, capped by VOLTERRA_FELLER_THREADS
};

double default_hit_eps(const ModelSpec& model);
double default_blowup_cap(const ModelSpec& model);

/// Throws ValidationError / PreconditionError on invalid configs.
void validate(const SimConfig& config);

struct HitQuantiles {
  double p10 = 0.0, p50 = 0.0, p90 = 0.0;
};

enum class HitSide { None, Left, Right };

struct PathOutcome {
  double terminal = 0.0;  // frozen at the hit for hit paths
  HitSide hit = HitSide::None;
  double hit_time = 0.0;
};

struct SimulationReport {
  double hit_fraction_left = 0.0;
  double hit_fraction_right = 0.0;
  std::optional<HitQuantiles> quantiles_left;
  std::optional<HitQuantiles> quantiles_right;
  double mean_terminal = 0.0;  // over surviving paths; NaN when none survive
  double var_terminal = 0.0;
  int n_surviving = 0;
  SimScheme scheme = SimScheme::ConvolutionEuler;
  double dt = 0.0;
  int n_steps = 0;
  int n_paths = 0;
  std::uint64_t seed = 0;
  double hit_eps = 0.0;
  double blowup_cap = 0.0;
  std::vector<PathOutcome> paths;
};

SimulationReport simulate(const SimConfig& config);

/// Brownian increments of one path (length n_steps, scaled by sqrt(dt)) from the
/// same stream simulate() uses for path index `path`.
std::vector<double> brownian_increments(std::uint64_t seed, int path, int n_steps, double dt);

/// One path driven by the given increments. hit_eps and blowup_cap must be resolved.
PathOutcome simulate_path(const SimConfig& config, std::span<const double> dW);

struct CrosscheckTolerances {
  double leak_tol = 0.02;
  double floor_tol = 0.05;
};

struct CrosscheckEntry {
  BoundaryVerdict verdict;
  double observed = 0.0;
  double required = 0.0;
  bool consistent = true;
  std::string rule;  // "<= leak_tol", ">= floor_tol" or "none"
};

struct CrosscheckReport {
  SimulationReport simulation;
  std::vector<CrosscheckEntry> entries;
  bool all_consistent() const;
};

CrosscheckReport verdict_crosscheck(const ModelSpec& model, const KernelSpec& kernel,
                                    const SimConfig& sim,
                                    const std::vector<BoundaryVerdict>& verdicts,
                                    const CrosscheckTolerances& tol = {});

/// Compare verdicts against an existing simulation report.
std::vector<CrosscheckEntry> compare_verdicts(const SimulationReport& report,
                                              const std::vector<BoundaryVerdict>& verdicts,
                                              const CrosscheckTolerances& tol = {});

}  // namespace vfeller
