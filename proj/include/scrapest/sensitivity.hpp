#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "scrapest/kalman.hpp"
#include "scrapest/synth.hpp"

namespace scrapest {

/// One-step prediction errors f_steel_pred - f_steel_meas in ppm, one entry
/// per heat. With a perfectly known state this reduces to minus the
/// measurement noise, so its std floors at the measurement std.
Eigen::VectorXd prediction_errors(const FilterOutput& output,
                                  const Dataset& dataset);

struct ErrorStats {
  double bias_ppm = 0.0;  // mean error
  double std_ppm = 0.0;   // sample std
  int n_heats = 0;        // heats included (after burn-in)
  int burn_in = 0;
};

/// Mean and sample std of an error series after discarding the first
/// burn_in entries. Requires at least two remaining entries.
ErrorStats error_stats(const Eigen::VectorXd& errors_ppm, int burn_in);

/// Lag-1 autocorrelation of a series tail (diagnostic for filter innovations).
double lag1_autocorrelation(const Eigen::VectorXd& series, int burn_in);

struct TrackingResult {
  double rmse_ppm = 0.0;        // post-burn-in RMSE of clamped estimate
  Eigen::VectorXd usage_avg;    // per-bin average charged mass [t]
  int usage_bin = 30;           // heats per usage bin
};

/// Tracking quality of one scrap type: RMSE between the filtered estimate and
/// the generating trajectory after burn-in, plus binned usage masses for
/// plotting. scrap_index is 0-based.
TrackingResult scrap_tracking_rmse(const FilterOutput& output,
                                   const Dataset& dataset, int scrap_index,
                                   int usage_bin = 30);

/// RMSE of the estimator frozen at the prior mean, same conventions.
double prior_freeze_rmse(const Dataset& dataset, int scrap_index, int burn_in);

/// One sweep-table row: metrics of both elements on one scenario cell.
struct SweepRow {
  std::string label;   // matrix kind
  std::string target;  // noise target swept, or "matrix"
  double level = 0.0;  // noise std as fraction
  std::uint64_t seed = 0;
  ErrorStats cu;
  ErrorStats cr;
  double rmse_scrap45_ppm = 0.0;  // linear-filter tracking RMSE, last type
  int rank = 0;
  double cond = 0.0;
};

/// Filter parameters (state-noise prior, measurement std, element kind) for a
/// dataset's element.
ModelParams filter_params(const Dataset& dataset);

/// Runs the element-appropriate filter, linear or unscented, with the default
/// prior initialization.
FilterOutput run_filter(const Dataset& dataset,
                        const StepObserver& observer = {});

/// Builds both element datasets for the config, runs the linear filter on the
/// steel-only element and the unscented filter on the steel/slag element, and
/// reduces the outputs to one row.
SweepRow run_scenario(const ScenarioConfig& config);

/// Cartesian product of noise levels x seeds for one target, run on a worker
/// pool of `jobs` threads. Rows come back sorted by (level, seed).
std::vector<SweepRow> sweep(const ScenarioConfig& base, NoiseTarget target,
                            const std::vector<double>& levels,
                            const std::vector<std::uint64_t>& seeds, int jobs,
                            bool progress = false);

/// Matrix-structure study: every matrix kind at zero injected noise.
std::vector<SweepRow> matrix_structure_rows(
    const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
    int jobs, bool progress = false);

}  // namespace scrapest
