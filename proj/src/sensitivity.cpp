#include "scrapest/sensitivity.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "scrapest/ukf.hpp"

namespace scrapest {

namespace {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Work items are
// handed out through an atomic counter; results must be written by index so
// the output order never depends on the thread count.
template <typename Body>
void parallel_cells(std::size_t count, int jobs, const Body& body) {
  const int workers = static_cast<int>(
      std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

struct ProgressPrinter {
  bool enabled = false;
  std::size_t total = 0;
  std::atomic<std::size_t> done{0};
  std::mutex mu;

  void tick(const std::string& what) {
    const std::size_t d = ++done;
    if (!enabled) return;
    std::lock_guard<std::mutex> lock(mu);
    std::fprintf(stderr, "  [%zu/%zu] %s\n", d, total, what.c_str());
  }
};

}  // namespace

Eigen::VectorXd prediction_errors(const FilterOutput& output,
                                  const Dataset& dataset) {
  const int T = output.heats_count();
  if (T != dataset.heats_count()) {
    throw std::invalid_argument("prediction_errors: output/dataset mismatch");
  }
  Eigen::VectorXd err(T);
  for (int t = 0; t < T; ++t) {
    err[t] = (output.f_steel_pred[t] - dataset.heats[t].f_steel_meas) / kPpm;
  }
  return err;
}

ErrorStats error_stats(const Eigen::VectorXd& errors_ppm, int burn_in) {
  const int T = static_cast<int>(errors_ppm.size());
  if (burn_in < 0 || T - burn_in < 2) {
    throw std::invalid_argument(
        "error_stats: need at least two entries after burn-in");
  }
  const int m = T - burn_in;
  const Eigen::VectorXd tail = errors_ppm.tail(m);
  ErrorStats s;
  s.burn_in = burn_in;
  s.n_heats = m;
  s.bias_ppm = tail.mean();
  s.std_ppm = std::sqrt((tail.array() - s.bias_ppm).square().sum() / (m - 1));
  return s;
}

double lag1_autocorrelation(const Eigen::VectorXd& series, int burn_in) {
  const int T = static_cast<int>(series.size());
  if (burn_in < 0 || T - burn_in < 3) {
    throw std::invalid_argument(
        "lag1_autocorrelation: need at least three entries after burn-in");
  }
  const int m = T - burn_in;
  const Eigen::VectorXd tail = series.tail(m);
  const double mu = tail.mean();
  const Eigen::ArrayXd centered = tail.array() - mu;
  const double denom = centered.square().sum();
  if (denom <= 0.0) return 0.0;
  const double num =
      (centered.head(m - 1) * centered.tail(m - 1)).sum();
  return num / denom;
}

TrackingResult scrap_tracking_rmse(const FilterOutput& output,
                                   const Dataset& dataset, int scrap_index,
                                   int usage_bin) {
  const int T = output.heats_count();
  if (scrap_index < 0 || scrap_index >= output.n_scrap) {
    throw std::invalid_argument("scrap_tracking_rmse: bad scrap index");
  }
  if (usage_bin < 1) {
    throw std::invalid_argument("scrap_tracking_rmse: usage_bin must be >= 1");
  }
  const int burn_in = dataset.config.burn_in;
  if (T - burn_in < 1) {
    throw std::invalid_argument("scrap_tracking_rmse: no heats after burn-in");
  }

  TrackingResult res;
  res.usage_bin = usage_bin;
  double acc = 0.0;
  for (int t = burn_in; t < T; ++t) {
    const double est =
        std::clamp(output.updated_mean(t, scrap_index), 0.0, 1.0);
    const double diff = est - dataset.truth.alpha(t, scrap_index);
    acc += diff * diff;
  }
  res.rmse_ppm = std::sqrt(acc / (T - burn_in)) / kPpm;

  const int n_bins = (T + usage_bin - 1) / usage_bin;
  res.usage_avg.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    const int lo = b * usage_bin;
    const int hi = std::min(T, lo + usage_bin);
    double mass = 0.0;
    for (int t = lo; t < hi; ++t) {
      mass += dataset.heats[t].m_scrap[scrap_index];
    }
    res.usage_avg[b] = mass / (hi - lo);
  }
  return res;
}

double prior_freeze_rmse(const Dataset& dataset, int scrap_index,
                         int burn_in) {
  const int T = dataset.heats_count();
  if (scrap_index < 0 || scrap_index >= dataset.n_scrap()) {
    throw std::invalid_argument("prior_freeze_rmse: bad scrap index");
  }
  if (burn_in < 0 || T - burn_in < 1) {
    throw std::invalid_argument("prior_freeze_rmse: no heats after burn-in");
  }
  const double frozen = dataset.prior_mean[scrap_index];
  double acc = 0.0;
  for (int t = burn_in; t < T; ++t) {
    const double diff = frozen - dataset.truth.alpha(t, scrap_index);
    acc += diff * diff;
  }
  return std::sqrt(acc / (T - burn_in)) / kPpm;
}

ModelParams filter_params(const Dataset& dataset) {
  ModelParams p;
  p.gamma = dataset.config.gamma;
  p.obs_noise_std = dataset.config.obs_noise_std();
  p.element_kind = element_kind(dataset.config.element);
  if (p.element_kind == ElementKind::SteelOnly) {
    const int n = dataset.n_scrap();
    p.noise.mean = dataset.prior_mean;
    p.noise.variance =
        kStateNoiseVarScale * dataset.prior_mean.array().square();
    p.noise.support.assign(n, NoiseSupport::UnitInterval);
  } else {
    p.noise = ukf_noise_spec(dataset);
  }
  return p;
}

FilterOutput run_filter(const Dataset& dataset, const StepObserver& observer) {
  const ModelParams params = filter_params(dataset);
  if (params.element_kind == ElementKind::SteelOnly) {
    return run_kf(dataset, params,
                  kf_default_init(dataset, dataset.config.kf_init_cov_scale),
                  observer);
  }
  return run_ukf(dataset, params, dataset.config.ut,
                 ukf_default_init(dataset, dataset.config.ukf_init_cov_scale),
                 observer);
}

SweepRow run_scenario(const ScenarioConfig& config) {
  ScenarioConfig cu_cfg = config;
  cu_cfg.element = Element::Cu;
  ScenarioConfig cr_cfg = config;
  cr_cfg.element = Element::Cr;

  const Dataset ds_cu = build_dataset(cu_cfg);
  const Dataset ds_cr = build_dataset(cr_cfg);

  const FilterOutput out_cu = run_filter(ds_cu);
  const FilterOutput out_cr = run_filter(ds_cr);

  SweepRow row;
  row.label = matrix_kind_name(config.matrix.kind);
  row.target = "matrix";
  row.level = 0.0;
  row.seed = config.seed;
  row.cu = error_stats(prediction_errors(out_cu, ds_cu), config.burn_in);
  row.cr = error_stats(prediction_errors(out_cr, ds_cr), config.burn_in);
  row.rmse_scrap45_ppm =
      scrap_tracking_rmse(out_cu, ds_cu, ds_cu.n_scrap() - 1).rmse_ppm;
  row.rank = ds_cu.matrix_meta.rank;
  row.cond = ds_cu.matrix_meta.cond;
  return row;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, NoiseTarget target,
                            const std::vector<double>& levels,
                            const std::vector<std::uint64_t>& seeds, int jobs,
                            bool progress) {
  std::vector<std::pair<double, std::uint64_t>> cells;
  cells.reserve(levels.size() * seeds.size());
  for (double level : levels) {
    for (std::uint64_t seed : seeds) {
      cells.emplace_back(level, seed);
    }
  }
  std::vector<SweepRow> rows(cells.size());
  ProgressPrinter prog;
  prog.enabled = progress;
  prog.total = cells.size();
  parallel_cells(cells.size(), jobs, [&](std::size_t i) {
    ScenarioConfig cfg = base;
    cfg.noise[target] = cells[i].first;
    cfg.seed = cells[i].second;
    SweepRow row = run_scenario(cfg);
    row.target = noise_target_name(target);
    row.level = cells[i].first;
    rows[i] = std::move(row);
    char what[128];
    std::snprintf(what, sizeof(what), "%s level=%g seed=%llu",
                  noise_target_name(target).c_str(), cells[i].first,
                  static_cast<unsigned long long>(cells[i].second));
    prog.tick(what);
  });
  return rows;
}

std::vector<SweepRow> matrix_structure_rows(
    const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
    int jobs, bool progress) {
  const std::array<MatrixKind, 4> kinds = {
      MatrixKind::Identity, MatrixKind::Sparse, MatrixKind::Conditioned,
      MatrixKind::LowRank};
  std::vector<std::pair<MatrixKind, std::uint64_t>> cells;
  cells.reserve(kinds.size() * seeds.size());
  for (MatrixKind kind : kinds) {
    for (std::uint64_t seed : seeds) {
      cells.emplace_back(kind, seed);
    }
  }
  std::vector<SweepRow> rows(cells.size());
  ProgressPrinter prog;
  prog.enabled = progress;
  prog.total = cells.size();
  parallel_cells(cells.size(), jobs, [&](std::size_t i) {
    ScenarioConfig cfg = base;
    cfg.matrix.kind = cells[i].first;
    cfg.noise = NoiseLevels{};
    cfg.seed = cells[i].second;
    rows[i] = run_scenario(cfg);
    char what[128];
    std::snprintf(what, sizeof(what), "%s seed=%llu",
                  matrix_kind_name(cells[i].first).c_str(),
                  static_cast<unsigned long long>(cells[i].second));
    prog.tick(what);
  });
  return rows;
}

}  // namespace scrapest
