#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrapest/kalman.hpp"
#include "scrapest/sensitivity.hpp"
#include "scrapest/synth.hpp"

namespace scrapest {

/// File-format or filesystem failure; carries file and line context.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Estimator view: heat_index, m_scrap_1..n, m_hm, f_hm_ppm, m_slag, m_steel,
/// f_feon_pct, f_steel_meas_ppm.
void write_heats_csv(const std::filesystem::path& path, const Dataset& ds);

/// Truth view: alpha_1..n (ppm), c1, c2, f_steel_true_ppm.
void write_truth_csv(const std::filesystem::path& path, const Dataset& ds);

/// Noise-free process variables; written only when injected noise makes the
/// estimator view differ from the truth view.
void write_truth_vars_csv(const std::filesystem::path& path, const Dataset& ds);

/// Key-value sidecar: config echo, seed, prior, achieved matrix rank/cond.
void write_dataset_meta(const std::filesystem::path& path, const Dataset& ds);

/// Writes heats.csv, truth.csv, meta.txt (and truth_vars.csv when needed).
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);

/// Reads a dataset directory written by write_dataset.
Dataset read_dataset(const std::filesystem::path& dir);

/// heat_index, alpha_hat_1..n (ppm), y_pred, innovation, f_steel_pred_ppm and,
/// for the extended state, c1_hat, c2_hat. Reported estimates are clamped to
/// their supports.
void write_filtered_csv(const std::filesystem::path& path,
                        const FilterOutput& out);

/// heat_index, alpha_hat_ppm, alpha_true_ppm, usage_mass_t, usage_avg30_t for
/// one scrap type (0-based index).
void write_tracking_csv(const std::filesystem::path& path,
                        const FilterOutput& out, const Dataset& ds,
                        int scrap_index, int usage_bin = 30);

inline constexpr char kTableHeader[] =
    "label,target,level_pct,seed,bias_cu_ppm,std_cu_ppm,bias_cr_ppm,"
    "std_cr_ppm,rmse_scrap45_ppm,rank,cond";

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_table_csv(const std::filesystem::path& path);

/// Reproducibility manifest for one command invocation.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;  // full effective config
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double duration_ms = 0.0;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

/// Full-precision decimal rendering that round-trips doubles exactly.
std::string format_double(double v);

}  // namespace scrapest
