#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "scrapest/types.hpp"

namespace scrapest {

enum class Element { Cu, Cr };

std::string element_name(Element e);
ElementKind element_kind(Element e);

enum class MatrixKind { Identity, Conditioned, LowRank, Sparse };

std::string matrix_kind_name(MatrixKind k);

struct MatrixSpec {
  MatrixKind kind = MatrixKind::Sparse;
  double target_cond = 7e5;              // Conditioned
  int rank = 20;                         // LowRank
  double density = 0.1;                  // Sparse
  std::vector<int> boost_columns{1, 23, 45};  // Sparse, 1-based

  void validate(int n_scrap) const;
};

enum class NoiseTarget { ScrapMass, SlagMass, Feon, SteelMass, FSteel };

inline constexpr std::array<NoiseTarget, 5> kAllNoiseTargets = {
    NoiseTarget::ScrapMass, NoiseTarget::SlagMass, NoiseTarget::Feon,
    NoiseTarget::SteelMass, NoiseTarget::FSteel};

std::string noise_target_name(NoiseTarget t);

/// Multiplicative noise std per target, as a fraction (0.2 = 20 %).
struct NoiseLevels {
  std::array<double, 5> level{0, 0, 0, 0, 0};

  double& operator[](NoiseTarget t) { return level[static_cast<int>(t)]; }
  double operator[](NoiseTarget t) const { return level[static_cast<int>(t)]; }
  bool any() const;
};

// Ranges the per-heat process variables are drawn from.
inline constexpr double kMhmMin = 280.0, kMhmMax = 290.0;        // [t]
inline constexpr double kFhmCuPpmMin = 20.0, kFhmCuPpmMax = 30.0;
inline constexpr double kFhmCrPpmMin = 50.0, kFhmCrPpmMax = 200.0;
inline constexpr double kMslagMin = 20.0, kMslagMax = 30.0;      // [t]
inline constexpr double kMsteelMin = 340.0, kMsteelMax = 350.0;  // [t]
inline constexpr double kFeonPctMin = 20.0, kFeonPctMax = 30.0;  // [%]

// Long-run state noise variance is kStateNoiseVarScale * mean^2.
inline constexpr double kStateNoiseVarScale = 5.0;

// Partition-parameter prior (steel/slag elements).
inline constexpr double kPartitionMeanC1 = 9.7;
inline constexpr double kPartitionMeanC2 = 0.01;

// Steel-fraction measurement noise std per element [ppm].
inline constexpr double kObsStdCuPpm = 10.0;
inline constexpr double kObsStdCrPpm = 5.0;

struct UtParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
  void validate(int n) const;
};

struct ScenarioConfig {
  Element element = Element::Cu;
  int n_scrap = 45;
  int T = 20000;
  double total_scrap_mass = 70.0;  // [t] per heat
  MatrixSpec matrix;
  NoiseLevels noise;
  std::uint64_t seed = 1;
  double gamma = std::numbers::ln2 / 1000.0;
  double obs_noise_std_cu = kObsStdCuPpm * kPpm;  // fraction units
  double obs_noise_std_cr = kObsStdCrPpm * kPpm;
  int burn_in = 2000;
  UtParams ut;
  double kf_init_cov_scale = 1.0;
  double ukf_init_cov_scale = 1.0;

  double obs_noise_std() const {
    return element == Element::Cu ? obs_noise_std_cu : obs_noise_std_cr;
  }
  void validate() const;
};

/// Noise-free generating trajectories and process variables.
struct TruthSeries {
  Eigen::MatrixXd alpha;      // T x n, fractions
  Eigen::MatrixXd partition;  // T x 2 (steel/slag elements), else 0 x 0
  Eigen::MatrixXd m_scrap;    // T x n [t]
  Eigen::VectorXd m_hm;       // [t]
  Eigen::VectorXd f_hm;       // fraction
  Eigen::VectorXd m_slag;     // [t]
  Eigen::VectorXd m_steel;    // [t]
  Eigen::VectorXd f_feon;     // percent
  Eigen::VectorXd f_steel;    // fraction, noise-free
};

struct MatrixMeta {
  int rank = 0;
  double cond = 0.0;
};

struct Dataset {
  ScenarioConfig config;
  Eigen::VectorXd prior_mean;     // q, the drawn scrap-type prior [fraction]
  std::vector<HeatRecord> heats;  // estimator view (injected noise applied)
  TruthSeries truth;
  MatrixMeta matrix_meta;

  int n_scrap() const { return static_cast<int>(prior_mean.size()); }
  int heats_count() const { return static_cast<int>(heats.size()); }
};

/// Scrap-type prior means q: thirds of the types drawn uniformly from
/// 200-1000 ppm, 1000-2000 ppm and 2000-5000 ppm. n must be divisible by 3.
Eigen::VectorXd generate_priors(int n_scrap, std::mt19937_64& rng);

/// Mixing trajectory started at q with per-step Beta noise moment-matched to
/// (q, Q_diag). Row t is the state of heat t; row 0 equals q.
Eigen::MatrixXd generate_alpha_trajectory(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& Q_diag,
                                          double gamma, int T,
                                          std::mt19937_64& rng);

/// Partition-parameter trajectory [c1, c2] with Gamma state noise; starts at
/// the prior mean.
Eigen::MatrixXd generate_partition_trajectory(const Eigen::Vector2d& q_c,
                                              const Eigen::Vector2d& Q_c,
                                              double gamma, int T,
                                              std::mt19937_64& rng);

/// Cyclic single-type charges: heat t uses total mass of type (t mod n).
Eigen::MatrixXd gen_mass_matrix_identity(int T, int n, double total);

/// Full-rank matrix built from an SVD factorization with a geometric
/// singular-value spectrum spanning target_cond, shifted entrywise to be
/// nonnegative and row-rescaled to the total mass. The shift and rescale move
/// the spectrum, so the achieved condition number is reported separately.
Eigen::MatrixXd gen_mass_matrix_conditioned(int T, int n, double target_cond,
                                            double total,
                                            std::mt19937_64& rng);

/// Internal SVD construction stage of the conditioned generator, before the
/// nonnegativity shift and row rescale; its condition number equals
/// target_cond up to factorization error. Exposed for verification.
Eigen::MatrixXd conditioned_spectrum_stage(int T, int n, double target_cond,
                                           std::mt19937_64& rng);

/// Rank-r product of two uniform(0,1) factors, row-rescaled to the total.
Eigen::MatrixXd gen_mass_matrix_lowrank(int T, int n, int rank, double total,
                                        std::mt19937_64& rng);

/// Bernoulli(density) sparsity mask with uniform(0,1) magnitudes, at least one
/// nonzero per row, an additive uniform(1.5,3) boost on the boost columns, and
/// rows rescaled to the total.
Eigen::MatrixXd gen_mass_matrix_sparse(int T, int n, double density,
                                       const std::vector<int>& boost_columns,
                                       double total, std::mt19937_64& rng);

Eigen::MatrixXd gen_mass_matrix(const MatrixSpec& spec, int T, int n,
                                double total, std::mt19937_64& rng);

/// Achieved numerical rank (singular values above 1e-10 * sigma_max) and
/// condition number of a mass matrix.
MatrixMeta matrix_metadata(const Eigen::MatrixXd& m);

struct ProcessVars {
  Eigen::VectorXd m_hm;
  Eigen::VectorXd f_hm_cu;  // fraction
  Eigen::VectorXd f_hm_cr;  // fraction
  Eigen::VectorXd m_slag;
  Eigen::VectorXd m_steel;
  Eigen::VectorXd f_feon;  // percent
};

ProcessVars generate_process_vars(int T, std::mt19937_64& rng);

/// Noise-free steel fraction for one heat by elemental mass balance.
double compute_f_steel(const Eigen::VectorXd& m_scrap,
                       const Eigen::VectorXd& alpha,
                       const Eigen::Vector2d& partition, double m_hm,
                       double f_hm, double m_slag, double m_steel,
                       double f_feon, ElementKind kind);

/// value -> max(0, (1 + xi) * value) with xi = level * z.
double noisy_value(double value, double xi);
double apply_multiplicative_noise(double value, double level,
                                  std::mt19937_64& rng);
Eigen::VectorXd apply_multiplicative_noise(const Eigen::VectorXd& values,
                                           double level, std::mt19937_64& rng);

/// Full synthetic dataset for one element: truth trajectories, process
/// variables, mass matrix, measured steel fractions, and the estimator view
/// with any configured multiplicative noise applied. Pure function of config.
Dataset build_dataset(const ScenarioConfig& config);

/// Prior mean vector of the partition parameters.
Eigen::Vector2d partition_prior_mean();
/// State-noise variance of the partition parameters.
Eigen::Vector2d partition_prior_variance();

}  // namespace scrapest
