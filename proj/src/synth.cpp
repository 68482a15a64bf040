#include "scrapest/synth.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "scrapest/distributions.hpp"
#include "scrapest/model.hpp"
#include "scrapest/rng.hpp"

namespace scrapest {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Prior draw ranges per scrap-type group, fraction units.
constexpr double kGroupLoMin = 200e-6, kGroupLoMax = 1000e-6;
constexpr double kGroupMidMin = 1000e-6, kGroupMidMax = 2000e-6;
constexpr double kGroupHiMin = 2000e-6, kGroupHiMax = 5000e-6;

}  // namespace

std::string element_name(Element e) {
  return e == Element::Cu ? "cu" : "cr";
}

ElementKind element_kind(Element e) {
  return e == Element::Cu ? ElementKind::SteelOnly : ElementKind::SteelSlag;
}

std::string matrix_kind_name(MatrixKind k) {
  switch (k) {
    case MatrixKind::Identity: return "identity";
    case MatrixKind::Conditioned: return "conditioned";
    case MatrixKind::LowRank: return "lowrank";
    case MatrixKind::Sparse: return "sparse";
  }
  return "unknown";
}

std::string noise_target_name(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::ScrapMass: return "scrap_mass";
    case NoiseTarget::SlagMass: return "slag_mass";
    case NoiseTarget::Feon: return "feon";
    case NoiseTarget::SteelMass: return "steel_mass";
    case NoiseTarget::FSteel: return "f_steel";
  }
  return "unknown";
}

bool NoiseLevels::any() const {
  for (double l : level) {
    if (l > 0.0) return true;
  }
  return false;
}

void MatrixSpec::validate(int n_scrap) const {
  switch (kind) {
    case MatrixKind::Identity:
      break;
    case MatrixKind::Conditioned:
      require(target_cond >= 1.0, "matrix: target_cond must be >= 1");
      break;
    case MatrixKind::LowRank:
      require(rank >= 1 && rank <= n_scrap,
              "matrix: rank outside [1, n_scrap]");
      break;
    case MatrixKind::Sparse:
      require(density > 0.0 && density <= 1.0,
              "matrix: density outside (0,1]");
      for (int c : boost_columns) {
        require(c >= 1 && c <= n_scrap,
                "matrix: boost column " + std::to_string(c) +
                    " outside [1, n_scrap]");
      }
      break;
  }
}

void UtParams::validate(int n) const {
  require(alpha > 0.0, "ut: alpha must be > 0");
  require(beta >= 0.0, "ut: beta must be >= 0");
  require(n + lambda(n) > 0.0, "ut: n + lambda must be > 0");
}

void ScenarioConfig::validate() const {
  require(n_scrap >= 3 && n_scrap % 3 == 0,
          "scenario: n_scrap must be a positive multiple of 3");
  require(T >= 1, "scenario: T must be >= 1");
  require(total_scrap_mass > 0.0, "scenario: total_scrap_mass must be > 0");
  require(gamma > 0.0 && gamma <= 1.0, "scenario: gamma outside (0,1]");
  require(obs_noise_std_cu > 0.0 && obs_noise_std_cr > 0.0,
          "scenario: observation noise stds must be > 0");
  require(burn_in >= 0 && burn_in < T, "scenario: burn_in outside [0,T)");
  require(kf_init_cov_scale > 0.0 && ukf_init_cov_scale > 0.0,
          "scenario: init covariance scales must be > 0");
  for (double l : noise.level) {
    require(l >= 0.0, "scenario: negative noise level");
  }
  matrix.validate(n_scrap);
  ut.validate(n_scrap + 2);
}

Eigen::VectorXd generate_priors(int n_scrap, std::mt19937_64& rng) {
  require(n_scrap >= 3 && n_scrap % 3 == 0,
          "generate_priors: n_scrap must be a positive multiple of 3");
  const int g = n_scrap / 3;
  std::uniform_real_distribution<double> lo(kGroupLoMin, kGroupLoMax);
  std::uniform_real_distribution<double> mid(kGroupMidMin, kGroupMidMax);
  std::uniform_real_distribution<double> hi(kGroupHiMin, kGroupHiMax);
  Eigen::VectorXd q(n_scrap);
  for (int i = 0; i < n_scrap; ++i) {
    if (i < g) {
      q[i] = lo(rng);
    } else if (i < 2 * g) {
      q[i] = mid(rng);
    } else {
      q[i] = hi(rng);
    }
  }
  return q;
}

Eigen::MatrixXd generate_alpha_trajectory(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& Q_diag,
                                          double gamma, int T,
                                          std::mt19937_64& rng) {
  require(T >= 1, "alpha trajectory: T must be >= 1");
  const Eigen::Index n = q.size();
  NoiseSpec spec{q, Q_diag,
                 std::vector<NoiseSupport>(n, NoiseSupport::UnitInterval)};
  spec.validate();
  Eigen::MatrixXd alpha(T, n);
  alpha.row(0) = q.transpose();
  Eigen::VectorXd state = q;
  for (int t = 1; t < T; ++t) {
    state = state_transition(state, sample_state_noise(spec, rng), gamma);
    alpha.row(t) = state.transpose();
  }
  return alpha;
}

Eigen::MatrixXd generate_partition_trajectory(const Eigen::Vector2d& q_c,
                                              const Eigen::Vector2d& Q_c,
                                              double gamma, int T,
                                              std::mt19937_64& rng) {
  require(T >= 1, "partition trajectory: T must be >= 1");
  NoiseSpec spec{q_c, Q_c,
                 std::vector<NoiseSupport>(2, NoiseSupport::NonNegative)};
  spec.validate();
  Eigen::MatrixXd c(T, 2);
  c.row(0) = q_c.transpose();
  Eigen::VectorXd state = q_c;
  for (int t = 1; t < T; ++t) {
    state = state_transition(state, sample_state_noise(spec, rng), gamma);
    c.row(t) = state.transpose();
  }
  return c;
}

Eigen::MatrixXd gen_mass_matrix_identity(int T, int n, double total) {
  require(T >= 1 && n >= 1, "identity matrix: T and n must be >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(T, n);
  for (int t = 0; t < T; ++t) {
    m(t, t % n) = total;
  }
  return m;
}

Eigen::MatrixXd conditioned_spectrum_stage(int T, int n, double target_cond,
                                           std::mt19937_64& rng) {
  require(T >= n && n >= 1, "conditioned matrix: need T >= n >= 1");
  require(target_cond >= 1.0, "conditioned matrix: target_cond must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g1(T, n);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < n; ++j) g1(t, j) = gauss(rng);
  }
  Eigen::MatrixXd g2(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g2(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr1(g1);
  Eigen::MatrixXd u = qr1.householderQ() * Eigen::MatrixXd::Identity(T, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr2(g2);
  Eigen::MatrixXd v = qr2.householderQ() * Eigen::MatrixXd::Identity(n, n);
  // Geometric spectrum from 1 down to 1/target_cond.
  Eigen::VectorXd sv(n);
  for (int i = 0; i < n; ++i) {
    const double expo = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
    sv[i] = std::pow(target_cond, -expo);
  }
  return u * sv.asDiagonal() * v.transpose();
}

Eigen::MatrixXd gen_mass_matrix_conditioned(int T, int n, double target_cond,
                                            double total,
                                            std::mt19937_64& rng) {
  Eigen::MatrixXd m = conditioned_spectrum_stage(T, n, target_cond, rng);
  const double mn = m.minCoeff();
  if (mn < 0.0) m.array() -= mn;
  for (int t = 0; t < T; ++t) {
    const double s = m.row(t).sum();
    require(s > 0.0, "conditioned matrix: zero row after shift");
    m.row(t) *= total / s;
  }
  return m;
}

Eigen::MatrixXd gen_mass_matrix_lowrank(int T, int n, int rank, double total,
                                        std::mt19937_64& rng) {
  require(T >= 1 && n >= 1, "lowrank matrix: T and n must be >= 1");
  require(rank >= 1 && rank <= n, "lowrank matrix: rank outside [1, n]");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::MatrixXd f(T, rank);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < rank; ++j) f(t, j) = u01(rng);
  }
  Eigen::MatrixXd g(rank, n);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = u01(rng);
  }
  Eigen::MatrixXd m = f * g;
  for (int t = 0; t < T; ++t) {
    const double s = m.row(t).sum();
    require(s > 0.0, "lowrank matrix: zero row");
    m.row(t) *= total / s;
  }
  return m;
}

Eigen::MatrixXd gen_mass_matrix_sparse(int T, int n, double density,
                                       const std::vector<int>& boost_columns,
                                       double total, std::mt19937_64& rng) {
  require(T >= 1 && n >= 1, "sparse matrix: T and n must be >= 1");
  require(density > 0.0 && density <= 1.0,
          "sparse matrix: density outside (0,1]");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Boost magnitudes dominate the background entries so the favored
  // columns carry most of each charge; U(1.5,3) lands the 20000x45
  // matrix at condition number ~25.
  std::uniform_real_distribution<double> boost(1.5, 3.0);
  std::uniform_int_distribution<int> any_col(0, n - 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(T, n);
  for (int t = 0; t < T; ++t) {
    bool any = false;
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < density) {
        m(t, j) = u01(rng);
        any = true;
      }
    }
    if (!any) {
      m(t, any_col(rng)) = u01(rng);  // keep every heat charged
    }
    for (int c : boost_columns) {
      m(t, c - 1) += boost(rng);
    }
    m.row(t) *= total / m.row(t).sum();
  }
  return m;
}

Eigen::MatrixXd gen_mass_matrix(const MatrixSpec& spec, int T, int n,
                                double total, std::mt19937_64& rng) {
  spec.validate(n);
  switch (spec.kind) {
    case MatrixKind::Identity:
      return gen_mass_matrix_identity(T, n, total);
    case MatrixKind::Conditioned:
      return gen_mass_matrix_conditioned(T, n, spec.target_cond, total, rng);
    case MatrixKind::LowRank:
      return gen_mass_matrix_lowrank(T, n, spec.rank, total, rng);
    case MatrixKind::Sparse:
      return gen_mass_matrix_sparse(T, n, spec.density, spec.boost_columns,
                                    total, rng);
  }
  throw std::logic_error("gen_mass_matrix: unhandled kind");
}

MatrixMeta matrix_metadata(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  MatrixMeta meta;
  if (sv.size() == 0 || sv[0] <= 0.0) return meta;
  const double cutoff = 1e-10 * sv[0];
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++meta.rank;
  }
  const double smallest = sv[sv.size() - 1];
  meta.cond = smallest > 0.0 ? sv[0] / smallest
                             : std::numeric_limits<double>::infinity();
  return meta;
}

ProcessVars generate_process_vars(int T, std::mt19937_64& rng) {
  require(T >= 1, "process vars: T must be >= 1");
  std::uniform_real_distribution<double> hm(kMhmMin, kMhmMax);
  std::uniform_real_distribution<double> fcu(kFhmCuPpmMin * kPpm,
                                             kFhmCuPpmMax * kPpm);
  std::uniform_real_distribution<double> fcr(kFhmCrPpmMin * kPpm,
                                             kFhmCrPpmMax * kPpm);
  std::uniform_real_distribution<double> slag(kMslagMin, kMslagMax);
  std::uniform_real_distribution<double> steel(kMsteelMin, kMsteelMax);
  std::uniform_real_distribution<double> feon(kFeonPctMin, kFeonPctMax);
  ProcessVars p;
  p.m_hm.resize(T);
  p.f_hm_cu.resize(T);
  p.f_hm_cr.resize(T);
  p.m_slag.resize(T);
  p.m_steel.resize(T);
  p.f_feon.resize(T);
  for (int t = 0; t < T; ++t) {
    p.m_hm[t] = hm(rng);
    p.f_hm_cu[t] = fcu(rng);
    p.f_hm_cr[t] = fcr(rng);
    p.m_slag[t] = slag(rng);
    p.m_steel[t] = steel(rng);
    p.f_feon[t] = feon(rng);
  }
  return p;
}

double compute_f_steel(const Eigen::VectorXd& m_scrap,
                       const Eigen::VectorXd& alpha,
                       const Eigen::Vector2d& partition, double m_hm,
                       double f_hm, double m_slag, double m_steel,
                       double f_feon, ElementKind kind) {
  require(m_steel > 0.0, "compute_f_steel: m_steel must be > 0");
  if (kind == ElementKind::SteelOnly) {
    return (observe_linear(m_scrap, alpha) + m_hm * f_hm) / m_steel;
  }
  return observe_nonlinear(m_scrap, alpha, partition[0], partition[1], m_hm,
                           f_hm, m_slag, m_steel, f_feon) /
         m_steel;
}

double noisy_value(double value, double xi) {
  return std::max(0.0, (1.0 + xi) * value);
}

double apply_multiplicative_noise(double value, double level,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  return noisy_value(value, level * z(rng));
}

Eigen::VectorXd apply_multiplicative_noise(const Eigen::VectorXd& values,
                                           double level,
                                           std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out[i] = noisy_value(values[i], level * z(rng));
  }
  return out;
}

Eigen::Vector2d partition_prior_mean() {
  return Eigen::Vector2d(kPartitionMeanC1, kPartitionMeanC2);
}

Eigen::Vector2d partition_prior_variance() {
  return Eigen::Vector2d(
      kStateNoiseVarScale * kPartitionMeanC1 * kPartitionMeanC1,
      kStateNoiseVarScale * kPartitionMeanC2 * kPartitionMeanC2);
}

Dataset build_dataset(const ScenarioConfig& config) {
  config.validate();
  const int T = config.T;
  const int n = config.n_scrap;
  const std::string elem = element_name(config.element);
  const ElementKind kind = element_kind(config.element);

  Dataset ds;
  ds.config = config;

  // Independent substreams per generated quantity; see rng.hpp.
  auto rng_q = substream(config.seed, "priors/" + elem);
  ds.prior_mean = generate_priors(n, rng_q);
  const Eigen::VectorXd Q_diag =
      kStateNoiseVarScale * ds.prior_mean.array().square();

  auto rng_alpha = substream(config.seed, "alpha/" + elem);
  ds.truth.alpha = generate_alpha_trajectory(ds.prior_mean, Q_diag,
                                             config.gamma, T, rng_alpha);

  if (kind == ElementKind::SteelSlag) {
    auto rng_part = substream(config.seed, "partition");
    ds.truth.partition = generate_partition_trajectory(
        partition_prior_mean(), partition_prior_variance(), config.gamma, T,
        rng_part);
  }

  auto rng_matrix = substream(config.seed, "matrix");
  ds.truth.m_scrap = gen_mass_matrix(config.matrix, T, n,
                                     config.total_scrap_mass, rng_matrix);
  ds.matrix_meta = matrix_metadata(ds.truth.m_scrap);

  auto rng_proc = substream(config.seed, "process");
  ProcessVars pv = generate_process_vars(T, rng_proc);
  ds.truth.m_hm = pv.m_hm;
  ds.truth.f_hm = config.element == Element::Cu ? pv.f_hm_cu : pv.f_hm_cr;
  ds.truth.m_slag = pv.m_slag;
  ds.truth.m_steel = pv.m_steel;
  ds.truth.f_feon = pv.f_feon;

  ds.truth.f_steel.resize(T);
  for (int t = 0; t < T; ++t) {
    const Eigen::Vector2d part =
        kind == ElementKind::SteelSlag
            ? Eigen::Vector2d(ds.truth.partition.row(t).transpose())
            : Eigen::Vector2d(Eigen::Vector2d::Zero());
    ds.truth.f_steel[t] = compute_f_steel(
        ds.truth.m_scrap.row(t).transpose(), ds.truth.alpha.row(t).transpose(),
        part, ds.truth.m_hm[t], ds.truth.f_hm[t], ds.truth.m_slag[t],
        ds.truth.m_steel[t], ds.truth.f_feon[t], kind);
  }

  // Estimator view. Injected-noise substreams always draw the same standard
  // normals and scale them by the level, so runs that differ only in one
  // level stay paired draw-for-draw everywhere else.
  auto rng_scrap = substream(config.seed, "inject/scrap_mass");
  auto rng_slag = substream(config.seed, "inject/slag_mass");
  auto rng_feon = substream(config.seed, "inject/feon");
  auto rng_steel = substream(config.seed, "inject/steel_mass");
  auto rng_fsteel = substream(config.seed, "inject/f_steel");
  auto rng_meas = substream(config.seed, "measure/" + elem);
  std::normal_distribution<double> z01(0.0, 1.0);

  const double meas_std = config.obs_noise_std();
  ds.heats.resize(T);
  for (int t = 0; t < T; ++t) {
    HeatRecord& h = ds.heats[t];
    h.m_scrap = apply_multiplicative_noise(
        ds.truth.m_scrap.row(t).transpose(),
        config.noise[NoiseTarget::ScrapMass], rng_scrap);
    h.m_hm = ds.truth.m_hm[t];
    h.f_hm = ds.truth.f_hm[t];
    h.m_slag = apply_multiplicative_noise(
        ds.truth.m_slag[t], config.noise[NoiseTarget::SlagMass], rng_slag);
    h.f_feon = apply_multiplicative_noise(
        ds.truth.f_feon[t], config.noise[NoiseTarget::Feon], rng_feon);
    h.m_steel = apply_multiplicative_noise(
        ds.truth.m_steel[t], config.noise[NoiseTarget::SteelMass], rng_steel);
    const double f_reported = apply_multiplicative_noise(
        ds.truth.f_steel[t], config.noise[NoiseTarget::FSteel], rng_fsteel);
    h.f_steel_meas = std::max(0.0, f_reported + meas_std * z01(rng_meas));
  }
  return ds;
}

}  // namespace scrapest
