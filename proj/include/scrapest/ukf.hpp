#pragma once

#include <Eigen/Dense>

#include "scrapest/kalman.hpp"
#include "scrapest/synth.hpp"
#include "scrapest/types.hpp"

namespace scrapest {

/// Scaled unscented transform points and weights for an n-dim belief.
struct SigmaSet {
  Eigen::MatrixXd points;        // n x (2n+1), column 0 is the mean
  Eigen::VectorXd weights_mean;  // 2n+1
  Eigen::VectorXd weights_cov;   // 2n+1
};

/// 2n+1 sigma points at mean and mean +- columns of sqrt((n+lambda) cov).
/// The matrix square root is a Cholesky factor; if factorization fails the
/// diagonal is jittered with escalating multiples (1e-12, 1e-10, 1e-8) of
/// trace/n before giving up.
SigmaSet sigma_points(const GaussianBelief& belief, const UtParams& params);

/// Time update of the extended state; the dynamics are affine, so this is
/// exactly the linear predict.
GaussianBelief ukf_predict(const GaussianBelief& belief, double gamma,
                           const Eigen::VectorXd& q,
                           const Eigen::VectorXd& Q_diag);

struct UkfUpdateResult {
  GaussianBelief belief;
  double y_pred = 0.0;
  double innovation_variance = 0.0;
};

/// Measurement update through the steel/slag observation. State layout is
/// [alpha(n_scrap); c1; c2]. Sigma states are clamped to their supports
/// (alpha to [0,1], c to >= 0) only for evaluating the observation.
UkfUpdateResult ukf_update(const GaussianBelief& belief, const HeatRecord& heat,
                           double y_obs, double H_t, const UtParams& params);

/// Runs the unscented filter over a steel/slag dataset.
/// y_obs = m_steel * f_steel_meas, H = (obs_std * m_steel)^2.
/// f_steel_pred propagates the predicted belief through the noise-free
/// process variables (see run_kf).
FilterOutput run_ukf(const Dataset& dataset, const ModelParams& params,
                     const UtParams& ut, const GaussianBelief& init,
                     const StepObserver& observer = {});

/// Extended-state noise moments [q; q_c] / [Q; Q_c] for a dataset.
NoiseSpec ukf_noise_spec(const Dataset& dataset);

/// Filter initialization at the extended prior.
GaussianBelief ukf_default_init(const Dataset& dataset, double cov_scale = 1.0);

}  // namespace scrapest
