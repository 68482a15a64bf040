#pragma once

#include <Eigen/Dense>

#include <functional>

#include "scrapest/synth.hpp"
#include "scrapest/types.hpp"

namespace scrapest {

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index size() const { return mean.size(); }

  /// max |cov - cov^T| entry.
  double symmetry_defect() const;
  bool is_symmetric(double tol_factor = 1e-10) const;
  /// min eigenvalue >= -tol_factor * trace, checked via a shifted Cholesky.
  bool is_psd(double tol_factor = 1e-8) const;
  void validate() const;
};

/// Time update for state' = (1-gamma) state + gamma eta, eta ~ (q, diag(Q)):
/// mean' = (1-gamma) mean + gamma q, cov' = (1-gamma)^2 cov + gamma^2 diag(Q).
GaussianBelief kf_predict(const GaussianBelief& belief, double gamma,
                          const Eigen::VectorXd& q,
                          const Eigen::VectorXd& Q_diag);

struct KfUpdateResult {
  GaussianBelief belief;
  double y_pred = 0.0;
  double innovation_variance = 0.0;
};

/// Scalar-observation measurement update, Joseph-form covariance.
KfUpdateResult kf_update(const GaussianBelief& belief,
                         const Eigen::VectorXd& m_t, double y_obs, double H_t);

/// Per-heat filter trace. Means and covariance diagonals are stored for every
/// heat; full covariances are available through the step observer.
struct FilterOutput {
  int n_scrap = 0;  // leading state components are scrap fractions
  Eigen::MatrixXd predicted_mean;  // T x n_state
  Eigen::MatrixXd updated_mean;    // T x n_state
  Eigen::MatrixXd predicted_var;   // T x n_state, cov diagonal
  Eigen::MatrixXd updated_var;     // T x n_state, cov diagonal
  Eigen::VectorXd y_pred;          // one-step observation prediction [t]
  Eigen::VectorXd innovation;      // y_obs - y_pred [t]
  Eigen::VectorXd innovation_variance;
  Eigen::VectorXd f_steel_pred;  // one-step steel-fraction prediction
  GaussianBelief final_belief;

  int heats_count() const { return static_cast<int>(y_pred.size()); }
};

using StepObserver = std::function<void(
    int t, const GaussianBelief& predicted, const GaussianBelief& updated)>;

/// Runs the linear filter over a steel-only dataset.
/// y_obs = m_steel * f_steel_meas - m_hm * f_hm, H = (obs_std * m_steel)^2.
/// f_steel_pred is the one-step state prediction pushed through the noise-free
/// charge recipe, so it measures state quality rather than echoing injected
/// input noise; with no injected noise it equals (y_pred + m_hm f_hm)/m_steel.
FilterOutput run_kf(const Dataset& dataset, const ModelParams& params,
                    const GaussianBelief& init,
                    const StepObserver& observer = {});

/// Filter initialization at the scrap prior: mean q, cov diag(Q) * scale.
GaussianBelief kf_default_init(const Dataset& dataset, double cov_scale = 1.0);

}  // namespace scrapest
