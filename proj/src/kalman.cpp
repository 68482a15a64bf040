#include "scrapest/kalman.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "scrapest/model.hpp"

namespace scrapest {

double GaussianBelief::symmetry_defect() const {
  if (cov.size() == 0) return 0.0;
  return (cov - cov.transpose()).cwiseAbs().maxCoeff();
}

bool GaussianBelief::is_symmetric(double tol_factor) const {
  const double scale = std::abs(cov.trace());
  return symmetry_defect() <= tol_factor * scale + 1e-300;
}

bool GaussianBelief::is_psd(double tol_factor) const {
  if (cov.rows() != cov.cols()) return false;
  if (cov.size() == 0) return true;
  // LLT of cov + shift*I succeeds iff min eigenvalue >= -shift (up to
  // roundoff), so a successful factorization certifies eigenvalues down
  // to -tol_factor * trace.
  const double shift = tol_factor * std::abs(cov.trace()) + 1e-30;
  Eigen::MatrixXd shifted =
      0.5 * (cov + cov.transpose()) +
      shift * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  return llt.info() == Eigen::Success;
}

void GaussianBelief::validate() const {
  if (cov.rows() != cov.cols()) {
    throw std::invalid_argument("belief: covariance must be square");
  }
  if (cov.rows() != mean.size()) {
    throw std::invalid_argument("belief: mean/covariance size mismatch");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw std::invalid_argument("belief: non-finite entries");
  }
  if (!is_symmetric()) {
    throw std::invalid_argument("belief: covariance not symmetric");
  }
}

GaussianBelief kf_predict(const GaussianBelief& belief, double gamma,
                          const Eigen::VectorXd& q,
                          const Eigen::VectorXd& Q_diag) {
  if (q.size() != belief.size() || Q_diag.size() != belief.size()) {
    throw std::invalid_argument("kf_predict: size mismatch");
  }
  const double keep = 1.0 - gamma;
  GaussianBelief out;
  out.mean = keep * belief.mean + gamma * q;
  out.cov = (keep * keep) * belief.cov;
  out.cov.diagonal() += (gamma * gamma) * Q_diag;
  return out;
}

KfUpdateResult kf_update(const GaussianBelief& belief,
                         const Eigen::VectorXd& m_t, double y_obs,
                         double H_t) {
  if (m_t.size() != belief.size()) {
    throw std::invalid_argument("kf_update: size mismatch");
  }
  if (H_t <= 0.0) {
    throw std::invalid_argument("kf_update: noise variance must be > 0");
  }
  KfUpdateResult res;
  res.y_pred = m_t.dot(belief.mean);
  const Eigen::VectorXd pm = belief.cov * m_t;  // P m
  const double s = m_t.dot(pm) + H_t;
  res.innovation_variance = s;
  const Eigen::VectorXd gain = pm / s;

  res.belief.mean = belief.mean + gain * (y_obs - res.y_pred);
  // Joseph form: (I - K m^T) P (I - K m^T)^T + K H K^T keeps the update
  // positive semidefinite under roundoff.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(belief.size(), belief.size());
  a.noalias() -= gain * m_t.transpose();
  Eigen::MatrixXd cov = a * belief.cov * a.transpose();
  cov.noalias() += (gain * H_t) * gain.transpose();
  res.belief.cov = 0.5 * (cov + cov.transpose());
  return res;
}

FilterOutput run_kf(const Dataset& dataset, const ModelParams& params,
                    const GaussianBelief& init, const StepObserver& observer) {
  params.validate();
  init.validate();
  if (params.element_kind != ElementKind::SteelOnly) {
    throw std::invalid_argument("run_kf: linear filter is steel-only");
  }
  const int T = dataset.heats_count();
  const int n = dataset.n_scrap();
  if (init.size() != n) {
    throw std::invalid_argument("run_kf: init size != n_scrap");
  }
  if (params.noise.size() != n) {
    throw std::invalid_argument("run_kf: noise spec size != n_scrap");
  }

  FilterOutput out;
  out.n_scrap = n;
  out.predicted_mean.resize(T, n);
  out.updated_mean.resize(T, n);
  out.predicted_var.resize(T, n);
  out.updated_var.resize(T, n);
  out.y_pred.resize(T);
  out.innovation.resize(T);
  out.innovation_variance.resize(T);
  out.f_steel_pred.resize(T);

  GaussianBelief belief = init;
  for (int t = 0; t < T; ++t) {
    const HeatRecord& h = dataset.heats[t];
    const GaussianBelief pred =
        kf_predict(belief, params.gamma, params.noise.mean,
                   params.noise.variance);

    const double y_obs = h.m_steel * h.f_steel_meas - h.m_hm * h.f_hm;
    const double H_t = observation_noise_variance(params.obs_noise_std,
                                                  h.m_steel);
    KfUpdateResult upd = kf_update(pred, h.m_scrap, y_obs, H_t);

    out.predicted_mean.row(t) = pred.mean.transpose();
    out.predicted_var.row(t) = pred.cov.diagonal().transpose();
    out.updated_mean.row(t) = upd.belief.mean.transpose();
    out.updated_var.row(t) = upd.belief.cov.diagonal().transpose();
    out.y_pred[t] = upd.y_pred;
    out.innovation[t] = y_obs - upd.y_pred;
    out.innovation_variance[t] = upd.innovation_variance;
    // Evaluate the prediction on the noise-free charge recipe so the error
    // reflects the state estimate, not the injected input noise.
    out.f_steel_pred[t] =
        (dataset.truth.m_scrap.row(t).dot(pred.mean) +
         dataset.truth.m_hm[t] * dataset.truth.f_hm[t]) /
        dataset.truth.m_steel[t];

    if (observer) observer(t, pred, upd.belief);
    belief = std::move(upd.belief);
  }
  out.final_belief = belief;
  return out;
}

GaussianBelief kf_default_init(const Dataset& dataset, double cov_scale) {
  GaussianBelief init;
  init.mean = dataset.prior_mean;
  init.cov = (cov_scale * kStateNoiseVarScale *
              dataset.prior_mean.array().square())
                 .matrix()
                 .asDiagonal();
  return init;
}

}  // namespace scrapest
