#include "scrapest/ukf.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scrapest/model.hpp"

namespace scrapest {

namespace {

// Observation of one sigma state through the steel/slag balance. Components
// are pulled back onto their supports for the evaluation only; the belief
// itself is never clamped.
double sigma_observation(const Eigen::VectorXd& x, int n_scrap,
                         const Eigen::VectorXd& m_scrap, double m_hm,
                         double f_hm, double m_slag, double m_steel,
                         double f_feon) {
  const Eigen::VectorXd alpha =
      x.head(n_scrap).cwiseMax(0.0).cwiseMin(1.0);
  const double c1 = std::max(0.0, x[n_scrap]);
  const double c2 = std::max(0.0, x[n_scrap + 1]);
  return observe_nonlinear(m_scrap, alpha, c1, c2, m_hm, f_hm, m_slag,
                           m_steel, f_feon);
}

Eigen::VectorXd observe_sigma_set(const SigmaSet& sig, int n_scrap,
                                  const Eigen::VectorXd& m_scrap, double m_hm,
                                  double f_hm, double m_slag, double m_steel,
                                  double f_feon) {
  Eigen::VectorXd y(sig.points.cols());
  for (Eigen::Index i = 0; i < sig.points.cols(); ++i) {
    y[i] = sigma_observation(sig.points.col(i), n_scrap, m_scrap, m_hm, f_hm,
                             m_slag, m_steel, f_feon);
  }
  return y;
}

struct SigmaUpdate {
  GaussianBelief belief;
  double y_pred = 0.0;
  double innovation_variance = 0.0;
};

// Scalar measurement update from a sigma set and its observation values.
SigmaUpdate update_from_sigma(const GaussianBelief& belief,
                              const SigmaSet& sig, const Eigen::VectorXd& y,
                              double y_obs, double H_t) {
  if (H_t <= 0.0) {
    throw std::invalid_argument("ukf_update: noise variance must be > 0");
  }
  SigmaUpdate out;
  out.y_pred = sig.weights_mean.dot(y);
  double s = H_t;
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(belief.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double dy = y[i] - out.y_pred;
    const double wc = sig.weights_cov[i];
    s += wc * dy * dy;
    cross.noalias() += (wc * dy) * (sig.points.col(i) - belief.mean);
  }
  if (s <= 0.0) {
    throw std::runtime_error("ukf_update: nonpositive innovation variance");
  }
  out.innovation_variance = s;
  out.belief.mean = belief.mean + (cross / s) * (y_obs - out.y_pred);
  // With gain K = cross / s the covariance update K s K^T reduces to the
  // rank-1 term cross cross^T / s.
  Eigen::MatrixXd cov = belief.cov - (cross * cross.transpose()) / s;
  out.belief.cov = 0.5 * (cov + cov.transpose());
  return out;
}

}  // namespace

SigmaSet sigma_points(const GaussianBelief& belief, const UtParams& params) {
  const int n = static_cast<int>(belief.size());
  if (n < 1) throw std::invalid_argument("sigma_points: empty belief");
  params.validate(n);
  const double lambda = params.lambda(n);
  const double scale = n + lambda;

  const Eigen::MatrixXd sym = 0.5 * (belief.cov + belief.cov.transpose());
  const double jitter_unit = std::max(sym.trace() / n, 1e-30);
  Eigen::MatrixXd root;
  bool ok = false;
  for (double mult : {0.0, 1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd shifted = scale * sym;
    shifted.diagonal().array() += scale * mult * jitter_unit;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      root = llt.matrixL();
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw std::runtime_error(
        "sigma_points: covariance not factorizable even with jitter");
  }

  SigmaSet sig;
  sig.points.resize(n, 2 * n + 1);
  sig.points.col(0) = belief.mean;
  for (int i = 0; i < n; ++i) {
    sig.points.col(1 + i) = belief.mean + root.col(i);
    sig.points.col(1 + n + i) = belief.mean - root.col(i);
  }
  const double wi = 1.0 / (2.0 * scale);
  sig.weights_mean = Eigen::VectorXd::Constant(2 * n + 1, wi);
  sig.weights_cov = Eigen::VectorXd::Constant(2 * n + 1, wi);
  sig.weights_mean[0] = lambda / scale;
  sig.weights_cov[0] =
      lambda / scale + (1.0 - params.alpha * params.alpha + params.beta);
  return sig;
}

GaussianBelief ukf_predict(const GaussianBelief& belief, double gamma,
                           const Eigen::VectorXd& q,
                           const Eigen::VectorXd& Q_diag) {
  return kf_predict(belief, gamma, q, Q_diag);
}

UkfUpdateResult ukf_update(const GaussianBelief& belief,
                           const HeatRecord& heat, double y_obs, double H_t,
                           const UtParams& params) {
  const int n_scrap = static_cast<int>(belief.size()) - 2;
  if (n_scrap < 1) {
    throw std::invalid_argument("ukf_update: state must hold scrap + c1, c2");
  }
  if (heat.m_scrap.size() != n_scrap) {
    throw std::invalid_argument("ukf_update: heat/state size mismatch");
  }
  const SigmaSet sig = sigma_points(belief, params);
  const Eigen::VectorXd y =
      observe_sigma_set(sig, n_scrap, heat.m_scrap, heat.m_hm, heat.f_hm,
                        heat.m_slag, heat.m_steel, heat.f_feon);
  SigmaUpdate core = update_from_sigma(belief, sig, y, y_obs, H_t);
  UkfUpdateResult res;
  res.belief = std::move(core.belief);
  res.y_pred = core.y_pred;
  res.innovation_variance = core.innovation_variance;
  return res;
}

FilterOutput run_ukf(const Dataset& dataset, const ModelParams& params,
                     const UtParams& ut, const GaussianBelief& init,
                     const StepObserver& observer) {
  params.validate();
  init.validate();
  if (params.element_kind != ElementKind::SteelSlag) {
    throw std::invalid_argument("run_ukf: unscented filter is steel/slag");
  }
  const int T = dataset.heats_count();
  const int n_scrap = dataset.n_scrap();
  const int n_state = n_scrap + 2;
  if (init.size() != n_state) {
    throw std::invalid_argument("run_ukf: init size != n_scrap + 2");
  }
  if (params.noise.size() != n_state) {
    throw std::invalid_argument("run_ukf: noise spec size != n_scrap + 2");
  }
  ut.validate(n_state);

  FilterOutput out;
  out.n_scrap = n_scrap;
  out.predicted_mean.resize(T, n_state);
  out.updated_mean.resize(T, n_state);
  out.predicted_var.resize(T, n_state);
  out.updated_var.resize(T, n_state);
  out.y_pred.resize(T);
  out.innovation.resize(T);
  out.innovation_variance.resize(T);
  out.f_steel_pred.resize(T);

  GaussianBelief belief = init;
  for (int t = 0; t < T; ++t) {
    const HeatRecord& h = dataset.heats[t];
    const GaussianBelief pred = kf_predict(belief, params.gamma,
                                           params.noise.mean,
                                           params.noise.variance);
    const SigmaSet sig = sigma_points(pred, ut);

    const Eigen::VectorXd y_heat =
        observe_sigma_set(sig, n_scrap, h.m_scrap, h.m_hm, h.f_hm, h.m_slag,
                          h.m_steel, h.f_feon);
    const double y_obs = h.m_steel * h.f_steel_meas;
    const double H_t =
        observation_noise_variance(params.obs_noise_std, h.m_steel);
    SigmaUpdate core = update_from_sigma(pred, sig, y_heat, y_obs, H_t);

    // Same sigma set pushed through the noise-free process variables; see
    // run_kf for why the steel-fraction prediction is scored this way.
    const Eigen::VectorXd m_scrap_true =
        dataset.truth.m_scrap.row(t).transpose();
    const Eigen::VectorXd y_truth = observe_sigma_set(
        sig, n_scrap, m_scrap_true, dataset.truth.m_hm[t],
        dataset.truth.f_hm[t], dataset.truth.m_slag[t],
        dataset.truth.m_steel[t], dataset.truth.f_feon[t]);
    out.f_steel_pred[t] =
        sig.weights_mean.dot(y_truth) / dataset.truth.m_steel[t];

    out.predicted_mean.row(t) = pred.mean.transpose();
    out.predicted_var.row(t) = pred.cov.diagonal().transpose();
    out.updated_mean.row(t) = core.belief.mean.transpose();
    out.updated_var.row(t) = core.belief.cov.diagonal().transpose();
    out.y_pred[t] = core.y_pred;
    out.innovation[t] = y_obs - core.y_pred;
    out.innovation_variance[t] = core.innovation_variance;

    if (observer) observer(t, pred, core.belief);
    belief = std::move(core.belief);
  }
  out.final_belief = belief;
  return out;
}

NoiseSpec ukf_noise_spec(const Dataset& dataset) {
  const int n = dataset.n_scrap();
  NoiseSpec spec;
  spec.mean.resize(n + 2);
  spec.variance.resize(n + 2);
  spec.mean.head(n) = dataset.prior_mean;
  spec.variance.head(n) =
      kStateNoiseVarScale * dataset.prior_mean.array().square();
  spec.mean.tail(2) = partition_prior_mean();
  spec.variance.tail(2) = partition_prior_variance();
  spec.support.assign(n + 2, NoiseSupport::UnitInterval);
  spec.support[n] = NoiseSupport::NonNegative;
  spec.support[n + 1] = NoiseSupport::NonNegative;
  return spec;
}

GaussianBelief ukf_default_init(const Dataset& dataset, double cov_scale) {
  const NoiseSpec spec = ukf_noise_spec(dataset);
  GaussianBelief init;
  init.mean = spec.mean;
  init.cov = (cov_scale * spec.variance).asDiagonal();
  return init;
}

}  // namespace scrapest
