#include "scrapest/model.hpp"

#include <stdexcept>

namespace scrapest {

Eigen::VectorXd state_transition(const Eigen::VectorXd& state,
                                 const Eigen::VectorXd& noise, double gamma) {
  if (state.size() != noise.size()) {
    throw std::invalid_argument("state_transition: state/noise size mismatch");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("state_transition: gamma outside [0,1]");
  }
  return (1.0 - gamma) * state + gamma * noise;
}

double observe_linear(const Eigen::VectorXd& m_scrap,
                      const Eigen::VectorXd& alpha) {
  if (m_scrap.size() != alpha.size()) {
    throw std::invalid_argument("observe_linear: size mismatch");
  }
  return m_scrap.dot(alpha);
}

double observe_nonlinear(const Eigen::VectorXd& m_scrap,
                         const Eigen::VectorXd& alpha, double c1, double c2,
                         double m_hm, double f_hm, double m_slag,
                         double m_steel, double f_feon) {
  if (m_scrap.size() != alpha.size()) {
    throw std::invalid_argument("observe_nonlinear: size mismatch");
  }
  if (!(m_steel > 0.0)) {
    throw std::invalid_argument("observe_nonlinear: m_steel must be > 0");
  }
  const double partition_ratio = c1 + c2 * f_feon;
  const double denom = 1.0 + partition_ratio * m_slag / m_steel;
  return (m_scrap.dot(alpha) + m_hm * f_hm) / denom;
}

double observe_nonlinear(const Eigen::VectorXd& m_scrap,
                         const Eigen::VectorXd& alpha,
                         const Eigen::Vector2d& partition,
                         const HeatRecord& heat) {
  return observe_nonlinear(m_scrap, alpha, partition[0], partition[1],
                           heat.m_hm, heat.f_hm, heat.m_slag, heat.m_steel,
                           heat.f_feon);
}

double observation_noise_variance(double obs_noise_std, double m_steel) {
  const double s = obs_noise_std * m_steel;
  return s * s;
}

}  // namespace scrapest
