#pragma once

#include <Eigen/Dense>

#include "scrapest/types.hpp"

namespace scrapest {

/// One step of the scrap-yard mixing dynamics:
/// state' = (1 - gamma) * state + gamma * noise.
Eigen::VectorXd state_transition(const Eigen::VectorXd& state,
                                 const Eigen::VectorXd& noise, double gamma);

/// Elemental mass carried into the steel by the scrap charge [t].
double observe_linear(const Eigen::VectorXd& m_scrap,
                      const Eigen::VectorXd& alpha);

/// Elemental mass reporting to the steel when the element partitions between
/// steel and slag with ratio l = c1 + c2 * f_feon:
///   (m_scrap . alpha + m_hm * f_hm) / (1 + l * m_slag / m_steel)
double observe_nonlinear(const Eigen::VectorXd& m_scrap,
                         const Eigen::VectorXd& alpha, double c1, double c2,
                         double m_hm, double f_hm, double m_slag,
                         double m_steel, double f_feon);

double observe_nonlinear(const Eigen::VectorXd& m_scrap,
                         const Eigen::VectorXd& alpha,
                         const Eigen::Vector2d& partition,
                         const HeatRecord& heat);

/// Variance of the observed elemental mass given the steel-fraction
/// measurement std: (obs_noise_std * m_steel)^2.
double observation_noise_variance(double obs_noise_std, double m_steel);

}  // namespace scrapest
