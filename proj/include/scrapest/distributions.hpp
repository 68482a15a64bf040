#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>

#include "scrapest/types.hpp"

namespace scrapest {

/// Thrown when requested moments cannot be matched on the requested support.
struct InfeasibleMoments : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BetaParams {
  double a = 0.0;
  double b = 0.0;
};

struct GammaParams {
  double shape = 0.0;
  double scale = 0.0;
};

/// Beta shape parameters with the given mean and variance.
/// Feasibility requires mean in (0,1) and variance in (0, mean*(1-mean)).
BetaParams beta_params_from_moments(double mean, double variance);

/// Gamma shape/scale with the given mean and variance (mean > 0, variance > 0).
GammaParams gamma_params_from_moments(double mean, double variance);

double sample_beta(const BetaParams& p, std::mt19937_64& rng);
double sample_gamma(const GammaParams& p, std::mt19937_64& rng);

/// One draw of the long-run state noise vector. Unit-interval components use
/// a moment-matched Beta, nonnegative components a moment-matched Gamma.
/// A zero-variance component degenerates to its mean.
Eigen::VectorXd sample_state_noise(const NoiseSpec& spec, std::mt19937_64& rng);

}  // namespace scrapest
