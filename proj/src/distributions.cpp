#include "scrapest/distributions.hpp"

#include <cmath>
#include <string>

namespace scrapest {

BetaParams beta_params_from_moments(double mean, double variance) {
  if (!(mean > 0.0 && mean < 1.0)) {
    throw InfeasibleMoments("beta moments: mean " + std::to_string(mean) +
                            " outside (0,1)");
  }
  const double cap = mean * (1.0 - mean);
  if (!(variance > 0.0 && variance < cap)) {
    throw InfeasibleMoments("beta moments: variance " +
                            std::to_string(variance) +
                            " outside (0, mean*(1-mean))");
  }
  // nu = mean(1-mean)/variance - 1; a = mean*nu, b = (1-mean)*nu.
  const double nu = cap / variance - 1.0;
  return BetaParams{mean * nu, (1.0 - mean) * nu};
}

GammaParams gamma_params_from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0)) {
    throw InfeasibleMoments("gamma moments: mean and variance must be > 0");
  }
  // shape = mean^2/variance, scale = variance/mean.
  return GammaParams{mean * mean / variance, variance / mean};
}

double sample_beta(const BetaParams& p, std::mt19937_64& rng) {
  std::gamma_distribution<double> gx(p.a, 1.0);
  std::gamma_distribution<double> gy(p.b, 1.0);
  const double x = gx(rng);
  const double y = gy(rng);
  const double s = x + y;
  if (s <= 0.0) return p.a / (p.a + p.b);  // both underflowed; use the mean
  return x / s;
}

double sample_gamma(const GammaParams& p, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(p.shape, p.scale);
  return g(rng);
}

Eigen::VectorXd sample_state_noise(const NoiseSpec& spec,
                                   std::mt19937_64& rng) {
  spec.validate();
  Eigen::VectorXd draw(spec.size());
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double m = spec.mean[i];
    const double v = spec.variance[i];
    if (v == 0.0) {
      draw[i] = m;  // degenerate component
    } else if (spec.support[i] == NoiseSupport::UnitInterval) {
      draw[i] = sample_beta(beta_params_from_moments(m, v), rng);
    } else {
      draw[i] = sample_gamma(gamma_params_from_moments(m, v), rng);
    }
  }
  return draw;
}

}  // namespace scrapest
