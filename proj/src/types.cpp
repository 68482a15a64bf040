#include "scrapest/types.hpp"

#include <cmath>
#include <stdexcept>

namespace scrapest {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void NoiseSpec::validate() const {
  require(mean.size() > 0, "NoiseSpec: empty mean");
  require(variance.size() == mean.size(),
          "NoiseSpec: mean/variance size mismatch");
  require(static_cast<Eigen::Index>(support.size()) == mean.size(),
          "NoiseSpec: mean/support size mismatch");
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double m = mean[i];
    const double v = variance[i];
    require(std::isfinite(m) && std::isfinite(v),
            "NoiseSpec: non-finite moment at component " + std::to_string(i));
    require(v >= 0.0,
            "NoiseSpec: negative variance at component " + std::to_string(i));
    if (support[i] == NoiseSupport::UnitInterval) {
      require(m > 0.0 && m < 1.0, "NoiseSpec: unit-interval mean outside "
                                  "(0,1) at component " + std::to_string(i));
      // Beta feasibility; variance 0 degenerates to the mean and is allowed.
      require(v < m * (1.0 - m),
              "NoiseSpec: variance not matchable by a Beta at component " +
                  std::to_string(i));
    } else {
      require(m >= 0.0, "NoiseSpec: negative mean on nonnegative support at "
                        "component " + std::to_string(i));
    }
  }
}

void ModelParams::validate() const {
  require(gamma > 0.0 && gamma <= 1.0, "ModelParams: gamma outside (0,1]");
  require(obs_noise_std > 0.0, "ModelParams: obs_noise_std must be positive");
  noise.validate();
}

void HeatRecord::validate() const {
  require(m_scrap.size() > 0, "HeatRecord: empty scrap vector");
  require((m_scrap.array() >= 0.0).all(), "HeatRecord: negative scrap mass");
  require(m_hm >= 0.0, "HeatRecord: negative hot metal mass");
  require(m_slag >= 0.0, "HeatRecord: negative slag mass");
  require(m_steel > 0.0, "HeatRecord: steel mass must be positive");
  require(f_hm >= 0.0 && f_hm <= 1.0, "HeatRecord: f_hm outside [0,1]");
  require(f_feon >= 0.0, "HeatRecord: negative FeO_n content");
  require(f_steel_meas >= 0.0, "HeatRecord: negative measured fraction");
}

}  // namespace scrapest
