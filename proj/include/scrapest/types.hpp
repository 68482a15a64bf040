#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace scrapest {

inline constexpr char kVersion[] = "0.1.0";

// Elemental fractions are dimensionless internally; ppm only at I/O boundaries.
inline constexpr double kPpm = 1e-6;

/// Dimensionless mass fraction with ppm conversion helpers for I/O.
struct Fraction {
  double value = 0.0;

  static Fraction from_ppm(double ppm) { return Fraction{ppm * kPpm}; }
  double ppm() const { return value / kPpm; }
  bool in_unit_interval() const { return value >= 0.0 && value <= 1.0; }
};

enum class ElementKind {
  SteelOnly,  // element reports fully to steel (linear observation)
  SteelSlag,  // element partitions between steel and slag
};

enum class NoiseSupport {
  UnitInterval,  // moment-matched Beta
  NonNegative,   // moment-matched Gamma
};

/// First two moments plus support tag per component of the long-run state noise.
struct NoiseSpec {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  std::vector<NoiseSupport> support;

  Eigen::Index size() const { return mean.size(); }
  void validate() const;  // throws std::invalid_argument on violation
};

struct ModelParams {
  double gamma = 0.0;          // state mixing rate, in (0, 1]
  NoiseSpec noise;             // long-run state noise moments
  double obs_noise_std = 0.0;  // steel-fraction measurement std (fraction units)
  ElementKind element_kind = ElementKind::SteelOnly;

  void validate() const;
};

/// One heat's charge recipe and measurements, as the estimator sees them.
struct HeatRecord {
  Eigen::VectorXd m_scrap;    // scrap mass per type [t]
  double m_hm = 0.0;          // hot metal mass [t]
  double f_hm = 0.0;          // hot metal elemental fraction
  double m_slag = 0.0;        // slag mass [t]
  double m_steel = 0.0;       // liquid steel mass [t]
  double f_feon = 0.0;        // slag FeO_n content [percent]
  double f_steel_meas = 0.0;  // measured steel elemental fraction

  void validate() const;
};

}  // namespace scrapest
