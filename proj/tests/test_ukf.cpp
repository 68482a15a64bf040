#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scrapest/kalman.hpp"
#include "scrapest/model.hpp"
#include "scrapest/sensitivity.hpp"
#include "scrapest/ukf.hpp"

using namespace scrapest;

namespace {

GaussianBelief random_belief(int n, unsigned seed) {
  std::srand(seed);
  GaussianBelief b;
  b.mean = Eigen::VectorXd::Random(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  b.cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  return b;
}

}  // namespace

TEST_SUITE("ukf") {

TEST_CASE("one-dimensional sigma points, lambda zero") {
  GaussianBelief b;
  b.mean = Eigen::VectorXd::Zero(1);
  b.cov = Eigen::MatrixXd::Identity(1, 1);
  UtParams ut;  // alpha 1, beta 2, kappa 0 -> lambda = 0
  CHECK(ut.lambda(1) == 0.0);
  const SigmaSet s = sigma_points(b, ut);
  REQUIRE(s.points.cols() == 3);
  CHECK(s.points(0, 0) == 0.0);
  CHECK(s.points(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.points(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.weights_mean[0] == 0.0);
  CHECK(s.weights_mean[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.weights_mean[2] == doctest::Approx(0.5).epsilon(1e-15));
  // center covariance weight carries the beta correction: 0 + 1 - 1 + 2
  CHECK(s.weights_cov[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sigma points reproduce the source moments") {
  const GaussianBelief b = random_belief(5, 2024);
  const SigmaSet s = sigma_points(b, UtParams{});
  REQUIRE(s.points.cols() == 11);

  CHECK(std::abs(s.weights_mean.sum() - 1.0) <= 1e-12);

  const Eigen::VectorXd mean = s.points * s.weights_mean;
  CHECK((mean - b.mean).cwiseAbs().maxCoeff() <
        1e-10 * std::max(1.0, b.mean.cwiseAbs().maxCoeff()));

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < s.points.cols(); ++i) {
    const Eigen::VectorXd d = s.points.col(i) - mean;
    cov += s.weights_cov[i] * d * d.transpose();
  }
  CHECK((cov - b.cov).cwiseAbs().maxCoeff() <
        1e-8 * b.cov.cwiseAbs().maxCoeff());
}

TEST_CASE("sigma points survive a borderline-singular covariance") {
  GaussianBelief b;
  b.mean = Eigen::Vector2d(0.5, 0.5);
  b.cov = Eigen::Vector2d(1.0, 1e-30).asDiagonal();
  const SigmaSet s = sigma_points(b, UtParams{});
  CHECK(s.points.allFinite());
  CHECK(std::abs(s.weights_mean.sum() - 1.0) <= 1e-12);
}

TEST_CASE("unscented transform parameter validation") {
  UtParams ut;
  ut.kappa = -2.0;  // n + lambda = -1 for n = 1
  CHECK_THROWS_AS(ut.validate(1), std::invalid_argument);
  ut = UtParams{};
  ut.alpha = 0.0;
  CHECK_THROWS_AS(ut.validate(5), std::invalid_argument);
}

TEST_CASE("time update shares the linear prediction algebra") {
  const GaussianBelief b = random_belief(4, 77);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.001);
  const Eigen::VectorXd Q = Eigen::VectorXd::Constant(4, 5e-6);
  const GaussianBelief a = ukf_predict(b, 0.01, q, Q);
  const GaussianBelief k = kf_predict(b, 0.01, q, Q);
  CHECK(a.mean == k.mean);
  CHECK(a.cov == k.cov);
}

TEST_CASE("partition prior is a fixed point of the time update") {
  GaussianBelief b;
  b.mean = Eigen::VectorXd::Constant(47, 0.001);
  b.mean[45] = 9.7;
  b.mean[46] = 0.01;
  b.cov = Eigen::MatrixXd::Identity(47, 47);
  Eigen::VectorXd q = b.mean;
  Eigen::VectorXd Q = Eigen::VectorXd::Constant(47, 1e-6);
  const GaussianBelief out = ukf_predict(b, std::numbers::ln2 / 1000.0, q, Q);
  CHECK(out.mean[45] == doctest::Approx(9.7).epsilon(1e-12));
  CHECK(out.mean[46] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("measurement update matches the linear filter on a linear problem") {
  // no slag: the observation reduces to m.alpha + m_hm f_hm, which is
  // affine in the state, so the unscented update must agree with the
  // linear update on the alpha block.
  const int n = 3;
  HeatRecord heat;
  heat.m_scrap = Eigen::Vector3d(30.0, 25.0, 15.0);
  heat.m_hm = 285.0;
  heat.f_hm = 100e-6;
  heat.m_slag = 0.0;
  heat.m_steel = 345.0;
  heat.f_feon = 25.0;
  heat.f_steel_meas = 300e-6;

  GaussianBelief kf_b;
  kf_b.mean = Eigen::Vector3d(0.001, 0.002, 0.003);
  // Sigma points sit at mean +- sqrt((n+2) * var); the variances must be
  // small enough that every point stays inside [0,1], otherwise support
  // clamping kicks in and the observation is no longer affine in the state.
  kf_b.cov = Eigen::Vector3d(5e-9, 4e-9, 3e-9).asDiagonal();

  GaussianBelief ukf_b;
  ukf_b.mean = Eigen::VectorXd::Zero(n + 2);
  ukf_b.mean.head(n) = kf_b.mean;
  ukf_b.cov = Eigen::MatrixXd::Zero(n + 2, n + 2);
  ukf_b.cov.topLeftCorner(n, n) = kf_b.cov;

  const double y_obs = heat.m_steel * heat.f_steel_meas;
  const double H = observation_noise_variance(5e-6, heat.m_steel);

  const auto u = ukf_update(ukf_b, heat, y_obs, H, UtParams{});
  const auto k =
      kf_update(kf_b, heat.m_scrap, y_obs - heat.m_hm * heat.f_hm, H);

  CHECK((u.belief.mean.head(n) - k.belief.mean).cwiseAbs().maxCoeff() <
        1e-6 * k.belief.mean.cwiseAbs().maxCoeff());
  CHECK((u.belief.cov.topLeftCorner(n, n) - k.belief.cov)
            .cwiseAbs()
            .maxCoeff() < 1e-6 * k.belief.cov.cwiseAbs().maxCoeff());
  CHECK(u.y_pred ==
        doctest::Approx(k.y_pred + heat.m_hm * heat.f_hm).epsilon(1e-9));
}

TEST_CASE("zero-variance belief ignores the observation") {
  const int n = 3;
  HeatRecord heat;
  heat.m_scrap = Eigen::Vector3d(30.0, 25.0, 15.0);
  heat.m_hm = 285.0;
  heat.f_hm = 100e-6;
  heat.m_slag = 22.0;
  heat.m_steel = 345.0;
  heat.f_feon = 25.0;
  GaussianBelief b;
  b.mean = Eigen::VectorXd::Zero(n + 2);
  b.mean << 0.001, 0.002, 0.003, 9.7, 0.01;
  b.cov = Eigen::MatrixXd::Zero(n + 2, n + 2);
  const auto r = ukf_update(b, heat, 0.5, 1e-6, UtParams{});
  CHECK((r.belief.mean - b.mean).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("update variance strictly exceeds the measurement noise") {
  const int n = 3;
  HeatRecord heat;
  heat.m_scrap = Eigen::Vector3d(30.0, 25.0, 15.0);
  heat.m_hm = 285.0;
  heat.f_hm = 100e-6;
  heat.m_slag = 22.0;
  heat.m_steel = 345.0;
  heat.f_feon = 25.0;
  GaussianBelief b;
  b.mean = Eigen::VectorXd::Zero(n + 2);
  b.mean << 0.001, 0.002, 0.003, 9.7, 0.01;
  b.cov = Eigen::VectorXd::Constant(n + 2, 1e-4).asDiagonal();
  const double H = 1e-6;
  const auto r = ukf_update(b, heat, 0.3, H, UtParams{});
  CHECK(r.innovation_variance > H);
  CHECK_THROWS_AS(ukf_update(b, heat, 0.3, 0.0, UtParams{}),
                  std::invalid_argument);
}

TEST_CASE("support clamping is inactive for interior beliefs") {
  // tiny covariance keeps every sigma point inside the feasible region, so
  // the update must equal a manual unscented update without any clamping.
  const int n = 2;
  HeatRecord heat;
  heat.m_scrap = Eigen::Vector2d(40.0, 30.0);
  heat.m_hm = 285.0;
  heat.f_hm = 100e-6;
  heat.m_slag = 22.0;
  heat.m_steel = 345.0;
  heat.f_feon = 25.0;
  GaussianBelief b;
  b.mean = Eigen::VectorXd(n + 2);
  b.mean << 0.001, 0.002, 9.7, 0.01;
  b.cov = Eigen::VectorXd::Constant(n + 2, 1e-8).asDiagonal();
  const double y_obs = 0.08, H = 1e-6;

  const auto got = ukf_update(b, heat, y_obs, H, UtParams{});

  const SigmaSet s = sigma_points(b, UtParams{});
  Eigen::VectorXd ys(s.points.cols());
  for (int i = 0; i < s.points.cols(); ++i) {
    const Eigen::VectorXd x = s.points.col(i);
    ys[i] = observe_nonlinear(heat.m_scrap, x.head(n), x[n], x[n + 1],
                              heat.m_hm, heat.f_hm, heat.m_slag, heat.m_steel,
                              heat.f_feon);
  }
  const double y_pred = s.weights_mean.dot(ys);
  double S = H;
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(n + 2);
  for (int i = 0; i < s.points.cols(); ++i) {
    const double dy = ys[i] - y_pred;
    S += s.weights_cov[i] * dy * dy;
    cross += s.weights_cov[i] * dy * (s.points.col(i) - b.mean);
  }
  const Eigen::VectorXd mean = b.mean + cross / S * (y_obs - y_pred);

  CHECK(got.y_pred == doctest::Approx(y_pred).epsilon(1e-12));
  CHECK(got.innovation_variance == doctest::Approx(S).epsilon(1e-12));
  CHECK((got.belief.mean - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("extended noise moments and default initialization") {
  ScenarioConfig cfg;
  cfg.element = Element::Cr;
  cfg.T = 10;
  cfg.burn_in = 0;
  const Dataset ds = build_dataset(cfg);
  const NoiseSpec spec = ukf_noise_spec(ds);
  REQUIRE(spec.size() == 47);
  CHECK(spec.mean.head(45) == ds.prior_mean);
  CHECK(spec.mean[45] == 9.7);
  CHECK(spec.mean[46] == 0.01);
  CHECK(spec.variance[45] == doctest::Approx(5.0 * 9.7 * 9.7));
  CHECK(spec.variance[46] == doctest::Approx(5.0 * 0.01 * 0.01));
  CHECK(spec.support[0] == NoiseSupport::UnitInterval);
  CHECK(spec.support[45] == NoiseSupport::NonNegative);
  CHECK(spec.support[46] == NoiseSupport::NonNegative);

  const GaussianBelief init = ukf_default_init(ds);
  CHECK(init.mean == spec.mean);
  CHECK((Eigen::VectorXd(init.cov.diagonal()) - spec.variance)
            .cwiseAbs()
            .maxCoeff() < 1e-18);
}

TEST_CASE("full unscented run keeps its beliefs healthy") {
  ScenarioConfig cfg;
  cfg.element = Element::Cr;
  cfg.T = 2000;
  cfg.burn_in = 200;
  cfg.seed = 3;
  const Dataset ds = build_dataset(cfg);
  const ModelParams params = filter_params(ds);

  bool all_valid = true;
  const FilterOutput out =
      run_ukf(ds, params, cfg.ut, ukf_default_init(ds),
              [&](int, const GaussianBelief&, const GaussianBelief& upd) {
                all_valid = all_valid && upd.is_psd() && upd.is_symmetric();
              });
  CHECK(all_valid);
  REQUIRE(out.heats_count() == cfg.T);
  CHECK(out.n_scrap == 45);
  CHECK(out.updated_mean.cols() == 47);  // alpha block plus c1, c2

  const ErrorStats st =
      error_stats(prediction_errors(out, ds), cfg.burn_in);
  CHECK(st.std_ppm > 3.0);
  CHECK(st.std_ppm < 9.0);

  // y_obs for the partitioned element is the elemental mass in steel
  for (int t = 0; t < cfg.T; t += 211) {
    const double y_obs = ds.heats[t].m_steel * ds.heats[t].f_steel_meas;
    CHECK(out.y_pred[t] + out.innovation[t] ==
          doctest::Approx(y_obs).epsilon(1e-12));
  }
}

TEST_CASE("unscented filter refuses a steel-only dataset") {
  ScenarioConfig cfg;
  cfg.element = Element::Cu;
  cfg.T = 5;
  cfg.burn_in = 0;
  const Dataset ds = build_dataset(cfg);
  ModelParams params = filter_params(ds);
  GaussianBelief init;
  init.mean = Eigen::VectorXd::Constant(47, 0.001);
  init.cov = Eigen::MatrixXd::Identity(47, 47);
  CHECK_THROWS_AS(run_ukf(ds, params, UtParams{}, init),
                  std::invalid_argument);
}

}  // TEST_SUITE
