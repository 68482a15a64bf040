#include <doctest.h>

#include <cmath>
#include <random>

#include "scrapest/distributions.hpp"
#include "scrapest/rng.hpp"

using namespace scrapest;

namespace {

double beta_mean(const BetaParams& p) { return p.a / (p.a + p.b); }

double beta_var(const BetaParams& p) {
  const double s = p.a + p.b;
  return p.a * p.b / (s * s * (s + 1.0));
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("beta moment matching hits hand-computed shapes") {
  // nu = mean(1-mean)/var - 1; a = mean*nu, b = (1-mean)*nu.
  auto p = beta_params_from_moments(0.5, 1.0 / 12.0);
  CHECK(p.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.b == doctest::Approx(1.0).epsilon(1e-12));

  p = beta_params_from_moments(0.5, 0.125);
  CHECK(p.a == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_var(p) == doctest::Approx(0.125).epsilon(1e-12));

  // The production parameterization: mean 1000 ppm, variance 5*mean^2.
  p = beta_params_from_moments(0.001, 5e-6);
  CHECK(p.a == doctest::Approx(0.19880).epsilon(1e-4));
  CHECK(p.b == doctest::Approx(198.60).epsilon(1e-4));
}

TEST_CASE("beta moment matching round-trips random feasible pairs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> um(0.01, 0.99);
  std::uniform_real_distribution<double> uf(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double mean = um(rng);
    const double variance = uf(rng) * mean * (1.0 - mean);
    const auto q = beta_params_from_moments(mean, variance);
    CHECK(beta_mean(q) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(beta_var(q) == doctest::Approx(variance).epsilon(1e-12));
  }
}

TEST_CASE("beta moment matching rejects infeasible requests") {
  CHECK_THROWS_AS(beta_params_from_moments(0.0, 0.01), InfeasibleMoments);
  CHECK_THROWS_AS(beta_params_from_moments(1.0, 0.01), InfeasibleMoments);
  CHECK_THROWS_AS(beta_params_from_moments(-0.1, 0.01), InfeasibleMoments);
  // variance at or above mean*(1-mean) has no Beta representation
  CHECK_THROWS_AS(beta_params_from_moments(0.5, 0.25), InfeasibleMoments);
  CHECK_THROWS_AS(beta_params_from_moments(0.5, 0.3), InfeasibleMoments);
  CHECK_THROWS_AS(beta_params_from_moments(0.5, 0.0), InfeasibleMoments);
}

TEST_CASE("gamma moment matching") {
  // shape = mean^2/var, scale = var/mean: mean 9.7 with var 5*9.7^2
  // gives shape 1/5, scale 48.5.
  const auto p = gamma_params_from_moments(9.7, 5.0 * 9.7 * 9.7);
  CHECK(p.shape == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.scale == doctest::Approx(48.5).epsilon(1e-12));
  CHECK(p.shape * p.scale == doctest::Approx(9.7).epsilon(1e-12));
  CHECK(p.shape * p.scale * p.scale ==
        doctest::Approx(5.0 * 9.7 * 9.7).epsilon(1e-12));

  CHECK_THROWS_AS(gamma_params_from_moments(0.0, 1.0), InfeasibleMoments);
  CHECK_THROWS_AS(gamma_params_from_moments(1.0, 0.0), InfeasibleMoments);
  CHECK_THROWS_AS(gamma_params_from_moments(-1.0, 1.0), InfeasibleMoments);
}

TEST_CASE("samplers stay on their supports") {
  auto rng = substream(7, "test/support");
  const auto bp = beta_params_from_moments(0.001, 5e-6);
  const auto gp = gamma_params_from_moments(9.7, 5.0 * 9.7 * 9.7);
  for (int i = 0; i < 20000; ++i) {
    const double b = sample_beta(bp, rng);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(sample_gamma(gp, rng) >= 0.0);
  }
}

TEST_CASE("beta sampler reproduces requested moments") {
  auto rng = substream(11, "test/beta-moments");
  const auto p = beta_params_from_moments(0.001, 5e-6);
  const int n = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_beta(p, rng);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.001).epsilon(0.01));
  CHECK(var == doctest::Approx(5e-6).epsilon(0.03));
}

TEST_CASE("gamma sampler reproduces requested moments") {
  auto rng = substream(12, "test/gamma-moments");
  const auto p = gamma_params_from_moments(9.7, 5.0 * 9.7 * 9.7);
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_gamma(p, rng);
  CHECK(sum / n == doctest::Approx(9.7).epsilon(0.01));
}

TEST_CASE("state noise vector honors supports and degenerate components") {
  NoiseSpec spec;
  spec.mean = Eigen::Vector3d(0.001, 0.5, 9.7);
  spec.variance = Eigen::Vector3d(5e-6, 0.0, 5.0 * 9.7 * 9.7);
  spec.support = {NoiseSupport::UnitInterval, NoiseSupport::UnitInterval,
                  NoiseSupport::NonNegative};
  auto rng = substream(3, "test/state-noise");
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd d = sample_state_noise(spec, rng);
    REQUIRE(d.size() == 3);
    CHECK(d[0] >= 0.0);
    CHECK(d[0] <= 1.0);
    CHECK(d[1] == 0.5);  // zero variance collapses to the mean
    CHECK(d[2] >= 0.0);
  }
}

TEST_CASE("state noise validates its spec") {
  NoiseSpec bad;
  bad.mean = Eigen::Vector2d(0.5, 0.5);
  bad.variance = Eigen::Vector2d(0.3, 0.01);  // 0.3 >= 0.25 cap
  bad.support = {NoiseSupport::UnitInterval, NoiseSupport::UnitInterval};
  auto rng = substream(4, "test/bad-spec");
  CHECK_THROWS_AS(sample_state_noise(bad, rng), std::invalid_argument);
}

TEST_CASE("named substreams are deterministic and distinct") {
  auto a1 = substream(99, "alpha/cu");
  auto a2 = substream(99, "alpha/cu");
  auto b = substream(99, "alpha/cr");
  CHECK(a1() == a2());
  CHECK(a1() != b());  // different names decouple the streams
}

}  // TEST_SUITE
