#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "scrapest/presets.hpp"
#include "scrapest/sensitivity.hpp"

using namespace scrapest;

namespace {

ScenarioConfig quick_config(Element e, std::uint64_t seed = 21) {
  ScenarioConfig c;
  c.element = e;
  c.T = 1200;
  c.burn_in = 120;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("prediction errors are reported in ppm against the measurement") {
  ScenarioConfig cfg = quick_config(Element::Cu);
  cfg.T = 300;
  cfg.burn_in = 0;
  const Dataset ds = build_dataset(cfg);
  FilterOutput out;
  out.y_pred.setZero(cfg.T);  // heats_count() is keyed off y_pred
  out.f_steel_pred.resize(cfg.T);

  SUBCASE("echoing the measurement zeroes the error") {
    for (int t = 0; t < cfg.T; ++t)
      out.f_steel_pred[t] = ds.heats[t].f_steel_meas;
    const Eigen::VectorXd e = prediction_errors(out, ds);
    CHECK(e.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("a constant offset shifts the bias, not the spread") {
    for (int t = 0; t < cfg.T; ++t)
      out.f_steel_pred[t] = ds.heats[t].f_steel_meas + 3e-6;
    const ErrorStats st = error_stats(prediction_errors(out, ds), 0);
    CHECK(st.bias_ppm == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(st.std_ppm == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("length mismatch is rejected") {
    out.y_pred.setZero(10);
    out.f_steel_pred.resize(10);
    CHECK_THROWS_AS(prediction_errors(out, ds), std::invalid_argument);
  }
}

TEST_CASE("a perfect state oracle is left with the measurement noise") {
  ScenarioConfig cfg = quick_config(Element::Cu);
  cfg.T = 8000;
  cfg.burn_in = 0;
  const Dataset ds = build_dataset(cfg);
  FilterOutput out;
  out.y_pred.setZero(cfg.T);
  out.f_steel_pred = ds.truth.f_steel;  // oracle prediction
  const ErrorStats st = error_stats(prediction_errors(out, ds), 0);
  CHECK(st.std_ppm == doctest::Approx(10.0).epsilon(0.05));
  CHECK(std::abs(st.bias_ppm) < 0.5);
}

TEST_CASE("error statistics, hand-checked") {
  SUBCASE("constant series has zero spread") {
    const Eigen::VectorXd e = Eigen::VectorXd::Constant(100, 4.2);
    const ErrorStats st = error_stats(e, 10);
    CHECK(st.bias_ppm == doctest::Approx(4.2).epsilon(1e-12));
    CHECK(std::abs(st.std_ppm) < 1e-12);  // accumulation residue only
    CHECK(st.n_heats == 90);
    CHECK(st.burn_in == 10);
  }
  SUBCASE("alternating unit series matches the closed-form sample std") {
    Eigen::VectorXd e(20000);
    for (int i = 0; i < e.size(); ++i) e[i] = (i % 2 == 0) ? -1.0 : 1.0;
    const ErrorStats st = error_stats(e, 0);
    CHECK(st.bias_ppm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(st.std_ppm ==
          doctest::Approx(std::sqrt(20000.0 / 19999.0)).epsilon(1e-12));
    CHECK(st.std_ppm == doctest::Approx(1.000025).epsilon(1e-6));
  }
  SUBCASE("burn-in arithmetic") {
    const ErrorStats st = error_stats(Eigen::VectorXd::Zero(20000), 2000);
    CHECK(st.n_heats == 18000);
  }
  SUBCASE("too little data is rejected") {
    CHECK_THROWS_AS(error_stats(Eigen::VectorXd::Zero(5), 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(error_stats(Eigen::VectorXd::Zero(5), 5),
                    std::invalid_argument);
  }
}

TEST_CASE("error statistics ignore the order of the tail") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> nd(1.0, 2.0);
  Eigen::VectorXd e(5000);
  for (int i = 0; i < e.size(); ++i) e[i] = nd(rng);
  const ErrorStats a = error_stats(e, 100);
  Eigen::VectorXd shuffled = e;
  std::shuffle(shuffled.data() + 100, shuffled.data() + shuffled.size(),
               std::mt19937_64(7));
  const ErrorStats b = error_stats(shuffled, 100);
  CHECK(a.bias_ppm == doctest::Approx(b.bias_ppm).epsilon(1e-9));
  CHECK(a.std_ppm == doctest::Approx(b.std_ppm).epsilon(1e-9));
}

TEST_CASE("lag-1 autocorrelation diagnostics") {
  Eigen::VectorXd alt(1000);
  for (int i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? -1.0 : 1.0;
  CHECK(lag1_autocorrelation(alt, 0) == doctest::Approx(-1.0).epsilon(1e-2));

  CHECK(lag1_autocorrelation(Eigen::VectorXd::Constant(100, 3.0), 0) == 0.0);

  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd white(10000);
  for (int i = 0; i < white.size(); ++i) white[i] = nd(rng);
  CHECK(std::abs(lag1_autocorrelation(white, 0)) <= 0.05);

  CHECK_THROWS_AS(lag1_autocorrelation(Eigen::VectorXd::Zero(3), 1),
                  std::invalid_argument);
}

TEST_CASE("tracking error against the generating trajectory") {
  ScenarioConfig cfg = quick_config(Element::Cu);
  cfg.T = 150;
  cfg.burn_in = 30;
  const Dataset ds = build_dataset(cfg);
  FilterOutput out;
  out.n_scrap = 45;
  out.updated_mean = ds.truth.alpha;
  out.y_pred.resize(cfg.T);  // heats_count() keys on this

  SUBCASE("exact estimates give zero error") {
    const TrackingResult r = scrap_tracking_rmse(out, ds, 44);
    CHECK(r.rmse_ppm == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a constant 100 ppm offset is reported as is") {
    out.updated_mean.array() += 100e-6;
    const TrackingResult r = scrap_tracking_rmse(out, ds, 44);
    CHECK(r.rmse_ppm == doctest::Approx(100.0).epsilon(1e-9));
  }
  SUBCASE("usage bins average the charged masses") {
    const TrackingResult r = scrap_tracking_rmse(out, ds, 2, 50);
    REQUIRE(r.usage_avg.size() == 3);  // ceil(150/50)
    CHECK(r.usage_avg[0] ==
          doctest::Approx(ds.truth.m_scrap.col(2).head(50).mean())
              .epsilon(1e-12));
    CHECK(r.usage_bin == 50);
  }
  SUBCASE("bad index is rejected") {
    CHECK_THROWS_AS(scrap_tracking_rmse(out, ds, 45), std::invalid_argument);
    CHECK_THROWS_AS(scrap_tracking_rmse(out, ds, -1), std::invalid_argument);
  }
}

TEST_CASE("prior-freeze baseline is zero only for a pinned trajectory") {
  ScenarioConfig cfg = quick_config(Element::Cu);
  cfg.T = 200;
  cfg.burn_in = 20;
  Dataset ds = build_dataset(cfg);
  const double frozen = prior_freeze_rmse(ds, 44, cfg.burn_in);
  CHECK(frozen > 0.0);
  // pin the trajectory at the prior: the frozen estimator becomes exact
  ds.truth.alpha = ds.prior_mean.transpose().replicate(cfg.T, 1);
  CHECK(prior_freeze_rmse(ds, 44, cfg.burn_in) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scenario rows are deterministic and fully populated") {
  const ScenarioConfig cfg = quick_config(Element::Cu, 7);
  const SweepRow a = run_scenario(cfg);
  const SweepRow b = run_scenario(cfg);
  CHECK(a.label == "sparse");
  CHECK(a.target == "matrix");
  CHECK(a.level == 0.0);
  CHECK(a.seed == 7);
  CHECK(a.cu.bias_ppm == b.cu.bias_ppm);
  CHECK(a.cu.std_ppm == b.cu.std_ppm);
  CHECK(a.cr.bias_ppm == b.cr.bias_ppm);
  CHECK(a.cr.std_ppm == b.cr.std_ppm);
  CHECK(a.rmse_scrap45_ppm == b.rmse_scrap45_ppm);
  CHECK(a.rmse_scrap45_ppm > 0.0);
  CHECK(a.rank == 45);
  CHECK(a.cond > 1.0);
  CHECK(a.cu.n_heats == cfg.T - cfg.burn_in);
}

TEST_CASE("sweeps cover the level-seed grid in order, any job count") {
  ScenarioConfig base = quick_config(Element::Cu, 5);
  const std::vector<double> levels{0.0, 0.1};
  const std::vector<std::uint64_t> seeds{5, 6};

  const auto rows1 = sweep(base, NoiseTarget::ScrapMass, levels, seeds, 1);
  const auto rows4 = sweep(base, NoiseTarget::ScrapMass, levels, seeds, 4);
  REQUIRE(rows1.size() == 4);
  REQUIRE(rows4.size() == 4);
  for (size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].level == rows4[i].level);
    CHECK(rows1[i].seed == rows4[i].seed);
    CHECK(rows1[i].cu.std_ppm == rows4[i].cu.std_ppm);
    CHECK(rows1[i].cr.std_ppm == rows4[i].cr.std_ppm);
    CHECK(rows1[i].target == "scrap_mass");
  }
  CHECK(rows1[0].level == 0.0);
  CHECK(rows1[0].seed == 5);
  CHECK(rows1[1].seed == 6);
  CHECK(rows1[2].level == 0.1);
}

TEST_CASE("slag and feon noise never touch the linear element") {
  ScenarioConfig base = quick_config(Element::Cu, 9);
  const std::vector<std::uint64_t> seeds{9};
  for (NoiseTarget target : {NoiseTarget::SlagMass, NoiseTarget::Feon}) {
    const auto rows =
        sweep(base, target, {0.0, 0.05, 0.2}, seeds, 2);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      // bit-identical, not merely close
      CHECK(r.cu.bias_ppm == rows[0].cu.bias_ppm);
      CHECK(r.cu.std_ppm == rows[0].cu.std_ppm);
    }
    CHECK(rows[2].cr.std_ppm >= 0.0);
  }
}

TEST_CASE("matrix study produces one row per kind and seed") {
  ScenarioConfig base = quick_config(Element::Cu, 11);
  const auto rows = matrix_structure_rows(base, {11, 12}, 4);
  REQUIRE(rows.size() == 8);
  const std::vector<std::string> kinds{"identity", "sparse", "conditioned",
                                       "lowrank"};
  for (size_t k = 0; k < kinds.size(); ++k) {
    CHECK(rows[2 * k].label == kinds[k]);
    CHECK(rows[2 * k].seed == 11);
    CHECK(rows[2 * k + 1].seed == 12);
    CHECK(rows[2 * k].target == "matrix");
    CHECK(rows[2 * k].level == 0.0);
  }
  for (const auto& r : rows) {
    if (r.label == "identity") CHECK(r.cond == doctest::Approx(1.0).epsilon(0.01));
    if (r.label == "lowrank") CHECK(r.rank == 20);
  }
}

TEST_CASE("run_filter dispatches on the element kind") {
  const ScenarioConfig cu = quick_config(Element::Cu, 13);
  const Dataset ds = build_dataset(cu);
  const ModelParams params = filter_params(ds);
  CHECK(params.element_kind == ElementKind::SteelOnly);
  CHECK(params.obs_noise_std == doctest::Approx(10e-6));
  const FilterOutput via_helper = run_filter(ds);
  const FilterOutput direct = run_kf(ds, params, kf_default_init(ds, 1.0));
  CHECK(via_helper.f_steel_pred == direct.f_steel_pred);

  const ScenarioConfig cr = quick_config(Element::Cr, 13);
  const Dataset dcr = build_dataset(cr);
  CHECK(filter_params(dcr).element_kind == ElementKind::SteelSlag);
  CHECK(filter_params(dcr).obs_noise_std == doctest::Approx(5e-6));
  const FilterOutput ucr = run_filter(dcr);
  CHECK(ucr.updated_mean.cols() == 47);
}

TEST_CASE("cell means average rows that share a cell") {
  std::vector<SweepRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].label = "sparse";
    rows[i].target = "scrap_mass";
    rows[i].level = 0.2;
    rows[i].seed = i + 1;
    rows[i].cu.bias_ppm = i;         // 0, 1, 2 -> mean 1
    rows[i].cu.std_ppm = 10 + i;     // mean 11
    rows[i].cr.bias_ppm = -i;        // mean -1
    rows[i].cr.std_ppm = 5 + 2 * i;  // mean 7
  }
  SweepRow other;
  other.label = "sparse";
  other.target = "scrap_mass";
  other.level = 0.1;
  other.seed = 1;
  other.cu.std_ppm = 99;
  rows.push_back(other);

  const auto means = cell_means(rows);
  REQUIRE(means.size() == 2);
  CHECK(means[0].level == 0.2);  // first-appearance order preserved
  CHECK(means[0].n_seeds == 3);
  CHECK(means[0].bias_cu == doctest::Approx(1.0));
  CHECK(means[0].std_cu == doctest::Approx(11.0));
  CHECK(means[0].bias_cr == doctest::Approx(-1.0));
  CHECK(means[0].std_cr == doctest::Approx(7.0));
  CHECK(means[1].std_cu == doctest::Approx(99.0));
  CHECK(means[1].n_seeds == 1);
}

TEST_CASE("preset definitions cover the published sweeps") {
  REQUIRE(find_preset("table2") != nullptr);
  REQUIRE(find_preset("table3") != nullptr);
  REQUIRE(find_preset("table4") != nullptr);
  REQUIRE(find_preset("table5") != nullptr);
  CHECK(find_preset("table6") == nullptr);

  CHECK_FALSE(find_preset("table2")->target.has_value());
  CHECK(*find_preset("table3")->target == NoiseTarget::ScrapMass);
  CHECK(find_preset("table3")->levels ==
        std::vector<double>{0.0, 0.01, 0.05, 0.10, 0.20});
  CHECK(*find_preset("table4")->target == NoiseTarget::SlagMass);
  CHECK(*find_preset("table5")->target == NoiseTarget::Feon);
  CHECK(find_preset("table5")->levels ==
        std::vector<double>{0.0, 0.05, 0.10, 0.20});

  CHECK(preset_seeds(9) == std::vector<std::uint64_t>{9, 10, 11});

  // the reference table carries the published values the report compares to
  bool found = false;
  for (const auto& c : reference_cells()) {
    if (c.preset == "table3" && c.level == 0.20) {
      CHECK(c.std_cu == doctest::Approx(19.25));
      found = true;
    }
  }
  CHECK(found);
}

}  // TEST_SUITE
