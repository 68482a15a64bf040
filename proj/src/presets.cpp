#include "scrapest/presets.hpp"

#include <cmath>
#include <limits>

namespace scrapest {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const std::vector<SweepPreset>& sweep_presets() {
  static const std::vector<SweepPreset> presets = {
      {"table2", std::nullopt, {}},
      {"table3", NoiseTarget::ScrapMass, {0.0, 0.01, 0.05, 0.10, 0.20}},
      {"table4", NoiseTarget::SlagMass, {0.0, 0.01, 0.05, 0.10, 0.20}},
      {"table5", NoiseTarget::Feon, {0.0, 0.05, 0.10, 0.20}},
  };
  return presets;
}

const SweepPreset* find_preset(const std::string& name) {
  for (const SweepPreset& p : sweep_presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<std::uint64_t> preset_seeds(std::uint64_t seed) {
  return {seed, seed + 1, seed + 2};
}

std::vector<SweepRow> run_preset(const SweepPreset& preset,
                                 const ScenarioConfig& base,
                                 const std::vector<std::uint64_t>& seeds,
                                 int jobs, bool progress) {
  if (!preset.target) {
    return matrix_structure_rows(base, seeds, jobs, progress);
  }
  return sweep(base, *preset.target, preset.levels, seeds, jobs, progress);
}

const std::vector<ReferenceCell>& reference_cells() {
  static const std::vector<ReferenceCell> cells = {
      // Charge-structure study, zero injected noise.
      {"table2", "identity", 0.0, -0.016, 0.72, -0.15, 2.23},
      {"table2", "sparse", 0.0, -0.33, 10.79, -0.07, 5.39},
      {"table2", "conditioned", 0.0, 0.75, 7.59, -0.12, 3.63},
      {"table2", "lowrank", 0.0, 1.50, 7.73, -0.28, 3.38},
      // Scrap-mass noise sweep.
      {"table3", "scrap_mass", 0.01, 0.23, 10.47, -0.12, 5.33},
      {"table3", "scrap_mass", 0.05, 0.32, 13.30, 0.44, 7.13},
      {"table3", "scrap_mass", 0.10, -1.52, 16.69, -0.18, 9.31},
      {"table3", "scrap_mass", 0.20, -3.21, 19.25, -1.26, 12.88},
      // Slag-mass noise sweep; affects the steel/slag element only.
      {"table4", "slag_mass", 0.01, kNaN, kNaN, -0.01, 5.44},
      {"table4", "slag_mass", 0.05, kNaN, kNaN, 0.52, 7.21},
      {"table4", "slag_mass", 0.10, kNaN, kNaN, 0.12, 9.21},
      {"table4", "slag_mass", 0.20, kNaN, kNaN, -0.07, 13.06},
      // FeO_n noise sweep; the filter tracks the partition shift.
      {"table5", "feon", 0.0, kNaN, kNaN, -0.01, 5.39},
      {"table5", "feon", 0.05, kNaN, kNaN, -0.30, 5.07},
      {"table5", "feon", 0.10, kNaN, kNaN, 0.03, 5.29},
      {"table5", "feon", 0.20, kNaN, kNaN, -0.32, 5.34},
  };
  return cells;
}

std::vector<CellMean> cell_means(const std::vector<SweepRow>& rows) {
  std::vector<CellMean> means;
  for (const SweepRow& row : rows) {
    CellMean* cell = nullptr;
    for (CellMean& m : means) {
      if (m.label == row.label && m.target == row.target &&
          m.level == row.level) {
        cell = &m;
        break;
      }
    }
    if (!cell) {
      means.push_back({row.label, row.target, row.level, 0, 0, 0, 0, 0});
      cell = &means.back();
    }
    cell->bias_cu += row.cu.bias_ppm;
    cell->std_cu += row.cu.std_ppm;
    cell->bias_cr += row.cr.bias_ppm;
    cell->std_cr += row.cr.std_ppm;
    cell->n_seeds += 1;
  }
  for (CellMean& m : means) {
    if (m.n_seeds == 0) continue;
    m.bias_cu /= m.n_seeds;
    m.std_cu /= m.n_seeds;
    m.bias_cr /= m.n_seeds;
    m.std_cr /= m.n_seeds;
  }
  return means;
}

}  // namespace scrapest
