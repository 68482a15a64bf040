#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrapest/sensitivity.hpp"
#include "scrapest/synth.hpp"

namespace scrapest {

/// Named sweep experiments:
///   table2  matrix-structure study (identity/sparse/conditioned/lowrank)
///   table3  scrap-mass noise sweep   0/1/5/10/20 %
///   table4  slag-mass noise sweep    0/1/5/10/20 %
///   table5  FeO_n noise sweep        0/5/10/20 %
struct SweepPreset {
  std::string name;
  std::optional<NoiseTarget> target;  // empty for the matrix study
  std::vector<double> levels;
};

const std::vector<SweepPreset>& sweep_presets();
const SweepPreset* find_preset(const std::string& name);

/// Seeds used for one preset run: {seed, seed+1, seed+2}.
std::vector<std::uint64_t> preset_seeds(std::uint64_t seed);

std::vector<SweepRow> run_preset(const SweepPreset& preset,
                                 const ScenarioConfig& base,
                                 const std::vector<std::uint64_t>& seeds,
                                 int jobs, bool progress = false);

/// Reference results the presets reproduce, with acceptance windows where the
/// toolkit defines them. NaN marks values not reported for a cell.
struct ReferenceCell {
  std::string preset;
  std::string label;   // matrix kind for table2, else sweep target
  double level = 0.0;  // noise std as fraction
  double bias_cu, std_cu, bias_cr, std_cr;
};

const std::vector<ReferenceCell>& reference_cells();

/// Across-seed mean of the rows matching (label, target, level).
struct CellMean {
  std::string label, target;
  double level = 0.0;
  double bias_cu = 0.0, std_cu = 0.0, bias_cr = 0.0, std_cr = 0.0;
  int n_seeds = 0;
};

std::vector<CellMean> cell_means(const std::vector<SweepRow>& rows);

}  // namespace scrapest
