#include "scrapest/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "scrapest/csv_io.hpp"

namespace scrapest {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

// Pulls one key out of the parsed file, or returns the default rendering.
class KeyReader {
 public:
  explicit KeyReader(KeyValueFile file) : file_(std::move(file)) {}

  std::string take(const std::string& key, const std::string& fallback) {
    const auto it = file_.values.find(key);
    if (it == file_.values.end()) return fallback;
    last_line_ = file_.lines.count(key) ? file_.lines.at(key) : 0;
    std::string v = it->second;
    file_.values.erase(it);
    return v;
  }

  double take_double(const std::string& key, double fallback) {
    const std::string s = take(key, "");
    if (s.empty()) return fallback;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
      fail(where() + "expected a number for '" + key + "', got '" + s + "'");
    }
    return v;
  }

  long long take_int(const std::string& key, long long fallback) {
    const std::string s = take(key, "");
    if (s.empty()) return fallback;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
      fail(where() + "expected an integer for '" + key + "', got '" + s +
           "'");
    }
    return v;
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
    const std::string s = take(key, "");
    if (s.empty()) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE ||
        s.front() == '-') {
      fail(where() + "expected a nonnegative integer for '" + key +
           "', got '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
  }

  void reject_unknown() const {
    if (file_.values.empty()) return;
    const auto& [key, value] = *file_.values.begin();
    std::string msg = origin_prefix() + "unknown config key '" + key + "'";
    if (file_.lines.count(key)) {
      msg += " (line " + std::to_string(file_.lines.at(key)) + ")";
    }
    fail(msg);
  }

  std::string origin_prefix() const {
    return file_.origin.empty() ? "" : file_.origin + ": ";
  }

 private:
  std::string where() const {
    std::string w = origin_prefix();
    if (last_line_ > 0) w += "line " + std::to_string(last_line_) + ": ";
    return w;
  }

  KeyValueFile file_;
  int last_line_ = 0;
};

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || end == item.c_str() || *end != '\0' ||
        errno == ERANGE) {
      fail("expected a comma-separated integer list, got '" + s + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

KeyValueFile parse_key_value_text(const std::string& text,
                                  const std::string& origin) {
  KeyValueFile out;
  out.origin = origin;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin + ":" + std::to_string(lineno) +
           ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (out.values.count(key)) {
      fail(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
           "' (first on line " + std::to_string(out.lines.at(key)) + ")");
    }
    out.values[key] = value;
    out.lines[key] = lineno;
  }
  return out;
}

KeyValueFile parse_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail("cannot open config file: " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_value_text(ss.str(), path.string());
}

ScenarioConfig scenario_from_config(const KeyValueFile& file) {
  KeyReader r(file);
  ScenarioConfig cfg;

  const std::string elem = r.take("element", "cu");
  if (elem == "cu") {
    cfg.element = Element::Cu;
  } else if (elem == "cr") {
    cfg.element = Element::Cr;
  } else {
    fail(r.origin_prefix() + "element must be 'cu' or 'cr', got '" + elem +
         "'");
  }

  cfg.n_scrap = static_cast<int>(r.take_int("n_scrap", cfg.n_scrap));
  cfg.T = static_cast<int>(r.take_int("T", cfg.T));
  cfg.total_scrap_mass =
      r.take_double("total_scrap_mass", cfg.total_scrap_mass);

  const std::string kind = r.take("matrix", "sparse");
  if (kind == "identity") {
    cfg.matrix.kind = MatrixKind::Identity;
  } else if (kind == "conditioned") {
    cfg.matrix.kind = MatrixKind::Conditioned;
  } else if (kind == "lowrank") {
    cfg.matrix.kind = MatrixKind::LowRank;
  } else if (kind == "sparse") {
    cfg.matrix.kind = MatrixKind::Sparse;
  } else {
    fail(r.origin_prefix() +
         "matrix must be identity|conditioned|lowrank|sparse, got '" + kind +
         "'");
  }
  cfg.matrix.target_cond =
      r.take_double("matrix_target_cond", cfg.matrix.target_cond);
  cfg.matrix.rank = static_cast<int>(r.take_int("matrix_rank",
                                                cfg.matrix.rank));
  cfg.matrix.density = r.take_double("matrix_density", cfg.matrix.density);
  const std::string boost =
      r.take("matrix_boost_columns", join_ints(cfg.matrix.boost_columns));
  cfg.matrix.boost_columns = parse_int_list(boost);

  cfg.noise[NoiseTarget::ScrapMass] =
      r.take_double("noise_scrap_mass_pct", 0.0) / 100.0;
  cfg.noise[NoiseTarget::SlagMass] =
      r.take_double("noise_slag_mass_pct", 0.0) / 100.0;
  cfg.noise[NoiseTarget::Feon] = r.take_double("noise_feon_pct", 0.0) / 100.0;
  cfg.noise[NoiseTarget::SteelMass] =
      r.take_double("noise_steel_mass_pct", 0.0) / 100.0;
  cfg.noise[NoiseTarget::FSteel] =
      r.take_double("noise_f_steel_pct", 0.0) / 100.0;

  cfg.seed = r.take_u64("seed", cfg.seed);
  cfg.gamma = r.take_double("gamma", cfg.gamma);
  cfg.obs_noise_std_cu =
      r.take_double("obs_noise_std_cu_ppm", cfg.obs_noise_std_cu / kPpm) *
      kPpm;
  cfg.obs_noise_std_cr =
      r.take_double("obs_noise_std_cr_ppm", cfg.obs_noise_std_cr / kPpm) *
      kPpm;
  cfg.burn_in = static_cast<int>(r.take_int("burn_in", cfg.burn_in));
  cfg.ut.alpha = r.take_double("ut_alpha", cfg.ut.alpha);
  cfg.ut.beta = r.take_double("ut_beta", cfg.ut.beta);
  cfg.ut.kappa = r.take_double("ut_kappa", cfg.ut.kappa);
  cfg.kf_init_cov_scale =
      r.take_double("kf_init_cov_scale", cfg.kf_init_cov_scale);
  cfg.ukf_init_cov_scale =
      r.take_double("ukf_init_cov_scale", cfg.ukf_init_cov_scale);

  r.reject_unknown();

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    fail(r.origin_prefix() + e.what());
  }
  return cfg;
}

std::map<std::string, std::string> config_echo(const ScenarioConfig& config) {
  std::map<std::string, std::string> out;
  out["element"] = element_name(config.element);
  out["n_scrap"] = std::to_string(config.n_scrap);
  out["T"] = std::to_string(config.T);
  out["total_scrap_mass"] = format_double(config.total_scrap_mass);
  out["matrix"] = matrix_kind_name(config.matrix.kind);
  out["matrix_target_cond"] = format_double(config.matrix.target_cond);
  out["matrix_rank"] = std::to_string(config.matrix.rank);
  out["matrix_density"] = format_double(config.matrix.density);
  out["matrix_boost_columns"] = join_ints(config.matrix.boost_columns);
  out["noise_scrap_mass_pct"] =
      format_double(config.noise[NoiseTarget::ScrapMass] * 100.0);
  out["noise_slag_mass_pct"] =
      format_double(config.noise[NoiseTarget::SlagMass] * 100.0);
  out["noise_feon_pct"] =
      format_double(config.noise[NoiseTarget::Feon] * 100.0);
  out["noise_steel_mass_pct"] =
      format_double(config.noise[NoiseTarget::SteelMass] * 100.0);
  out["noise_f_steel_pct"] =
      format_double(config.noise[NoiseTarget::FSteel] * 100.0);
  out["seed"] = std::to_string(config.seed);
  out["gamma"] = format_double(config.gamma);
  out["obs_noise_std_cu_ppm"] = format_double(config.obs_noise_std_cu / kPpm);
  out["obs_noise_std_cr_ppm"] = format_double(config.obs_noise_std_cr / kPpm);
  out["burn_in"] = std::to_string(config.burn_in);
  out["ut_alpha"] = format_double(config.ut.alpha);
  out["ut_beta"] = format_double(config.ut.beta);
  out["ut_kappa"] = format_double(config.ut.kappa);
  out["kf_init_cov_scale"] = format_double(config.kf_init_cov_scale);
  out["ukf_init_cov_scale"] = format_double(config.ukf_init_cov_scale);
  return out;
}

std::string config_schema_help() {
  return
      "element               cu | cr                      (default cu)\n"
      "n_scrap               scrap types, multiple of 3   (default 45)\n"
      "T                     number of heats              (default 20000)\n"
      "total_scrap_mass      charge mass per heat [t]     (default 70)\n"
      "matrix                identity | conditioned | lowrank | sparse\n"
      "                                                   (default sparse)\n"
      "matrix_target_cond    conditioned: spectrum span   (default 700000)\n"
      "matrix_rank           lowrank: factor rank         (default 20)\n"
      "matrix_density        sparse: nonzero probability  (default 0.1)\n"
      "matrix_boost_columns  sparse: 1-based heavy types  (default 1,23,45)\n"
      "noise_scrap_mass_pct  injected noise std [%]       (default 0)\n"
      "noise_slag_mass_pct   injected noise std [%]       (default 0)\n"
      "noise_feon_pct        injected noise std [%]       (default 0)\n"
      "noise_steel_mass_pct  injected noise std [%]       (default 0)\n"
      "noise_f_steel_pct     injected noise std [%]       (default 0)\n"
      "seed                  RNG seed                     (default 1)\n"
      "gamma                 yard turnover rate           (default ln2/1000)\n"
      "obs_noise_std_cu_ppm  lab noise std, Cu [ppm]      (default 10)\n"
      "obs_noise_std_cr_ppm  lab noise std, Cr [ppm]      (default 5)\n"
      "burn_in               heats dropped from stats     (default 2000)\n"
      "ut_alpha              sigma-point spread           (default 1)\n"
      "ut_beta               prior-kurtosis weight        (default 2)\n"
      "ut_kappa              secondary scaling            (default 0)\n"
      "kf_init_cov_scale     linear-filter init scale     (default 1)\n"
      "ukf_init_cov_scale    unscented-filter init scale  (default 1)\n";
}

}  // namespace scrapest
