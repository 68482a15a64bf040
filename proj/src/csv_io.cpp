#include "scrapest/csv_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "scrapest/config.hpp"

namespace scrapest {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& path, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": bad numeric field '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, const fs::path& path,
                        int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": bad integer field '" + s + "'");
  }
  return static_cast<std::uint64_t>(v);
}

/// Reads a CSV with a fixed header into rows of doubles.
std::vector<std::vector<double>> read_numeric_csv(
    const fs::path& path, const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw IoError(path.string() + ": unexpected header '" + line + "'");
  }
  const std::size_t n_cols = split(expected_header, ',').size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != n_cols) {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected " + std::to_string(n_cols) + " fields, got " +
                    std::to_string(fields.size()));
    }
    std::vector<double> row(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) {
      row[j] = parse_double(fields[j], path, lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string heats_header(int n) {
  std::string h = "heat_index";
  for (int i = 1; i <= n; ++i) h += ",m_scrap_" + std::to_string(i);
  h += ",m_hm,f_hm_ppm,m_slag,m_steel,f_feon_pct,f_steel_meas_ppm";
  return h;
}

std::string truth_header(int n) {
  std::string h;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) h += ",";
    h += "alpha_" + std::to_string(i);
  }
  h += ",c1,c2,f_steel_true_ppm";
  return h;
}

std::string truth_vars_header(int n) {
  std::string h = "heat_index";
  for (int i = 1; i <= n; ++i) h += ",m_scrap_" + std::to_string(i);
  h += ",m_slag,m_steel,f_feon_pct";
  return h;
}

std::string take_meta(KeyValueFile& file, const std::string& key,
                      const fs::path& path) {
  const auto it = file.values.find(key);
  if (it == file.values.end()) {
    throw IoError(path.string() + ": missing key '" + key + "'");
  }
  std::string value = it->second;
  file.values.erase(it);
  file.lines.erase(key);
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_heats_csv(const fs::path& path, const Dataset& ds) {
  const int n = ds.n_scrap();
  std::ofstream out = open_out(path);
  std::string buf = heats_header(n);
  buf += "\n";
  for (int t = 0; t < ds.heats_count(); ++t) {
    const HeatRecord& h = ds.heats[t];
    buf += std::to_string(t);
    for (int i = 0; i < n; ++i) {
      buf += ",";
      buf += format_double(h.m_scrap[i]);
    }
    buf += ",";
    buf += format_double(h.m_hm);
    buf += ",";
    buf += format_double(h.f_hm / kPpm);
    buf += ",";
    buf += format_double(h.m_slag);
    buf += ",";
    buf += format_double(h.m_steel);
    buf += ",";
    buf += format_double(h.f_feon);
    buf += ",";
    buf += format_double(h.f_steel_meas / kPpm);
    buf += "\n";
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  finish_out(out, path);
}

void write_truth_csv(const fs::path& path, const Dataset& ds) {
  const int n = ds.n_scrap();
  const int T = static_cast<int>(ds.truth.alpha.rows());
  const bool has_partition = ds.truth.partition.rows() == T;
  std::ofstream out = open_out(path);
  std::string buf = truth_header(n);
  buf += "\n";
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      if (i > 0) buf += ",";
      buf += format_double(ds.truth.alpha(t, i) / kPpm);
    }
    buf += ",";
    buf += format_double(has_partition ? ds.truth.partition(t, 0) : 0.0);
    buf += ",";
    buf += format_double(has_partition ? ds.truth.partition(t, 1) : 0.0);
    buf += ",";
    buf += format_double(ds.truth.f_steel[t] / kPpm);
    buf += "\n";
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  finish_out(out, path);
}

void write_truth_vars_csv(const fs::path& path, const Dataset& ds) {
  const int n = ds.n_scrap();
  const int T = static_cast<int>(ds.truth.m_scrap.rows());
  std::ofstream out = open_out(path);
  std::string buf = truth_vars_header(n);
  buf += "\n";
  for (int t = 0; t < T; ++t) {
    buf += std::to_string(t);
    for (int i = 0; i < n; ++i) {
      buf += ",";
      buf += format_double(ds.truth.m_scrap(t, i));
    }
    buf += ",";
    buf += format_double(ds.truth.m_slag[t]);
    buf += ",";
    buf += format_double(ds.truth.m_steel[t]);
    buf += ",";
    buf += format_double(ds.truth.f_feon[t]);
    buf += "\n";
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  finish_out(out, path);
}

void write_dataset_meta(const fs::path& path, const Dataset& ds) {
  std::ofstream out = open_out(path);
  out << "# dataset sidecar; keys up to prior_mean_ppm form a valid config\n";
  for (const auto& [key, value] : config_echo(ds.config)) {
    out << key << " = " << value << "\n";
  }
  out << "prior_mean_ppm = ";
  for (int i = 0; i < ds.n_scrap(); ++i) {
    if (i > 0) out << ",";
    out << format_double(ds.prior_mean[i] / kPpm);
  }
  out << "\n";
  out << "achieved_rank = " << ds.matrix_meta.rank << "\n";
  out << "achieved_cond = " << format_double(ds.matrix_meta.cond) << "\n";
  finish_out(out, path);
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " +
                  ec.message());
  }
  write_heats_csv(dir / "heats.csv", ds);
  write_truth_csv(dir / "truth.csv", ds);
  write_dataset_meta(dir / "meta.txt", ds);
  if (ds.config.noise.any()) {
    write_truth_vars_csv(dir / "truth_vars.csv", ds);
  }
}

Dataset read_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.txt";
  KeyValueFile meta = parse_key_value_file(meta_path);
  const std::string prior_str = take_meta(meta, "prior_mean_ppm", meta_path);
  const std::string rank_str = take_meta(meta, "achieved_rank", meta_path);
  const std::string cond_str = take_meta(meta, "achieved_cond", meta_path);

  Dataset ds;
  try {
    ds.config = scenario_from_config(meta);
  } catch (const ConfigError& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  ds.matrix_meta.rank = static_cast<int>(parse_u64(rank_str, meta_path, 0));
  ds.matrix_meta.cond = parse_double(cond_str, meta_path, 0);

  const std::vector<std::string> prior_fields = split(prior_str, ',');
  const int n = static_cast<int>(prior_fields.size());
  if (n != ds.config.n_scrap) {
    throw IoError(meta_path.string() + ": prior_mean_ppm has " +
                  std::to_string(n) + " entries, config says " +
                  std::to_string(ds.config.n_scrap));
  }
  ds.prior_mean.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.prior_mean[i] = parse_double(prior_fields[i], meta_path, 0) * kPpm;
  }

  const fs::path heats_path = dir / "heats.csv";
  const auto heat_rows = read_numeric_csv(heats_path, heats_header(n));
  const int T = static_cast<int>(heat_rows.size());
  if (T != ds.config.T) {
    throw IoError(heats_path.string() + ": " + std::to_string(T) +
                  " heats, config says " + std::to_string(ds.config.T));
  }
  ds.heats.resize(T);
  for (int t = 0; t < T; ++t) {
    const std::vector<double>& r = heat_rows[t];
    HeatRecord& h = ds.heats[t];
    h.m_scrap.resize(n);
    for (int i = 0; i < n; ++i) h.m_scrap[i] = r[1 + i];
    h.m_hm = r[n + 1];
    h.f_hm = r[n + 2] * kPpm;
    h.m_slag = r[n + 3];
    h.m_steel = r[n + 4];
    h.f_feon = r[n + 5];
    h.f_steel_meas = r[n + 6] * kPpm;
  }

  const fs::path truth_path = dir / "truth.csv";
  const auto truth_rows = read_numeric_csv(truth_path, truth_header(n));
  if (static_cast<int>(truth_rows.size()) != T) {
    throw IoError(truth_path.string() + ": row count differs from heats.csv");
  }
  ds.truth.alpha.resize(T, n);
  ds.truth.f_steel.resize(T);
  const bool steel_slag =
      element_kind(ds.config.element) == ElementKind::SteelSlag;
  if (steel_slag) ds.truth.partition.resize(T, 2);
  for (int t = 0; t < T; ++t) {
    const std::vector<double>& r = truth_rows[t];
    for (int i = 0; i < n; ++i) ds.truth.alpha(t, i) = r[i] * kPpm;
    if (steel_slag) {
      ds.truth.partition(t, 0) = r[n];
      ds.truth.partition(t, 1) = r[n + 1];
    }
    ds.truth.f_steel[t] = r[n + 2] * kPpm;
  }

  // Process-variable truth: from the sidecar when injected noise was applied,
  // otherwise the estimator view is already noise-free.
  ds.truth.m_scrap.resize(T, n);
  ds.truth.m_hm.resize(T);
  ds.truth.f_hm.resize(T);
  ds.truth.m_slag.resize(T);
  ds.truth.m_steel.resize(T);
  ds.truth.f_feon.resize(T);
  for (int t = 0; t < T; ++t) {
    ds.truth.m_hm[t] = ds.heats[t].m_hm;
    ds.truth.f_hm[t] = ds.heats[t].f_hm;
  }
  const fs::path vars_path = dir / "truth_vars.csv";
  if (fs::exists(vars_path)) {
    const auto var_rows = read_numeric_csv(vars_path, truth_vars_header(n));
    if (static_cast<int>(var_rows.size()) != T) {
      throw IoError(vars_path.string() + ": row count differs from heats.csv");
    }
    for (int t = 0; t < T; ++t) {
      const std::vector<double>& r = var_rows[t];
      for (int i = 0; i < n; ++i) ds.truth.m_scrap(t, i) = r[1 + i];
      ds.truth.m_slag[t] = r[n + 1];
      ds.truth.m_steel[t] = r[n + 2];
      ds.truth.f_feon[t] = r[n + 3];
    }
  } else {
    for (int t = 0; t < T; ++t) {
      const HeatRecord& h = ds.heats[t];
      ds.truth.m_scrap.row(t) = h.m_scrap.transpose();
      ds.truth.m_slag[t] = h.m_slag;
      ds.truth.m_steel[t] = h.m_steel;
      ds.truth.f_feon[t] = h.f_feon;
    }
  }
  return ds;
}

void write_filtered_csv(const fs::path& path, const FilterOutput& out) {
  const int n = out.n_scrap;
  const int T = out.heats_count();
  const int n_state = static_cast<int>(out.updated_mean.cols());
  const bool extended = n_state == n + 2;
  std::ofstream os = open_out(path);
  std::string buf = "heat_index";
  for (int i = 1; i <= n; ++i) buf += ",alpha_hat_" + std::to_string(i);
  buf += ",y_pred,innovation,f_steel_pred_ppm";
  if (extended) buf += ",c1_hat,c2_hat";
  buf += "\n";
  for (int t = 0; t < T; ++t) {
    buf += std::to_string(t);
    for (int i = 0; i < n; ++i) {
      buf += ",";
      buf += format_double(
          std::clamp(out.updated_mean(t, i), 0.0, 1.0) / kPpm);
    }
    buf += ",";
    buf += format_double(out.y_pred[t]);
    buf += ",";
    buf += format_double(out.innovation[t]);
    buf += ",";
    buf += format_double(out.f_steel_pred[t] / kPpm);
    if (extended) {
      buf += ",";
      buf += format_double(std::max(0.0, out.updated_mean(t, n)));
      buf += ",";
      buf += format_double(std::max(0.0, out.updated_mean(t, n + 1)));
    }
    buf += "\n";
    if (buf.size() > (1u << 20)) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
  finish_out(os, path);
}

void write_tracking_csv(const fs::path& path, const FilterOutput& out,
                        const Dataset& ds, int scrap_index, int usage_bin) {
  if (scrap_index < 0 || scrap_index >= out.n_scrap) {
    throw IoError("write_tracking_csv: bad scrap index");
  }
  const TrackingResult tr = scrap_tracking_rmse(out, ds, scrap_index,
                                                usage_bin);
  const int T = out.heats_count();
  std::ofstream os = open_out(path);
  const std::string avg_col = "usage_avg" + std::to_string(usage_bin) + "_t";
  std::string buf =
      "heat_index,alpha_hat_ppm,alpha_true_ppm,usage_mass_t," + avg_col + "\n";
  for (int t = 0; t < T; ++t) {
    buf += std::to_string(t);
    buf += ",";
    buf += format_double(
        std::clamp(out.updated_mean(t, scrap_index), 0.0, 1.0) / kPpm);
    buf += ",";
    buf += format_double(ds.truth.alpha(t, scrap_index) / kPpm);
    buf += ",";
    buf += format_double(ds.heats[t].m_scrap[scrap_index]);
    buf += ",";
    buf += format_double(tr.usage_avg[t / usage_bin]);
    buf += "\n";
    if (buf.size() > (1u << 20)) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
  finish_out(os, path);
}

void write_table_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream os = open_out(path);
  std::string buf = kTableHeader;
  buf += "\n";
  for (const SweepRow& r : rows) {
    buf += r.label;
    buf += ",";
    buf += r.target;
    buf += ",";
    buf += format_double(r.level * 100.0);
    buf += ",";
    buf += std::to_string(static_cast<unsigned long long>(r.seed));
    buf += ",";
    buf += format_double(r.cu.bias_ppm);
    buf += ",";
    buf += format_double(r.cu.std_ppm);
    buf += ",";
    buf += format_double(r.cr.bias_ppm);
    buf += ",";
    buf += format_double(r.cr.std_ppm);
    buf += ",";
    buf += format_double(r.rmse_scrap45_ppm);
    buf += ",";
    buf += std::to_string(r.rank);
    buf += ",";
    buf += format_double(r.cond);
    buf += "\n";
  }
  os << buf;
  finish_out(os, path);
}

std::vector<SweepRow> read_table_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTableHeader) {
    throw IoError(path.string() + ": unexpected header '" + line + "'");
  }
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 11) {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 11 fields, got " + std::to_string(f.size()));
    }
    SweepRow r;
    r.label = f[0];
    r.target = f[1];
    r.level = parse_double(f[2], path, lineno) / 100.0;
    r.seed = parse_u64(f[3], path, lineno);
    r.cu.bias_ppm = parse_double(f[4], path, lineno);
    r.cu.std_ppm = parse_double(f[5], path, lineno);
    r.cr.bias_ppm = parse_double(f[6], path, lineno);
    r.cr.std_ppm = parse_double(f[7], path, lineno);
    r.rmse_scrap45_ppm = parse_double(f[8], path, lineno);
    r.rank = static_cast<int>(parse_u64(f[9], path, lineno));
    r.cond = parse_double(f[10], path, lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  std::ofstream os = open_out(path);
  os << "command = " << m.command << "\n";
  os << "seed = " << m.seed << "\n";
  os << "duration_ms = " << format_double(m.duration_ms) << "\n";
  for (const std::string& o : m.outputs) {
    os << "output = " << o << "\n";
  }
  for (const auto& [key, value] : m.config) {
    os << "config." << key << " = " << value << "\n";
  }
  finish_out(os, path);
}

}  // namespace scrapest
