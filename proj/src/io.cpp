#include "tvfrft/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tvfrft/errors.hpp"

namespace tvfrft::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, const std::string& path, int row,
                  int col) {
  const std::string cell = trimmed(raw);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(value))
    throw ParseError(path + ": row " + std::to_string(row + 1) + ", column " +
                     std::to_string(col + 1) + ": not a finite number: '" +
                     cell + "'");
  return value;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw ParseError("write failed for " + path);
}

std::string mode_name(RunMode mode) {
  return mode == RunMode::Experiment ? "experiment" : "blind";
}

std::string convention_name(SnrConvention c) {
  return c == SnrConvention::NormRatio ? "paper" : "conventional";
}

std::string first_stage_name(FirstStage f) {
  return f == FirstStage::Tikhonov ? "tikhonov" : "median";
}

void put_if_finite(nlohmann::json& j, const char* key, double v) {
  if (std::isfinite(v)) j[key] = v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TimeVertexSignal load_signal(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) {
      ++row;
      continue;
    }
    const auto cells = split_line(line);
    if (!rows.empty() && cells.size() != rows.front().size())
      throw ParseError(path + ": row " + std::to_string(row + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(rows.front().size()));
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      values.push_back(parse_cell(cells[c], path, row, static_cast<int>(c)));
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  Eigen::MatrixXd x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
  return TimeVertexSignal(std::move(x));
}

void save_signal(const std::string& path, const Eigen::MatrixXd& x) {
  std::ofstream out = open_for_write(path);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << format_double(x(i, j));
    }
    out << '\n';
  }
  finish_write(out, path);
}

std::vector<std::array<double, 2>> load_coordinates(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != "id,lat,lon")
    throw ParseError(path + ": expected header 'id,lat,lon'");
  std::vector<std::array<double, 2>> coords;
  int row = 1;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) {
      ++row;
      continue;
    }
    const auto cells = split_line(line);
    if (cells.size() != 3)
      throw ParseError(path + ": row " + std::to_string(row + 1) +
                       ": expected 3 cells");
    const double id = parse_cell(cells[0], path, row, 0);
    if (id != static_cast<double>(coords.size()))
      throw ParseError(path + ": row " + std::to_string(row + 1) +
                       ": ids must run 0..N-1 in order");
    coords.push_back({parse_cell(cells[1], path, row, 1),
                      parse_cell(cells[2], path, row, 2)});
    ++row;
  }
  if (coords.empty()) throw ParseError(path + ": no coordinates");
  return coords;
}

void save_coordinates(const std::string& path,
                      const std::vector<std::array<double, 2>>& coords) {
  std::ofstream out = open_for_write(path);
  out << "id,lat,lon\n";
  for (std::size_t i = 0; i < coords.size(); ++i)
    out << i << ',' << format_double(coords[i][0]) << ','
        << format_double(coords[i][1]) << '\n';
  finish_write(out, path);
}

void save_edges(const std::string& path, const Graph& g) {
  std::ofstream out = open_for_write(path);
  out << "src,dst,weight\n";
  for (int i = 0; i < g.n_vertices; ++i)
    for (int j = i + 1; j < g.n_vertices; ++j)
      if (g.adjacency(i, j) > 0.0)
        out << i << ',' << j << ',' << format_double(g.adjacency(i, j))
            << '\n';
  finish_write(out, path);
}

void save_coefficients(const std::string& path, const FilterCoefficients& c) {
  std::ofstream out = open_for_write(path);
  out << "p,q,re,im\n";
  for (int p = 0; p < c.p_order; ++p)
    for (int q = 0; q < c.q_order; ++q) {
      const std::complex<double> v = c.grid(q, p);
      out << p << ',' << q << ',' << format_double(v.real()) << ','
          << format_double(v.imag()) << '\n';
    }
  finish_write(out, path);
}

void save_surface(const std::string& path, const DenoiseReport& report) {
  std::ofstream out = open_for_write(path);
  const bool experiment = report.mode == RunMode::Experiment;
  out << (experiment ? "a,b,snr_db,is_best\n" : "a,b,residual,is_best\n");
  for (const SurfacePoint& pt : report.surface) {
    const bool best = pt.a == report.best_a && pt.b == report.best_b;
    out << format_double(pt.a) << ',' << format_double(pt.b) << ','
        << format_double(pt.value) << ',' << (best ? 1 : 0) << '\n';
  }
  finish_write(out, path);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& [a, b] : cfg.orders_grid) grid.push_back({a, b});
  return {
      {"p", cfg.p},
      {"q", cfg.q},
      {"group_length", cfg.group_length},
      {"orders_grid", grid},
      {"input_snr_db", cfg.input_snr_db},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"first_stage", first_stage_name(cfg.first_stage)},
      {"mode", mode_name(cfg.mode)},
      {"snr_convention", convention_name(cfg.snr_convention)},
      {"tikhonov", {{"gamma", cfg.tikhonov.gamma}}},
      {"median",
       {{"iterations", cfg.median.iterations},
        {"include_temporal_neighbors",
         cfg.median.include_temporal_neighbors}}},
      {"ridge", cfg.ridge},
      {"sweep_gamma", cfg.sweep_gamma},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base) {
  if (!j.is_object()) throw InvalidParameter("config: expected a JSON object");
  ExperimentConfig cfg = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "p")
        cfg.p = value.get<int>();
      else if (key == "q")
        cfg.q = value.get<int>();
      else if (key == "group_length")
        cfg.group_length = value.get<int>();
      else if (key == "orders_grid") {
        cfg.orders_grid.clear();
        for (const auto& pair : value) {
          if (!pair.is_array() || pair.size() != 2)
            throw InvalidParameter(
                "config: orders_grid entries must be [a, b] pairs");
          cfg.orders_grid.emplace_back(pair[0].get<double>(),
                                       pair[1].get<double>());
        }
      } else if (key == "input_snr_db")
        cfg.input_snr_db = value.get<double>();
      else if (key == "trials")
        cfg.trials = value.get<int>();
      else if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "first_stage") {
        const std::string name = value.get<std::string>();
        if (name == "tikhonov")
          cfg.first_stage = FirstStage::Tikhonov;
        else if (name == "median")
          cfg.first_stage = FirstStage::Median;
        else
          throw InvalidParameter("config: first_stage must be tikhonov|median");
      } else if (key == "mode") {
        const std::string name = value.get<std::string>();
        if (name == "experiment")
          cfg.mode = RunMode::Experiment;
        else if (name == "blind")
          cfg.mode = RunMode::Blind;
        else
          throw InvalidParameter("config: mode must be experiment|blind");
      } else if (key == "snr_convention") {
        const std::string name = value.get<std::string>();
        if (name == "paper")
          cfg.snr_convention = SnrConvention::NormRatio;
        else if (name == "conventional")
          cfg.snr_convention = SnrConvention::Conventional;
        else
          throw InvalidParameter(
              "config: snr_convention must be paper|conventional");
      } else if (key == "tikhonov")
        cfg.tikhonov.gamma = value.at("gamma").get<double>();
      else if (key == "median") {
        if (value.contains("iterations"))
          cfg.median.iterations = value["iterations"].get<int>();
        if (value.contains("include_temporal_neighbors"))
          cfg.median.include_temporal_neighbors =
              value["include_temporal_neighbors"].get<bool>();
      } else if (key == "ridge")
        cfg.ridge = value.get<double>();
      else if (key == "sweep_gamma")
        cfg.sweep_gamma = value.get<bool>();
      else
        throw InvalidParameter("config: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter("config: bad value for '" + key + "': " +
                             e.what());
    }
  }
  return cfg;
}

nlohmann::json report_to_json(const DenoiseReport& report) {
  nlohmann::json j;
  j["mode"] = mode_name(report.mode);
  j["snr_convention"] = convention_name(report.snr_convention);
  put_if_finite(j, "input_snr_db", report.input_snr_db);
  put_if_finite(j, "first_stage_snr_db", report.first_stage_snr_db);
  put_if_finite(j, "second_stage_snr_db", report.second_stage_snr_db);
  j["best_orders"] = {{"a", report.best_a}, {"b", report.best_b}};
  put_if_finite(j, "gamma", report.gamma);
  j["any_ill_conditioned"] = report.any_ill_conditioned;
  j["max_imag_residue"] = report.max_imag_residue;

  const char* value_key =
      report.mode == RunMode::Experiment ? "snr_db" : "residual";
  nlohmann::json surface = nlohmann::json::array();
  for (const SurfacePoint& pt : report.surface)
    surface.push_back({{"a", pt.a}, {"b", pt.b}, {value_key, pt.value}});
  j["surface"] = std::move(surface);

  nlohmann::json trials = nlohmann::json::array();
  for (const TrialBreakdown& trial : report.trials) {
    nlohmann::json tj;
    put_if_finite(tj, "input_snr_db", trial.input_snr_db);
    put_if_finite(tj, "first_stage_snr_db", trial.first_stage_snr_db);
    put_if_finite(tj, "second_stage_snr_db", trial.second_stage_snr_db);
    tj["best_orders"] = {{"a", trial.best_a}, {"b", trial.best_b}};
    nlohmann::json tsurf = nlohmann::json::array();
    for (const SurfacePoint& pt : trial.surface)
      tsurf.push_back({{"a", pt.a}, {"b", pt.b}, {value_key, pt.value}});
    tj["surface"] = std::move(tsurf);
    trials.push_back(std::move(tj));
  }
  j["trials"] = std::move(trials);
  return j;
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish_write(out, path);
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in = open_for_read(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::uint64_t hash = 14695981039346656037ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

void write_manifest(
    const std::string& path, const nlohmann::json& config_echo,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    std::uint64_t seed) {
  nlohmann::json j;
  j["config"] = config_echo;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, file_path] : inputs) {
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(file_path)));
    files[name] = {{"path", file_path}, {"fnv1a", hex}};
  }
  j["inputs"] = std::move(files);
  j["seed"] = seed;
  j["version"] = kVersion;
  const auto now = std::chrono::system_clock::now();
  j["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  save_json(path, j);
}

}  // namespace tvfrft::io
