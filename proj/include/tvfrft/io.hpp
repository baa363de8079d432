#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tvfrft/graph.hpp"
#include "tvfrft/pipeline.hpp"
#include "tvfrft/transforms.hpp"
#include "tvfrft/wiener.hpp"

namespace tvfrft::io {

inline constexpr const char* kVersion = "0.1.0";

// Shortest exact decimal form (17 significant digits), used for every float
// this module writes so outputs are byte-reproducible.
std::string format_double(double v);

// Signal CSV: N rows x T columns of reals, no header.
TimeVertexSignal load_signal(const std::string& path);
void save_signal(const std::string& path, const Eigen::MatrixXd& x);

// Coordinates CSV: header id,lat,lon; ids must run 0..N-1 in order.
std::vector<std::array<double, 2>> load_coordinates(const std::string& path);
void save_coordinates(const std::string& path,
                      const std::vector<std::array<double, 2>>& coords);

// Edge list CSV: header src,dst,weight with src < dst, sorted.
void save_edges(const std::string& path, const Graph& g);

// Coefficients CSV: header p,q,re,im, one row per coefficient in vec order.
void save_coefficients(const std::string& path, const FilterCoefficients& c);

// Surface CSV: a,b,<snr_db|residual>,is_best; the flagged row is the
// grid-search winner.
void save_surface(const std::string& path, const DenoiseReport& report);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Overlay a JSON document (typically a --config file) onto base; unknown
// keys are rejected so typos fail loudly.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base);

nlohmann::json report_to_json(const DenoiseReport& report);
void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

std::uint64_t fnv1a_file(const std::string& path);

// manifest.json: config echo, input hashes, seed, version, timestamp —
// everything needed to reproduce the run (timestamp aside, outputs are
// byte-identical across reruns).
void write_manifest(
    const std::string& path, const nlohmann::json& config_echo,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    std::uint64_t seed);

}  // namespace tvfrft::io
