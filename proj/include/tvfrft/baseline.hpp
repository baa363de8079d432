#pragma once

#include <Eigen/Dense>

#include "tvfrft/graph.hpp"

namespace tvfrft {

struct TikhonovConfig {
  double gamma = 1.0;
};

struct MedianConfig {
  int iterations = 2;
  bool include_temporal_neighbors = true;
};

struct TikhonovResult {
  Eigen::VectorXd values;   // NT, real synthesis
  double imag_residue = 0.0;  // max |imag| discarded at synthesis; the
                              // caller should surface values above 1e-8
};

// Minimizer of ||z - y||^2 + gamma z^H L_J z on the Cartesian product
// graph, L_J = L_T (x) I + I (x) L_G, evaluated spectrally: every joint
// Fourier coefficient is scaled by 1/(1 + gamma (lambda_T + lambda_G)).
TikhonovResult tikhonov_denoise(const Eigen::VectorXd& y,
                                const SpectralDecomposition& temporal,
                                const SpectralDecomposition& graph,
                                const TikhonovConfig& cfg);

// Each entry becomes the median of its graph neighbors, itself, and
// (optionally) its clamped temporal neighbors; iterations feed forward.
Eigen::MatrixXd recursive_median_filter(const Eigen::MatrixXd& y,
                                        const Graph& g,
                                        const MedianConfig& cfg);

}  // namespace tvfrft
