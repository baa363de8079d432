#include "tvfrft/baseline.hpp"

#include <algorithm>
#include <vector>

#include "tvfrft/errors.hpp"
#include "tvfrft/transforms.hpp"

namespace tvfrft {

TikhonovResult tikhonov_denoise(const Eigen::VectorXd& y,
                                const SpectralDecomposition& temporal,
                                const SpectralDecomposition& graph,
                                const TikhonovConfig& cfg) {
  if (!(cfg.gamma >= 0.0))
    throw InvalidParameter("tikhonov_denoise: gamma must be >= 0");
  const Eigen::Index n = graph.basis.rows();
  const Eigen::Index t = temporal.basis.rows();
  if (y.size() != n * t)
    throw InvalidParameter("tikhonov_denoise: signal length must be N*T");

  const Eigen::Map<const Eigen::MatrixXd> y_mat(y.data(), n, t);
  Eigen::MatrixXcd spectrum = graph.basis.adjoint() *
                              y_mat.cast<std::complex<double>>() *
                              temporal.basis.conjugate();
  for (Eigen::Index k = 0; k < t; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      spectrum(i, k) /=
          1.0 + cfg.gamma * (temporal.eigenvalues[k] + graph.eigenvalues[i]);
  const Eigen::MatrixXcd z =
      graph.basis * spectrum * temporal.basis.transpose();

  TikhonovResult out;
  const Eigen::MatrixXd z_real = z.real();
  out.values = Eigen::Map<const Eigen::VectorXd>(z_real.data(), n * t);
  out.imag_residue = z.imag().cwiseAbs().maxCoeff();
  return out;
}

Eigen::MatrixXd recursive_median_filter(const Eigen::MatrixXd& y,
                                        const Graph& g,
                                        const MedianConfig& cfg) {
  if (cfg.iterations < 1)
    throw InvalidParameter("recursive_median_filter: iterations must be >= 1");
  if (y.rows() != g.n_vertices)
    throw InvalidParameter("recursive_median_filter: row count != vertices");
  if (!y.allFinite())
    throw InvalidInput("recursive_median_filter: non-finite input");

  const int n = g.n_vertices;
  const int t = static_cast<int>(y.cols());
  std::vector<std::vector<int>> neighbors(n);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (g.adjacency(v, u) > 0.0) neighbors[v].push_back(u);

  Eigen::MatrixXd current = y;
  std::vector<double> window;
  for (int it = 0; it < cfg.iterations; ++it) {
    Eigen::MatrixXd next(n, t);
    for (int k = 0; k < t; ++k) {
      for (int v = 0; v < n; ++v) {
        window.clear();
        window.push_back(current(v, k));
        for (int u : neighbors[v]) window.push_back(current(u, k));
        if (cfg.include_temporal_neighbors) {
          window.push_back(current(v, std::max(k - 1, 0)));
          window.push_back(current(v, std::min(k + 1, t - 1)));
        }
        std::sort(window.begin(), window.end());
        const std::size_t m = window.size();
        next(v, k) = m % 2 == 1
                         ? window[m / 2]
                         : 0.5 * (window[m / 2 - 1] + window[m / 2]);
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace tvfrft
