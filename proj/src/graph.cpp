#include "tvfrft/graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "tvfrft/errors.hpp"

namespace tvfrft {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Chain-cluster sorted values: indices i, i+1 belong together when the gap
// is below tol.
std::vector<std::pair<int, int>> cluster_ranges(const Eigen::VectorXd& sorted,
                                                double tol) {
  std::vector<std::pair<int, int>> ranges;
  const int n = static_cast<int>(sorted.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || sorted[i] - sorted[i - 1] > tol) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

// Deterministic ordering and phase convention shared by all decomposition
// paths: eigenvalues ascending by real part (ties by imaginary part), the
// first nonzero component of each eigenvector made real-positive.
SpectralDecomposition canonicalize(Eigen::MatrixXcd basis,
                                   Eigen::VectorXcd eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto &ea = eigenvalues[a], &eb = eigenvalues[b];
    if (ea.real() != eb.real()) return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });

  SpectralDecomposition out;
  out.basis.resize(n, n);
  out.eigenvalues.resize(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd v = basis.col(order[j]);
    for (int i = 0; i < n; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        v *= std::conj(v[i]) / std::abs(v[i]);
        break;
      }
    }
    out.basis.col(j) = v;
    out.eigenvalues[j] = eigenvalues[order[j]];
  }
  return out;
}

SpectralDecomposition decompose_hermitian(const Eigen::MatrixXcd& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigendecompose: Hermitian solver failed");
  Eigen::VectorXd vals = solver.eigenvalues();
  // Snap round-off-sized eigenvalues to exact zero so fractional powers of
  // a PSD spectrum stay on the nonnegative real axis.
  const double snap =
      8.0 * vals.size() * std::numeric_limits<double>::epsilon() *
      vals.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (std::abs(vals[i]) <= snap) vals[i] = 0.0;
  return canonicalize(solver.eigenvectors(), vals.cast<std::complex<double>>());
}

bool is_circulant(const Eigen::MatrixXcd& op, double tol) {
  const int n = static_cast<int>(op.rows());
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(op(i, j) - op(0, (j - i + n) % n)) > tol) return false;
  return true;
}

// Circulant operators are diagonalized by the DFT columns
// v_k(j) = e^{-2*pi*i*j*k/n}/sqrt(n) with eigenvalue
// sum_m op(0,m) e^{-2*pi*i*m*k/n}; no numerical solver involved.
SpectralDecomposition decompose_circulant(const Eigen::MatrixXcd& op) {
  const int n = static_cast<int>(op.rows());
  Eigen::MatrixXcd basis(n, n);
  Eigen::VectorXcd vals(n);
  const double step = 2.0 * std::numbers::pi / n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    std::complex<double> lambda(0.0, 0.0);
    for (int m = 0; m < n; ++m)
      lambda += op(0, m) * std::polar(1.0, -step * m * k);
    vals[k] = lambda;
    for (int j = 0; j < n; ++j) basis(j, k) = std::polar(scale, -step * j * k);
  }

  // A real generating row makes the spectrum conjugate-symmetric,
  // lambda_{n-k} = conj(lambda_k), with lambda_0 (and lambda_{n/2} for even
  // n) real. Round-off in the twiddle factors breaks those identities by
  // ~1e-16, enough to derail the real-part tie in the eigenvalue sort, so
  // restore them exactly.
  if (op.row(0).imag().isZero(0.0)) {
    vals[0] = vals[0].real();
    for (int k = 1; 2 * k <= n; ++k) {
      if (2 * k == n)
        vals[k] = vals[k].real();
      else
        vals[n - k] = std::conj(vals[k]);
    }
  }
  return canonicalize(std::move(basis), std::move(vals));
}

// Any normal operator W = H1 + i*H2 with commuting Hermitian parts: the
// eigenbasis of H1, refined inside each degenerate block by the projected
// H2, diagonalizes both, hence W. This stays orthonormal under repeated
// eigenvalues, where a general eigensolver would not.
SpectralDecomposition decompose_normal(const Eigen::MatrixXcd& op) {
  const int n = static_cast<int>(op.rows());
  const Eigen::MatrixXcd herm = 0.5 * (op + op.adjoint());
  const Eigen::MatrixXcd skew =
      (op - op.adjoint()) / std::complex<double>(0.0, 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> stage1(herm);
  if (stage1.info() != Eigen::Success)
    throw NumericError("eigendecompose: Hermitian stage failed");
  Eigen::MatrixXcd basis = stage1.eigenvectors();

  const double scale = std::max(1.0, stage1.eigenvalues().cwiseAbs().maxCoeff());
  const auto ranges = cluster_ranges(stage1.eigenvalues(), 1e-10 * scale);
  for (const auto& [lo, hi] : ranges) {
    const int width = hi - lo;
    if (width < 2) continue;
    const Eigen::MatrixXcd block = basis.middleCols(lo, width);
    Eigen::MatrixXcd projected = block.adjoint() * skew * block;
    projected = 0.5 * (projected + projected.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> stage2(projected);
    if (stage2.info() != Eigen::Success)
      throw NumericError("eigendecompose: block refinement failed");
    basis.middleCols(lo, width) = block * stage2.eigenvectors();
  }

  Eigen::VectorXcd vals(n);
  for (int j = 0; j < n; ++j) {
    const auto v = basis.col(j);
    vals[j] = v.dot(op * v);  // Rayleigh quotient; exact on an eigenvector
  }
  return canonicalize(std::move(basis), std::move(vals));
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double rad = std::numbers::pi / 180.0;
  const double dphi = (lat2 - lat1) * rad;
  const double dlam = (lon2 - lon1) * rad;
  const double s1 = std::sin(0.5 * dphi);
  const double s2 = std::sin(0.5 * dlam);
  const double h =
      s1 * s1 + std::cos(lat1 * rad) * std::cos(lat2 * rad) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

Graph build_knn_graph(const std::vector<std::array<double, 2>>& coords, int k,
                      const KnnOptions& options) {
  const int n = static_cast<int>(coords.size());
  if (k < 1) throw InvalidParameter("build_knn_graph: k must be >= 1");
  if (n < k + 1)
    throw InvalidParameter("build_knn_graph: need at least k+1 points");
  for (const auto& c : coords)
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]))
      throw InvalidInput("build_knn_graph: non-finite coordinate");

  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d =
          options.metric == DistanceMetric::Haversine
              ? haversine_km(coords[i][0], coords[i][1], coords[j][0],
                             coords[j][1])
              : std::hypot(coords[i][0] - coords[j][0],
                           coords[i][1] - coords[j][1]);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  // Directed selections: each vertex picks its k nearest, ties by lower index.
  std::vector<std::pair<int, int>> selected;
  selected.reserve(static_cast<std::size_t>(n) * k);
  double sigma_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) order.emplace_back(dist(i, j), j);
    std::sort(order.begin(), order.end());
    for (int m = 0; m < k; ++m) {
      selected.emplace_back(i, order[m].second);
      sigma_sum += order[m].first;
    }
  }
  const double sigma = sigma_sum / static_cast<double>(selected.size());

  Graph g;
  g.n_vertices = n;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  g.coordinates = coords;
  for (const auto& [i, j] : selected) {
    double w = 1.0;
    if (options.weights == WeightScheme::Gaussian && sigma > 0.0) {
      const double r = dist(i, j) / sigma;
      w = std::exp(-r * r);
    }
    g.adjacency(i, j) = w;
    g.adjacency(j, i) = w;
  }
  return g;
}

void validate_graph(const Graph& g) {
  const auto& a = g.adjacency;
  if (a.rows() != g.n_vertices || a.cols() != g.n_vertices)
    throw InvalidParameter("Graph: adjacency size does not match n_vertices");
  if (!all_finite(a)) throw InvalidInput("Graph: non-finite weight");
  for (int i = 0; i < g.n_vertices; ++i) {
    if (a(i, i) != 0.0) throw InvalidParameter("Graph: nonzero diagonal");
    for (int j = 0; j < g.n_vertices; ++j) {
      if (a(i, j) < 0.0) throw InvalidParameter("Graph: negative weight");
      if (a(i, j) != a(j, i))
        throw InvalidParameter("Graph: adjacency not symmetric");
    }
  }
}

Eigen::MatrixXd laplacian(const Graph& g) {
  validate_graph(g);
  Eigen::MatrixXd l = -g.adjacency;
  for (int i = 0; i < g.n_vertices; ++i) l(i, i) = g.adjacency.row(i).sum();
  return l;
}

CycleShift cycle_shift(int t) {
  if (t < 1) throw InvalidParameter("cycle_shift: order must be >= 1");
  CycleShift c;
  c.order = t;
  c.adjacency = Eigen::MatrixXd::Zero(t, t);
  for (int i = 0; i < t; ++i) c.adjacency(i, (i + 1) % t) = 1.0;
  return c;
}

Eigen::MatrixXd cycle_laplacian(int t) {
  const CycleShift c = cycle_shift(t);
  return Eigen::MatrixXd::Identity(t, t) - c.adjacency;
}

SpectralDecomposition eigendecompose(const Eigen::MatrixXcd& op,
                                     bool hermitian_hint) {
  if (op.rows() != op.cols())
    throw InvalidParameter("eigendecompose: operator must be square");
  if (!op.allFinite()) throw InvalidInput("eigendecompose: non-finite entry");

  const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  if (hermitian_hint ||
      (op - op.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale)
    return decompose_hermitian(op);
  if (is_circulant(op, 1e-13 * scale)) return decompose_circulant(op);

  const Eigen::MatrixXcd commutator = op * op.adjoint() - op.adjoint() * op;
  if (commutator.cwiseAbs().maxCoeff() > 1e-8)
    throw UnsupportedOperator("eigendecompose: operator is not normal");
  return decompose_normal(op);
}

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& op,
                                     bool hermitian_hint) {
  return eigendecompose(op.cast<std::complex<double>>().eval(), hermitian_hint);
}

}  // namespace tvfrft
