#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "tvfrft/baseline.hpp"
#include "tvfrft/errors.hpp"
#include "tvfrft/graph.hpp"
#include "tvfrft/rng.hpp"
#include "tvfrft/transforms.hpp"

using namespace tvfrft;

namespace {

Graph random_graph(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<double, 2>> pts(n);
  for (auto& p : pts)
    p = {rng.uniform(35.0, 45.0), rng.uniform(-10.0, 10.0)};
  return build_knn_graph(pts, std::min(3, n - 1));
}

Graph ring_graph(int n) {
  Graph g;
  g.n_vertices = n;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    g.adjacency(i, j) = g.adjacency(j, i) = 1.0;
  }
  return g;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

// Dense reference: minimizer of ||z - y||^2 + gamma z^T L_J z solved as the
// linear system (I + gamma L_J) z = y with the Cartesian joint Laplacian.
Eigen::VectorXd dense_tikhonov(const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& l_t,
                               const Eigen::MatrixXd& l_g, double gamma) {
  const Eigen::Index n = l_g.rows(), t = l_t.rows();
  const Eigen::MatrixXd joint =
      Eigen::kroneckerProduct(l_t, Eigen::MatrixXd::Identity(n, n)) +
      Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(t, t), l_g);
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n * t, n * t) + gamma * joint;
  return system.partialPivLu().solve(y);
}

}  // namespace

TEST_CASE("tikhonov with gamma 0 returns the input") {
  const Graph g = random_graph(6, 2);
  const SpectralDecomposition dg = eigendecompose(laplacian(g), true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(4));
  const Eigen::VectorXd y = random_vector(24, 3);
  const TikhonovResult r = tikhonov_denoise(y, dt, dg, {0.0});
  CHECK((r.values - y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.imag_residue < 1e-12);
}

TEST_CASE("tikhonov rejects negative gamma and bad sizes") {
  const Graph g = random_graph(4, 5);
  const SpectralDecomposition dg = eigendecompose(laplacian(g), true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(2));
  const Eigen::VectorXd y = random_vector(8, 6);
  CHECK_THROWS_AS(tikhonov_denoise(y, dt, dg, {-1.0}), InvalidParameter);
  CHECK_THROWS_AS(tikhonov_denoise(y.head(7), dt, dg, {1.0}),
                  InvalidParameter);
}

TEST_CASE("huge gamma projects onto the joint constant mode") {
  const Graph g = random_graph(5, 7);
  const SpectralDecomposition dg = eigendecompose(laplacian(g), true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(4));
  const Eigen::VectorXd y = random_vector(20, 8);
  const TikhonovResult r = tikhonov_denoise(y, dt, dg, {1e12});
  const double mean = y.mean();
  CHECK((r.values.array() - mean).abs().maxCoeff() < 1e-3);
}

TEST_CASE("two-vertex static case matches the closed form") {
  Graph g;
  g.n_vertices = 2;
  g.adjacency = Eigen::MatrixXd::Zero(2, 2);
  g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
  const Eigen::MatrixXd l = laplacian(g);
  const SpectralDecomposition dg = eigendecompose(l, true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(1));

  const Eigen::VectorXd y = random_vector(2, 9);
  const TikhonovResult r = tikhonov_denoise(y, dt, dg, {1.0});

  // Gains 1/(1+0) and 1/(1+2) per graph frequency; equivalently the dense
  // resolvent (I + L)^{-1} y.
  const Eigen::Matrix2d system = Eigen::Matrix2d::Identity() + l;
  const Eigen::Vector2d oracle = system.inverse() * y;
  CHECK((r.values - oracle).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("tikhonov equals the dense joint resolvent") {
  const Graph g = random_graph(8, 10);
  const SpectralDecomposition dg = eigendecompose(laplacian(g), true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(6));
  const Eigen::VectorXd y = random_vector(48, 11);
  for (double gamma : {0.1, 1.0, 10.0}) {
    const TikhonovResult r = tikhonov_denoise(y, dt, dg, {gamma});
    const Eigen::VectorXd oracle =
        dense_tikhonov(y, cycle_laplacian(6), laplacian(g), gamma);
    CAPTURE(gamma);
    CHECK((r.values - oracle).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.imag_residue < 1e-8);
  }
}

TEST_CASE("tikhonov never amplifies energy and is linear") {
  const Graph g = random_graph(7, 12);
  const SpectralDecomposition dg = eigendecompose(laplacian(g), true);
  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(5));
  const Eigen::VectorXd y = random_vector(35, 13);
  const Eigen::VectorXd z = random_vector(35, 14);

  for (double gamma : {0.0, 0.5, 3.0, 100.0}) {
    const TikhonovResult r = tikhonov_denoise(y, dt, dg, {gamma});
    CHECK(r.values.norm() <= y.norm() + 1e-9);
  }

  const Eigen::VectorXd combined =
      tikhonov_denoise(2.0 * y - 3.0 * z, dt, dg, {1.5}).values;
  const Eigen::VectorXd separate =
      2.0 * tikhonov_denoise(y, dt, dg, {1.5}).values -
      3.0 * tikhonov_denoise(z, dt, dg, {1.5}).values;
  CHECK((combined - separate).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tikhonov is permutation-equivariant in the vertices") {
  const int n = 6, t = 3;
  const Graph g = random_graph(n, 15);
  const Eigen::MatrixXd y =
      Eigen::Map<const Eigen::MatrixXd>(random_vector(n * t, 16).data(), n, t);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[0], perm[3]);
  std::swap(perm[1], perm[5]);

  Graph h;
  h.n_vertices = n;
  h.adjacency = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y_perm(n, t);
  for (int i = 0; i < n; ++i) {
    y_perm.row(i) = y.row(perm[i]);
    for (int j = 0; j < n; ++j)
      h.adjacency(i, j) = g.adjacency(perm[i], perm[j]);
  }

  const SpectralDecomposition dt = eigendecompose(cycle_laplacian(t));
  const Eigen::VectorXd out = tikhonov_denoise(
      vec(y), dt, eigendecompose(laplacian(g), true), {2.0}).values;
  const Eigen::VectorXd out_perm = tikhonov_denoise(
      vec(y_perm), dt, eigendecompose(laplacian(h), true), {2.0}).values;

  const Eigen::MatrixXd out_mat = Eigen::Map<const Eigen::MatrixXd>(
      out.data(), n, t);
  const Eigen::MatrixXd out_perm_mat = Eigen::Map<const Eigen::MatrixXd>(
      out_perm.data(), n, t);
  for (int i = 0; i < n; ++i)
    CHECK((out_perm_mat.row(i) - out_mat.row(perm[i])).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("median filter fixes constants") {
  const Graph g = ring_graph(5);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Constant(5, 4, 3.25);
  const Eigen::MatrixXd out = recursive_median_filter(y, g, {3, true});
  CHECK((out - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("median filter removes an impulse on the 4-ring") {
  const Graph g = ring_graph(4);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 1);
  y(0, 0) = 10.0;
  const Eigen::MatrixXd out = recursive_median_filter(y, g, {1, false});
  // Window at the impulse vertex: {10, 0, 0} -> median 0; at its neighbors:
  // {0, 10, 0} -> 0; the impulse is gone in one pass.
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("even-sized windows average the two middle values") {
  Graph g;
  g.n_vertices = 2;
  g.adjacency = Eigen::MatrixXd::Zero(2, 2);
  g.adjacency(0, 1) = g.adjacency(1, 0) = 1.0;
  Eigen::MatrixXd y(2, 1);
  y << 0.0, 10.0;
  const Eigen::MatrixXd out = recursive_median_filter(y, g, {1, false});
  CHECK(out(0, 0) == 5.0);
  CHECK(out(1, 0) == 5.0);
}

TEST_CASE("temporal neighbors clamp at the boundaries") {
  // Edgeless graph: every window is {self, clamped t-1, clamped t+1}.
  Graph g;
  g.n_vertices = 1;
  g.adjacency = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd y(1, 3);
  y << 0.0, 12.0, 6.0;
  const Eigen::MatrixXd out = recursive_median_filter(y, g, {1, true});
  CHECK(out(0, 0) == 0.0);   // {0, 0, 12}
  CHECK(out(0, 1) == 6.0);   // {12, 0, 6}
  CHECK(out(0, 2) == 6.0);   // {6, 12, 6}
}

TEST_CASE("median output stays inside the input range") {
  Rng rng(17);
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 4 + static_cast<int>(rng.uniform() * 9);
    const int t = 1 + static_cast<int>(rng.uniform() * 6);
    const Graph g = random_graph(n, 1000 + instance);
    Eigen::MatrixXd y(n, t);
    for (int j = 0; j < t; ++j)
      for (int i = 0; i < n; ++i) y(i, j) = rng.gaussian() * 10.0;
    const MedianConfig cfg{1 + static_cast<int>(rng.uniform() * 3),
                           rng.uniform() < 0.5};
    const Eigen::MatrixXd out = recursive_median_filter(y, g, cfg);
    CHECK(out.minCoeff() >= y.minCoeff());
    CHECK(out.maxCoeff() <= y.maxCoeff());
  }
}

TEST_CASE("median filter parameter validation") {
  const Graph g = ring_graph(4);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_AS(recursive_median_filter(y, g, {0, true}), InvalidParameter);
  CHECK_THROWS_AS(
      recursive_median_filter(Eigen::MatrixXd::Zero(3, 2), g, {1, true}),
      InvalidParameter);
  Eigen::MatrixXd bad = y;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(recursive_median_filter(bad, g, {1, true}), InvalidInput);
}
