// Graph representation, k-NN construction from geographic coordinates,
// graph and cycle Laplacians, and eigendecomposition of normal operators.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

namespace tvfrft {

// Undirected weighted graph. The adjacency matrix is kept exactly symmetric
// with a zero diagonal and nonnegative weights.
struct Graph {
  int n_vertices = 0;
  Eigen::MatrixXd adjacency;
  // (latitude, longitude) in degrees, when the graph came from coordinates.
  std::optional<std::vector<std::array<double, 2>>> coordinates;
};

// Orthonormal eigenbasis and eigenvalues of a normal operator.
// Eigenvalues are sorted ascending by real part, ties by imaginary part,
// and each eigenvector's first nonzero component is made real-positive.
struct SpectralDecomposition {
  Eigen::MatrixXcd basis;       // columns are eigenvectors
  Eigen::VectorXcd eigenvalues;
};

// Directed cyclic shift of order T: adjacency(t, (t+1) mod T) = 1.
struct CycleShift {
  int order = 0;
  Eigen::MatrixXd adjacency;
};

enum class DistanceMetric { Haversine, Euclidean };
enum class WeightScheme { Gaussian, Binary };

struct KnnOptions {
  DistanceMetric metric = DistanceMetric::Haversine;
  WeightScheme weights = WeightScheme::Gaussian;
};

// Great-circle distance in kilometres between two (lat, lon) points in degrees.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Connects each vertex to its k nearest neighbours (ties broken by lower
// index), symmetrizes by union, and weights edges exp(-d^2/sigma^2) with
// sigma the mean of all selected neighbour distances.
Graph build_knn_graph(const std::vector<std::array<double, 2>>& coords, int k,
                      const KnnOptions& options = {});

// Throws InvalidParameter if g violates the Graph invariants.
void validate_graph(const Graph& g);

// L = D - A with D the diagonal of row sums.
Eigen::MatrixXd laplacian(const Graph& g);

CycleShift cycle_shift(int t);

// L_T = I - A_T. Not symmetric, but circulant.
Eigen::MatrixXd cycle_laplacian(int t);

// Eigendecomposition restricted to normal operators (Hermitian, circulant,
// unitary, ...). Circulant inputs are diagonalized analytically in the DFT
// basis; other normal inputs go through Hermitian solvers so the basis is
// orthonormal even with repeated eigenvalues. Set hermitian_hint to skip
// structure detection for a known-Hermitian operator.
SpectralDecomposition eigendecompose(const Eigen::MatrixXcd& op,
                                     bool hermitian_hint = false);
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& op,
                                     bool hermitian_hint = false);

}  // namespace tvfrft
