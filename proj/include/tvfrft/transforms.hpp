#pragma once

#include <Eigen/Dense>
#include <complex>

namespace tvfrft {

// N x T real matrix: one column per time step, one row per vertex.
// vec() stacks columns, so time step t occupies the contiguous block
// [t*N, (t+1)*N) — the ordering every U_T (x) U_G Kronecker product
// in this library assumes.
struct TimeVertexSignal {
  Eigen::MatrixXd values;
  int n = 0;
  int t = 0;

  TimeVertexSignal() = default;
  explicit TimeVertexSignal(Eigen::MatrixXd x)
      : values(std::move(x)),
        n(static_cast<int>(values.rows())),
        t(static_cast<int>(values.cols())) {}
};

// Length-NT complex spectrum plus the fractional orders that produced it;
// (1, 1) marks the ordinary joint Fourier transform.
struct JointSpectrum {
  Eigen::VectorXcd values;
  int n = 0;
  int t = 0;
  double order_a = 1.0;
  double order_b = 1.0;
};

Eigen::VectorXcd vec(const Eigen::MatrixXcd& x);
Eigen::VectorXd vec(const Eigen::MatrixXd& x);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& x, int n, int t);

// Unitary DFT matrix, entry (j,k) = e^{-2 pi i jk/T} / sqrt(T). Its columns
// are the eigenvectors of cycle_laplacian(T).
Eigen::MatrixXcd dft_matrix(int t);

// Forward analysis fixed as (U_T (x) U_G)^H vec(X), computed in matrix form
// as U_G^H X conj(U_T). The synthesis matrix is then exactly U_T (x) U_G.
JointSpectrum jft(const TimeVertexSignal& sig, const Eigen::MatrixXcd& u_g,
                  const Eigen::MatrixXcd& u_t);

// Inverse transform U_G Xhat U_T^T; returns the real part, which is the
// whole signal whenever the spectrum came from a real X.
TimeVertexSignal ijft(const JointSpectrum& spec, const Eigen::MatrixXcd& u_g,
                      const Eigen::MatrixXcd& u_t);

// Dense NT x NT synthesis operator U_T (x) U_G. Test/inspection helper;
// the transforms above never materialize it.
Eigen::MatrixXcd ijft_matrix(const Eigen::MatrixXcd& u_g,
                             const Eigen::MatrixXcd& u_t);

}  // namespace tvfrft
