#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace tvfrft {

// Q x P coefficient grid C, entry (q, p) = c_{p,q}, and its column-stacking
// c = vec(C): index p*Q + q. Every PQ-indexed object in this module (B
// columns, Psi columns, R, r) follows that same p-major ordering.
struct FilterCoefficients {
  Eigen::MatrixXcd grid;
  Eigen::VectorXcd vector;
  int p_order = 0;
  int q_order = 0;
};

FilterCoefficients make_coefficients(const Eigen::VectorXcd& c, int p_order,
                                     int q_order);

// Assembled normal equations R c = r plus the pieces they came from. psi may
// be left empty by the factored assembly path, which never materializes it.
struct WienerSystem {
  Eigen::MatrixXcd autocorrelation;    // PQ x PQ, Hermitian
  Eigen::VectorXcd cross_correlation;  // PQ
  Eigen::MatrixXcd psi;                // NT x PQ or empty
  Eigen::VectorXcd noisy_spectrum;     // y_F
  Eigen::VectorXcd reference_spectrum; // x_F
  int p_order = 0;
  int q_order = 0;
};

// Weighting of the reference spectrum inside r. ConjugateWeights
// (r = Psi^H diag(conj(y_F)) x_F) is the form the B-matrix identity
// B^H x produces and is the default; ModulusSquaredWeights keeps the
// diag(|y_F|^2) variant for comparison.
enum class CrossCorrelationForm { ConjugateWeights, ModulusSquaredWeights };

struct SolveResult {
  FilterCoefficients coefficients;
  bool ill_conditioned = false;
  double condition_estimate = 0.0;  // only populated on the ridge-free path
};

// Column k = elementwise k-th power of frac_eigs; column 0 all ones.
Eigen::MatrixXcd build_vandermonde(const Eigen::VectorXcd& frac_eigs,
                                   int degree);

// B with column (p*Q + q) = (L_T^p (x) L_G^q) y, evaluated in matrix form.
Eigen::MatrixXcd build_regression_matrix(const Eigen::VectorXcd& y,
                                         const Eigen::MatrixXcd& l_t_frac,
                                         const Eigen::MatrixXcd& l_g_frac,
                                         int p_order, int q_order);

// R = Psi^H diag(|y_F|^2) Psi and r per CrossCorrelationForm.
WienerSystem assemble_wiener_system(
    const Eigen::VectorXcd& y_f, const Eigen::VectorXcd& x_f,
    const Eigen::MatrixXcd& psi, int p_order, int q_order,
    CrossCorrelationForm form = CrossCorrelationForm::ConjugateWeights);

// Same system averaged over several (y_F, x_F) realizations.
WienerSystem assemble_wiener_system(
    const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>& spectra,
    const Eigen::MatrixXcd& psi, int p_order, int q_order,
    CrossCorrelationForm form = CrossCorrelationForm::ConjugateWeights);

// Kronecker-factored assembly: spectra come as N x T matrices and Psi as its
// temporal (T x P) and graph (N x Q) factors. Produces the same R and r as
// the dense form at a fraction of the cost; leaves psi empty.
WienerSystem assemble_wiener_system_factored(
    const Eigen::MatrixXcd& y_f, const Eigen::MatrixXcd& x_f,
    const Eigen::MatrixXcd& psi_t, const Eigen::MatrixXcd& psi_g,
    CrossCorrelationForm form = CrossCorrelationForm::ConjugateWeights);

// 1e-8 * trace(R)/PQ: vanishes on well-scaled systems, stabilizes the rest.
double default_ridge(const WienerSystem& sys);

// Solve (R + ridge I) c = r. ridge > 0 uses a Cholesky-type factorization;
// ridge = 0 solves the minimum-norm least-squares problem through the
// eigendecomposition of R and reports conditioning.
SolveResult solve_coefficients(const WienerSystem& sys, double ridge);

// H y = sum_{p,q} c_{p,q} (L_T^p (x) L_G^q) y without materializing H.
Eigen::VectorXcd apply_joint_filter(const FilterCoefficients& coeffs,
                                    const Eigen::MatrixXcd& l_t_frac,
                                    const Eigen::MatrixXcd& l_g_frac,
                                    const Eigen::VectorXcd& y);

// h(lambda_T, lambda_G) at every joint eigenvalue pair; equals Psi * c.
Eigen::VectorXcd frequency_response(const FilterCoefficients& coeffs,
                                    const Eigen::VectorXcd& frac_eigs_t,
                                    const Eigen::VectorXcd& frac_eigs_g);

}  // namespace tvfrft
