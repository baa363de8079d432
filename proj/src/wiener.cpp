#include "tvfrft/wiener.hpp"

#include <cmath>
#include <complex>

#include "tvfrft/errors.hpp"

namespace tvfrft {

namespace {

void check_orders(int p_order, int q_order, const char* where) {
  if (p_order < 1 || q_order < 1)
    throw InvalidParameter(std::string(where) + ": P and Q must be >= 1");
}

Eigen::VectorXcd cross_weights(const Eigen::VectorXcd& y_f,
                               CrossCorrelationForm form) {
  if (form == CrossCorrelationForm::ModulusSquaredWeights)
    return y_f.cwiseAbs2().cast<std::complex<double>>();
  return y_f.conjugate();
}

}  // namespace

FilterCoefficients make_coefficients(const Eigen::VectorXcd& c, int p_order,
                                     int q_order) {
  check_orders(p_order, q_order, "make_coefficients");
  if (c.size() != static_cast<Eigen::Index>(p_order) * q_order)
    throw InvalidParameter("make_coefficients: length must equal P*Q");
  FilterCoefficients out;
  out.vector = c;
  out.grid = Eigen::Map<const Eigen::MatrixXcd>(c.data(), q_order, p_order);
  out.p_order = p_order;
  out.q_order = q_order;
  return out;
}

Eigen::MatrixXcd build_vandermonde(const Eigen::VectorXcd& frac_eigs,
                                   int degree) {
  if (degree < 1)
    throw InvalidParameter("build_vandermonde: degree must be >= 1");
  Eigen::MatrixXcd psi(frac_eigs.size(), degree);
  psi.col(0).setOnes();
  for (int k = 1; k < degree; ++k)
    psi.col(k) = psi.col(k - 1).cwiseProduct(frac_eigs);
  return psi;
}

Eigen::MatrixXcd build_regression_matrix(const Eigen::VectorXcd& y,
                                         const Eigen::MatrixXcd& l_t_frac,
                                         const Eigen::MatrixXcd& l_g_frac,
                                         int p_order, int q_order) {
  check_orders(p_order, q_order, "build_regression_matrix");
  const Eigen::Index n = l_g_frac.rows();
  const Eigen::Index t = l_t_frac.rows();
  if (l_g_frac.cols() != n || l_t_frac.cols() != t || y.size() != n * t)
    throw InvalidParameter("build_regression_matrix: dimension mismatch");

  Eigen::MatrixXcd b(n * t, static_cast<Eigen::Index>(p_order) * q_order);
  Eigen::MatrixXcd y_p = Eigen::Map<const Eigen::MatrixXcd>(y.data(), n, t);
  for (int p = 0; p < p_order; ++p) {
    if (p > 0) y_p = y_p * l_t_frac.transpose();
    Eigen::MatrixXcd z = y_p;
    for (int q = 0; q < q_order; ++q) {
      if (q > 0) z = l_g_frac * z;
      b.col(static_cast<Eigen::Index>(p) * q_order + q) =
          Eigen::Map<const Eigen::VectorXcd>(z.data(), z.size());
    }
  }
  return b;
}

WienerSystem assemble_wiener_system(const Eigen::VectorXcd& y_f,
                                    const Eigen::VectorXcd& x_f,
                                    const Eigen::MatrixXcd& psi, int p_order,
                                    int q_order, CrossCorrelationForm form) {
  check_orders(p_order, q_order, "assemble_wiener_system");
  if (y_f.size() != psi.rows() || x_f.size() != psi.rows())
    throw InvalidParameter("assemble_wiener_system: spectrum/Psi mismatch");
  if (psi.cols() != static_cast<Eigen::Index>(p_order) * q_order)
    throw InvalidParameter("assemble_wiener_system: Psi columns != P*Q");

  WienerSystem sys;
  sys.autocorrelation =
      psi.adjoint() * y_f.cwiseAbs2().asDiagonal() * psi;
  sys.autocorrelation =
      0.5 * (sys.autocorrelation + sys.autocorrelation.adjoint()).eval();
  sys.cross_correlation =
      psi.adjoint() * cross_weights(y_f, form).cwiseProduct(x_f);
  sys.psi = psi;
  sys.noisy_spectrum = y_f;
  sys.reference_spectrum = x_f;
  sys.p_order = p_order;
  sys.q_order = q_order;
  return sys;
}

WienerSystem assemble_wiener_system(
    const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>& spectra,
    const Eigen::MatrixXcd& psi, int p_order, int q_order,
    CrossCorrelationForm form) {
  if (spectra.empty())
    throw InvalidParameter("assemble_wiener_system: no realizations");
  WienerSystem sys = assemble_wiener_system(spectra[0].first,
                                            spectra[0].second, psi, p_order,
                                            q_order, form);
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    const WienerSystem next = assemble_wiener_system(
        spectra[i].first, spectra[i].second, psi, p_order, q_order, form);
    sys.autocorrelation += next.autocorrelation;
    sys.cross_correlation += next.cross_correlation;
  }
  const double inv = 1.0 / static_cast<double>(spectra.size());
  sys.autocorrelation *= inv;
  sys.cross_correlation *= inv;
  return sys;
}

WienerSystem assemble_wiener_system_factored(const Eigen::MatrixXcd& y_f,
                                             const Eigen::MatrixXcd& x_f,
                                             const Eigen::MatrixXcd& psi_t,
                                             const Eigen::MatrixXcd& psi_g,
                                             CrossCorrelationForm form) {
  const Eigen::Index n = psi_g.rows();
  const Eigen::Index t = psi_t.rows();
  const int q_order = static_cast<int>(psi_g.cols());
  const int p_order = static_cast<int>(psi_t.cols());
  check_orders(p_order, q_order, "assemble_wiener_system_factored");
  if (y_f.rows() != n || y_f.cols() != t || x_f.rows() != n || x_f.cols() != t)
    throw InvalidParameter(
        "assemble_wiener_system_factored: spectrum/Psi factor mismatch");

  const Eigen::Index pq = static_cast<Eigen::Index>(p_order) * q_order;
  WienerSystem sys;
  sys.autocorrelation = Eigen::MatrixXcd::Zero(pq, pq);
  sys.cross_correlation = Eigen::VectorXcd::Zero(pq);

  // R((p1,q1),(p2,q2)) = sum_k conj(psiT(k,p1)) psiT(k,p2) *
  //                      [psiG^H diag(|y_F(:,k)|^2) psiG](q1,q2)
  // so each time column contributes one Q x Q kernel, replicated across the
  // P x P block structure. Same shape for r with the cross weights.
  for (Eigen::Index k = 0; k < t; ++k) {
    const Eigen::VectorXd w = y_f.col(k).cwiseAbs2();
    const Eigen::MatrixXcd kernel =
        psi_g.adjoint() * w.asDiagonal() * psi_g;
    Eigen::VectorXcd weighted_ref;
    if (form == CrossCorrelationForm::ModulusSquaredWeights)
      weighted_ref = w.cast<std::complex<double>>().cwiseProduct(x_f.col(k));
    else
      weighted_ref = y_f.col(k).conjugate().cwiseProduct(x_f.col(k));
    const Eigen::VectorXcd u = psi_g.adjoint() * weighted_ref;
    for (int p1 = 0; p1 < p_order; ++p1) {
      sys.cross_correlation.segment(static_cast<Eigen::Index>(p1) * q_order,
                                    q_order) += std::conj(psi_t(k, p1)) * u;
      for (int p2 = 0; p2 < p_order; ++p2) {
        sys.autocorrelation.block(static_cast<Eigen::Index>(p1) * q_order,
                                  static_cast<Eigen::Index>(p2) * q_order,
                                  q_order, q_order) +=
            std::conj(psi_t(k, p1)) * psi_t(k, p2) * kernel;
      }
    }
  }
  sys.autocorrelation =
      0.5 * (sys.autocorrelation + sys.autocorrelation.adjoint()).eval();
  sys.noisy_spectrum = Eigen::Map<const Eigen::VectorXcd>(y_f.data(), n * t);
  sys.reference_spectrum =
      Eigen::Map<const Eigen::VectorXcd>(x_f.data(), n * t);
  sys.p_order = p_order;
  sys.q_order = q_order;
  return sys;
}

double default_ridge(const WienerSystem& sys) {
  const Eigen::Index pq = sys.autocorrelation.rows();
  if (pq == 0) return 0.0;
  return 1e-8 * sys.autocorrelation.trace().real() / static_cast<double>(pq);
}

SolveResult solve_coefficients(const WienerSystem& sys, double ridge) {
  const Eigen::MatrixXcd& r_mat = sys.autocorrelation;
  const Eigen::VectorXcd& r_vec = sys.cross_correlation;
  if (!r_mat.allFinite() || !r_vec.allFinite())
    throw InvalidInput("solve_coefficients: non-finite system");
  if (!(ridge >= 0.0))
    throw InvalidParameter("solve_coefficients: ridge must be >= 0");
  const Eigen::Index pq = r_mat.rows();
  if (r_mat.cols() != pq || r_vec.size() != pq)
    throw InvalidParameter("solve_coefficients: system shape mismatch");

  SolveResult out;
  if (ridge > 0.0) {
    Eigen::MatrixXcd shifted = r_mat;
    shifted.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(shifted);
    if (ldlt.info() == Eigen::Success) {
      const Eigen::VectorXcd c = ldlt.solve(r_vec);
      if (c.allFinite()) {
        out.coefficients = make_coefficients(c, sys.p_order, sys.q_order);
        return out;
      }
    }
    // fall through to the spectral path if the factorization degenerates
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r_mat);
  if (es.info() != Eigen::Success)
    throw NumericError("solve_coefficients: eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = std::max(lam.maxCoeff(), 0.0);
  const double lam_min = lam.minCoeff();
  out.condition_estimate =
      lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition_estimate <= 1e12);

  // Minimum-norm least squares: invert only the resolvable part of the
  // spectrum (plus any explicit ridge that got us here).
  const double cutoff = 1e-12 * std::max(lam_max, 1.0);
  Eigen::VectorXcd projected = es.eigenvectors().adjoint() * r_vec;
  for (Eigen::Index i = 0; i < pq; ++i) {
    const double d = lam[i] + ridge;
    projected[i] = d > cutoff ? projected[i] / d : std::complex<double>(0.0);
  }
  out.coefficients = make_coefficients(es.eigenvectors() * projected,
                                       sys.p_order, sys.q_order);
  return out;
}

Eigen::VectorXcd apply_joint_filter(const FilterCoefficients& coeffs,
                                    const Eigen::MatrixXcd& l_t_frac,
                                    const Eigen::MatrixXcd& l_g_frac,
                                    const Eigen::VectorXcd& y) {
  const Eigen::Index n = l_g_frac.rows();
  const Eigen::Index t = l_t_frac.rows();
  if (l_g_frac.cols() != n || l_t_frac.cols() != t || y.size() != n * t)
    throw InvalidParameter("apply_joint_filter: dimension mismatch");
  if (coeffs.grid.rows() != coeffs.q_order ||
      coeffs.grid.cols() != coeffs.p_order)
    throw InvalidParameter("apply_joint_filter: malformed coefficients");

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, t);
  Eigen::MatrixXcd y_p = Eigen::Map<const Eigen::MatrixXcd>(y.data(), n, t);
  for (int p = 0; p < coeffs.p_order; ++p) {
    if (p > 0) y_p = y_p * l_t_frac.transpose();
    Eigen::MatrixXcd z = y_p;
    for (int q = 0; q < coeffs.q_order; ++q) {
      if (q > 0) z = l_g_frac * z;
      acc += coeffs.grid(q, p) * z;
    }
  }
  return Eigen::Map<const Eigen::VectorXcd>(acc.data(), acc.size());
}

Eigen::VectorXcd frequency_response(const FilterCoefficients& coeffs,
                                    const Eigen::VectorXcd& frac_eigs_t,
                                    const Eigen::VectorXcd& frac_eigs_g) {
  const Eigen::MatrixXcd psi_t = build_vandermonde(frac_eigs_t, coeffs.p_order);
  const Eigen::MatrixXcd psi_g = build_vandermonde(frac_eigs_g, coeffs.q_order);
  const Eigen::MatrixXcd response = psi_g * coeffs.grid * psi_t.transpose();
  return Eigen::Map<const Eigen::VectorXcd>(response.data(), response.size());
}

}  // namespace tvfrft
