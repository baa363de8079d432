#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "tvfrft/graph.hpp"

namespace tvfrft {

// Fractional transform matrix F^(a) for one order a in [0,1], together with
// the fractionally powered eigenvalues of the shift operator it belongs to.
struct FractionalBasis {
  double order = 0.0;
  Eigen::MatrixXcd transform;
  Eigen::VectorXcd frac_eigenvalues;
};

// Joint operator V^(a,b) = F_T^(a) (x) F_G^(b) with the matching Kronecker
// spectrum. Dense; meant for small sizes and inspection — the pipeline
// applies the factors separately.
struct JointFractionalBasis {
  double order_a = 0.0;
  double order_b = 0.0;
  Eigen::MatrixXcd joint_transform;
  Eigen::VectorXcd joint_frac_eigenvalues;
};

// How the fractional shift operator is assembled from F^(a) and Lambda^a.
// ReductionConsistent (default) puts the adjoint on the left,
// F^(a)H diag(Lambda^a) F^(a), so order 1 reproduces the shift operator
// itself. Literal keeps the mirrored form F^(a) diag(Lambda^a) F^(a)H.
enum class GfsoOrientation { ReductionConsistent, Literal };

// Principal-branch power z^a = e^{a Log z}, with 0^0 = 1 and 0^a = 0 for
// a > 0 (std::pow is unreliable at the origin).
std::complex<double> principal_power(std::complex<double> z, double a);

Eigen::VectorXcd fractional_powers(const Eigen::VectorXcd& eigs, double a);

// W^a = P diag(mu^a) P^H from a decomposition of the normal matrix W.
Eigen::MatrixXcd fractional_matrix_power(const SpectralDecomposition& decomp,
                                         double a);

// Shift decomposition {U, Lambda} plus the decomposition of the transform
// matrix U^H it induces. Building the latter once and reusing it keeps the
// fractional eigenbasis identical across orders, which the semigroup
// property depends on.
struct FractionalContext {
  SpectralDecomposition shift;
  SpectralDecomposition transform;
};

FractionalContext make_fractional_context(const SpectralDecomposition& shift);

// F^(a) = P J^a P^H from the transform decomposition; frac_eigenvalues are
// the shift eigenvalues raised to a. a = 0 short-circuits to the exact
// identity, a = 1 recovers U^H.
FractionalBasis fractional_transform(const FractionalContext& ctx, double a);
FractionalBasis fractional_transform(const SpectralDecomposition& shift,
                                     double a);

// Fractional shift operator of order a (see GfsoOrientation).
Eigen::MatrixXcd gfso(const FractionalContext& ctx, double a,
                      GfsoOrientation orientation =
                          GfsoOrientation::ReductionConsistent);
Eigen::MatrixXcd gfso(const SpectralDecomposition& shift, double a,
                      GfsoOrientation orientation =
                          GfsoOrientation::ReductionConsistent);

JointFractionalBasis jfrft(const FractionalBasis& basis_t,
                           const FractionalBasis& basis_g);

// Analysis (F_T (x) F_G) vec(X) and synthesis, both in matrix form so the
// NT x NT operator is never formed. The synthesis result is complex; callers
// working with real signals take the real part themselves.
Eigen::VectorXcd jfrft_apply(const FractionalBasis& basis_t,
                             const FractionalBasis& basis_g,
                             const Eigen::MatrixXcd& x);
Eigen::MatrixXcd jfrft_inverse(const FractionalBasis& basis_t,
                               const FractionalBasis& basis_g,
                               const Eigen::VectorXcd& spectrum);

// Divide operator and spectrum by the max spectral modulus so every
// |lambda| <= 1; tames the Vandermonde conditioning in the filter solve.
// All-zero spectra pass through unchanged.
std::pair<Eigen::MatrixXcd, Eigen::VectorXcd> normalize_energy_preserving(
    Eigen::MatrixXcd op, Eigen::VectorXcd frac_eigs);

}  // namespace tvfrft
