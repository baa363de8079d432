#include "tvfrft/fractional.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "tvfrft/errors.hpp"

namespace tvfrft {

namespace {

void check_order(double a, const char* where) {
  if (!(a >= 0.0 && a <= 1.0))
    throw InvalidParameter(std::string(where) + ": order must lie in [0, 1]");
}

}  // namespace

std::complex<double> principal_power(std::complex<double> z, double a) {
  if (z == std::complex<double>(0.0, 0.0))
    return a == 0.0 ? std::complex<double>(1.0, 0.0)
                    : std::complex<double>(0.0, 0.0);
  return std::exp(a * std::log(z));
}

Eigen::VectorXcd fractional_powers(const Eigen::VectorXcd& eigs, double a) {
  Eigen::VectorXcd out(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    out[i] = principal_power(eigs[i], a);
  return out;
}

Eigen::MatrixXcd fractional_matrix_power(const SpectralDecomposition& decomp,
                                         double a) {
  if (a == 0.0)
    return Eigen::MatrixXcd::Identity(decomp.basis.rows(), decomp.basis.cols());
  const Eigen::VectorXcd powered = fractional_powers(decomp.eigenvalues, a);
  return decomp.basis * powered.asDiagonal() * decomp.basis.adjoint();
}

FractionalContext make_fractional_context(const SpectralDecomposition& shift) {
  FractionalContext ctx;
  ctx.shift = shift;
  ctx.transform = eigendecompose(Eigen::MatrixXcd(shift.basis.adjoint()));
  return ctx;
}

FractionalBasis fractional_transform(const FractionalContext& ctx, double a) {
  check_order(a, "fractional_transform");
  FractionalBasis out;
  out.order = a;
  out.frac_eigenvalues = fractional_powers(ctx.shift.eigenvalues, a);
  out.transform = fractional_matrix_power(ctx.transform, a);
  return out;
}

FractionalBasis fractional_transform(const SpectralDecomposition& shift,
                                     double a) {
  return fractional_transform(make_fractional_context(shift), a);
}

Eigen::MatrixXcd gfso(const FractionalContext& ctx, double a,
                      GfsoOrientation orientation) {
  check_order(a, "gfso");
  const FractionalBasis basis = fractional_transform(ctx, a);
  const auto lam = basis.frac_eigenvalues.asDiagonal();
  if (orientation == GfsoOrientation::Literal)
    return basis.transform * lam * basis.transform.adjoint();
  return basis.transform.adjoint() * lam * basis.transform;
}

Eigen::MatrixXcd gfso(const SpectralDecomposition& shift, double a,
                      GfsoOrientation orientation) {
  return gfso(make_fractional_context(shift), a, orientation);
}

JointFractionalBasis jfrft(const FractionalBasis& basis_t,
                           const FractionalBasis& basis_g) {
  JointFractionalBasis out;
  out.order_a = basis_t.order;
  out.order_b = basis_g.order;
  out.joint_transform =
      Eigen::kroneckerProduct(basis_t.transform, basis_g.transform);
  out.joint_frac_eigenvalues = Eigen::kroneckerProduct(
      basis_t.frac_eigenvalues, basis_g.frac_eigenvalues);
  return out;
}

Eigen::VectorXcd jfrft_apply(const FractionalBasis& basis_t,
                             const FractionalBasis& basis_g,
                             const Eigen::MatrixXcd& x) {
  if (x.rows() != basis_g.transform.cols() ||
      x.cols() != basis_t.transform.cols())
    throw InvalidParameter("jfrft_apply: signal does not match bases");
  const Eigen::MatrixXcd spectrum =
      basis_g.transform * x * basis_t.transform.transpose();
  return Eigen::Map<const Eigen::VectorXcd>(spectrum.data(), spectrum.size());
}

Eigen::MatrixXcd jfrft_inverse(const FractionalBasis& basis_t,
                               const FractionalBasis& basis_g,
                               const Eigen::VectorXcd& spectrum) {
  const Eigen::Index n = basis_g.transform.rows();
  const Eigen::Index t = basis_t.transform.rows();
  if (spectrum.size() != n * t)
    throw InvalidParameter("jfrft_inverse: spectrum does not match bases");
  const Eigen::Map<const Eigen::MatrixXcd> xhat(spectrum.data(), n, t);
  return basis_g.transform.adjoint() * xhat * basis_t.transform.conjugate();
}

std::pair<Eigen::MatrixXcd, Eigen::VectorXcd> normalize_energy_preserving(
    Eigen::MatrixXcd op, Eigen::VectorXcd frac_eigs) {
  if (frac_eigs.size() == 0)
    throw InvalidParameter("normalize_energy_preserving: empty spectrum");
  const double max_mod = frac_eigs.cwiseAbs().maxCoeff();
  if (max_mod > 0.0) {
    op /= max_mod;
    frac_eigs /= max_mod;
  }
  return {std::move(op), std::move(frac_eigs)};
}

}  // namespace tvfrft
