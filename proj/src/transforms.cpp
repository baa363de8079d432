#include "tvfrft/transforms.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "tvfrft/errors.hpp"

namespace tvfrft {

namespace {

void check_bases(int n, int t, const Eigen::MatrixXcd& u_g,
                 const Eigen::MatrixXcd& u_t, const char* where) {
  if (u_g.rows() != n || u_g.cols() != n)
    throw InvalidParameter(std::string(where) + ": vertex basis must be NxN");
  if (u_t.rows() != t || u_t.cols() != t)
    throw InvalidParameter(std::string(where) + ": temporal basis must be TxT");
}

}  // namespace

Eigen::VectorXcd vec(const Eigen::MatrixXcd& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Eigen::VectorXd vec(const Eigen::MatrixXd& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& x, int n, int t) {
  if (n < 1 || t < 1 || x.size() != static_cast<Eigen::Index>(n) * t)
    throw InvalidParameter("unvec: length must equal n*t");
  return Eigen::Map<const Eigen::MatrixXcd>(x.data(), n, t);
}

Eigen::MatrixXcd dft_matrix(int t) {
  if (t < 1) throw InvalidParameter("dft_matrix: size must be >= 1");
  Eigen::MatrixXcd u(t, t);
  const double step = 2.0 * std::numbers::pi / t;
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < t; ++k) u(j, k) = std::polar(scale, -step * j * k);
  return u;
}

JointSpectrum jft(const TimeVertexSignal& sig, const Eigen::MatrixXcd& u_g,
                  const Eigen::MatrixXcd& u_t) {
  check_bases(sig.n, sig.t, u_g, u_t, "jft");
  if (!sig.values.allFinite()) throw InvalidInput("jft: non-finite signal");
  const Eigen::MatrixXcd spectrum =
      u_g.adjoint() * sig.values.cast<std::complex<double>>() * u_t.conjugate();
  JointSpectrum out;
  out.values = vec(spectrum);
  out.n = sig.n;
  out.t = sig.t;
  out.order_a = 1.0;
  out.order_b = 1.0;
  return out;
}

TimeVertexSignal ijft(const JointSpectrum& spec, const Eigen::MatrixXcd& u_g,
                      const Eigen::MatrixXcd& u_t) {
  check_bases(spec.n, spec.t, u_g, u_t, "ijft");
  const Eigen::MatrixXcd xhat = unvec(spec.values, spec.n, spec.t);
  const Eigen::MatrixXcd x = u_g * xhat * u_t.transpose();
  return TimeVertexSignal(x.real());
}

Eigen::MatrixXcd ijft_matrix(const Eigen::MatrixXcd& u_g,
                             const Eigen::MatrixXcd& u_t) {
  return Eigen::kroneckerProduct(u_t, u_g);
}

}  // namespace tvfrft
