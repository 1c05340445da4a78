#include "hbvm/legendre.hpp"

#include <cmath>
#include <string>

#include "hbvm/errors.hpp"

namespace hbvm {

double xi(int i) {
  if (i < 0) throw ParameterError("xi: index must be nonnegative");
  const double d = static_cast<double>(i);
  return 1.0 / (2.0 * std::sqrt(std::abs(4.0 * d * d - 1.0)));
}

LegendreBasis::LegendreBasis(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 1) throw ParameterError("LegendreBasis: max_degree must be >= 1");
}

void LegendreBasis::check_degree(int j) const {
  if (j < 0) throw ParameterError("Legendre index must be nonnegative");
  if (j > max_degree_)
    throw DegreeOverflowError("Legendre degree " + std::to_string(j) +
                              " exceeds max_degree " + std::to_string(max_degree_));
}

double LegendreBasis::P(int j, double c) const {
  check_degree(j);
  const double x = 2.0 * c - 1.0;
  double prev = 1.0;
  if (j == 0) return 1.0;
  double cur = x;
  for (int n = 1; n < j; ++n) {
    const double next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return std::sqrt(2.0 * j + 1.0) * cur;
}

Eigen::VectorXd LegendreBasis::P_vector(int n, double c) const {
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  check_degree(n - 1);
  const double x = 2.0 * c - 1.0;
  double prev = 1.0;
  double cur = x;
  out[0] = 1.0;
  for (int j = 1; j < n; ++j) {
    out[j] = std::sqrt(2.0 * j + 1.0) * cur;
    const double next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return out;
}

double LegendreBasis::I(int j, double c) const {
  check_degree(j + 1);
  if (j == 0) return c;
  // exact endpoint values: I_j(0) = 0, and I_j(1) = 0 by orthogonality to P_0
  if (c == 0.0 || c == 1.0) return 0.0;
  return xi(j + 1) * P(j + 1, c) - xi(j) * P(j - 1, c);
}

Eigen::VectorXd LegendreBasis::I_vector(int n, double c) const {
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  const Eigen::VectorXd p = P_vector(n + 1, c);
  out[0] = c;
  if (c == 0.0 || c == 1.0) {
    out.tail(n - 1).setZero();
    return out;
  }
  for (int j = 1; j < n; ++j) out[j] = xi(j + 1) * p[j + 1] - xi(j) * p[j - 1];
  return out;
}

SpectralMatrices build_spectral(int s) {
  if (s < 1) throw ParameterError("build_spectral: s must be >= 1");
  SpectralMatrices m;
  m.s = s;
  m.X = Eigen::MatrixXd::Zero(s, s);
  m.X(0, 0) = xi(0);
  for (int j = 1; j < s; ++j) {
    m.X(j, j - 1) = xi(j);
    m.X(j - 1, j) = -xi(j);
  }
  m.X_hat = Eigen::MatrixXd::Zero(s + 1, s);
  m.X_hat.topRows(s) = m.X;
  m.X_hat(s, s - 1) = xi(s);
  m.X_hat_X = m.X_hat * m.X;
  return m;
}

double a_s(double c, double tau, int s, const LegendreBasis& basis) {
  if (s < 1) throw ParameterError("a_s: s must be >= 1");
  return basis.I_vector(s, c).dot(basis.P_vector(s, tau));
}

double a_s_telescoped(double c, double tau, int s, const LegendreBasis& basis) {
  if (s < 1) throw ParameterError("a_s: s must be >= 1");
  const Eigen::VectorXd pc = basis.P_vector(s + 1, c);
  const Eigen::VectorXd pt = basis.P_vector(s, tau);
  double sum = c;
  for (int j = 1; j < s; ++j) sum += (xi(j + 1) * pc[j + 1] - xi(j) * pc[j - 1]) * pt[j];
  return sum;
}

namespace {
void require_rkn_truncation(int s) {
  if (s < 2)
    throw UnsupportedTruncationError(
        "second-order coefficients require s >= 2 (with s = 1 the weight 1 - c "
        "degenerates to 1); got s = " + std::to_string(s));
}
}  // namespace

double abar_s(double c, double tau, int s, const LegendreBasis& basis) {
  require_rkn_truncation(s);
  const SpectralMatrices m = build_spectral(s);
  return basis.I_vector(s, c).dot(m.X * basis.P_vector(s, tau));
}

double abar_s_banded(double c, double tau, int s, const LegendreBasis& basis) {
  require_rkn_truncation(s);
  const SpectralMatrices m = build_spectral(s);
  return basis.P_vector(s + 1, c).dot(m.X_hat_X * basis.P_vector(s, tau));
}

}  // namespace hbvm
