#pragma once

#include <Eigen/Dense>

namespace hbvm {

/// Band coefficient 1 / (2 sqrt(|4i^2 - 1|)) of the Legendre integration matrix.
double xi(int i);

/// Orthonormal shifted Legendre polynomials P_j on [0,1] and their primitives.
///
/// P_j has exact degree j, int_0^1 P_i P_j = delta_ij and P_j(1) = sqrt(2j+1) > 0.
/// Values are obtained from the three-term recurrence of the classical
/// Legendre family at x = 2c - 1, scaled by sqrt(2j+1).
class LegendreBasis {
 public:
  static constexpr int kDefaultMaxDegree = 64;

  explicit LegendreBasis(int max_degree = kDefaultMaxDegree);

  int max_degree() const noexcept { return max_degree_; }

  /// P_j(c). Throws DegreeOverflowError for j > max_degree.
  double P(int j, double c) const;

  /// int_0^c P_j(x) dx, via xi_{j+1} P_{j+1}(c) - xi_j P_{j-1}(c) for j >= 1.
  /// Exact zeros at c = 0 (all j) and c = 1 (j >= 1).
  /// Requires j + 1 <= max_degree.
  double I(int j, double c) const;

  /// (P_0(c), ..., P_{n-1}(c)).
  Eigen::VectorXd P_vector(int n, double c) const;

  /// (I_0(c), ..., I_{n-1}(c)).
  Eigen::VectorXd I_vector(int n, double c) const;

 private:
  void check_degree(int j) const;

  int max_degree_;
};

/// Truncations of the infinite integration matrix.
struct SpectralMatrices {
  int s = 0;
  Eigen::MatrixXd X;        // s x s, tridiagonal
  Eigen::MatrixXd X_hat;    // (s+1) x s, X over (0, ..., 0, xi_s)
  Eigen::MatrixXd X_hat_X;  // (s+1) x s
};

SpectralMatrices build_spectral(int s);

/// Continuous RK coefficient a^(s)(c, tau) = sum_{j<s} I_j(c) P_j(tau).
double a_s(double c, double tau, int s, const LegendreBasis& basis = LegendreBasis{});

/// Same kernel written as c + sum_{j=1}^{s-1} [xi_{j+1} P_{j+1}(c) - xi_j P_{j-1}(c)] P_j(tau).
double a_s_telescoped(double c, double tau, int s,
                      const LegendreBasis& basis = LegendreBasis{});

/// Continuous RKN coefficient abar^(s)(c, tau) = I_s(c)^T X_s P_s(tau).
/// Throws UnsupportedTruncationError for s < 2.
double abar_s(double c, double tau, int s, const LegendreBasis& basis = LegendreBasis{});

/// abar^(s) through P_{s+1}(c)^T (X_hat_s X_s) P_s(tau).
double abar_s_banded(double c, double tau, int s,
                     const LegendreBasis& basis = LegendreBasis{});

}  // namespace hbvm
