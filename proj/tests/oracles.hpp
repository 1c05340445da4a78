#pragma once

// Test-only reference computations. None of these go through the library's
// Legendre recurrence or Newton-based Gauss rule.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Gauss-Legendre nodes/weights on [0,1] from the Golub-Welsch eigenproblem.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule golub_welsch(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = beta;
    J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  Rule r;
  for (int i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    r.nodes.push_back(0.5 * (1.0 + eig.eigenvalues()[i]));
    r.weights.push_back(v0 * v0);  // 2 v0^2 on [-1,1], halved on [0,1]
  }
  return r;
}

/// int_a^b g using composite Golub-Welsch panels.
inline double integrate(const std::function<double(double)>& g, double a, double b,
                        int nodes = 16, int panels = 4) {
  static const Rule rule16 = golub_welsch(16);
  const Rule rule = nodes == 16 ? rule16 : golub_welsch(nodes);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += width * rule.weights[i] * g(lo + width * rule.nodes[i]);
  }
  return sum;
}

/// Orthonormal shifted Legendre polynomial from its explicit monomial expansion
/// sum_k (-1)^{n+k} C(n,k) C(n+k,k) x^k, in long double.
inline double legendre_explicit(int n, double x) {
  long double sum = 0.0L;
  long double binom_n_k = 1.0L;    // C(n, k)
  long double binom_nk_k = 1.0L;   // C(n+k, k)
  long double power = 1.0L;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      binom_n_k = binom_n_k * (n - k + 1) / k;
      binom_nk_k = binom_nk_k * (n + k) / k;
      power *= x;
    }
    const long double sign = ((n + k) % 2 == 0) ? 1.0L : -1.0L;
    sum += sign * binom_n_k * binom_nk_k * power;
  }
  return static_cast<double>(std::sqrt(2.0L * n + 1.0L) * sum);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

}  // namespace oracle
