#include "hbvm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hbvm/errors.hpp"

namespace hbvm {

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty()) throw ParameterError("quadrature rule needs at least one node");
  if (nodes_.size() != weights_.size())
    throw ParameterError("quadrature rule: node and weight counts differ");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] >= 0.0 && nodes_[i] <= 1.0))
      throw ParameterError("quadrature rule: node outside [0,1]");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
      throw ParameterError("quadrature rule: nodes must be strictly increasing");
  }
}

double QuadratureRule::integrate(const std::function<double(double)>& g) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * g(nodes_[i]);
  return sum;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& g) {
  return rule.integrate(g);
}

namespace {

// Legendre L_k(x) and L_k'(x) on [-1,1].
std::pair<double, double> legendre_with_derivative(int k, double x) {
  double prev = 1.0;
  double cur = x;
  for (int n = 1; n < k; ++n) {
    const double next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  const double deriv = k * (x * cur - prev) / (x * x - 1.0);
  return {cur, deriv};
}

}  // namespace

GaussLegendreRule gauss_rule(int k) {
  if (k < 1 || k > kMaxGaussNodes)
    throw ParameterError("gauss_rule: k must be in [1, " + std::to_string(kMaxGaussNodes) +
                         "], got " + std::to_string(k));
  if (k == 1) return QuadratureRule({0.5}, {1.0});

  std::vector<double> nodes(k);
  std::vector<double> weights(k);
  const int half = (k + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi-type initial guess for the i-th largest root.
    const double theta = std::numbers::pi * (i + 0.75) / (k + 0.5);
    double x = std::cos(theta) * (1.0 - (1.0 - 1.0 / k) / (8.0 * k * k));
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [value, d] = legendre_with_derivative(k, x);
      const double dx = value / d;
      x -= dx;
      if (std::abs(dx) <= 1e-15) {
        // one extra sweep once inside the round-off neighbourhood
        const auto [v2, d2] = legendre_with_derivative(k, x);
        x -= v2 / d2;
        converged = true;
        break;
      }
    }
    if (!converged) throw InternalError("gauss_rule: Newton iteration did not converge");
    const double deriv = legendre_with_derivative(k, x).second;
    // Weight on [-1,1] is 2 / ((1 - x^2) L_k'(x)^2); halved for [0,1].
    const double w = 1.0 / ((1.0 - x * x) * deriv * deriv);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[k - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = w;
    weights[k - 1 - i] = w;
  }
  if (k % 2 == 1) nodes[k / 2] = 0.5;
  return QuadratureRule(std::move(nodes), std::move(weights));
}

}  // namespace hbvm
