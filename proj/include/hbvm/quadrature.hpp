#pragma once

#include <functional>
#include <vector>

namespace hbvm {

/// Interpolatory quadrature on [0,1]: nodes strictly increasing in (0,1),
/// positive weights.
class QuadratureRule {
 public:
  /// Accepts externally supplied node/weight pairs; validates shape and ordering.
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double integrate(const std::function<double(double)>& g) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

using GaussLegendreRule = QuadratureRule;

inline constexpr int kMaxGaussNodes = 64;

/// k-node Gauss-Legendre rule on [0,1] (exact through degree 2k-1), 1 <= k <= 64.
GaussLegendreRule gauss_rule(int k);

double integrate(const QuadratureRule& rule, const std::function<double(double)>& g);

}  // namespace hbvm
