#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hbvm/legendre.hpp"
#include "hbvm/quadrature.hpp"
#include "hbvm/tableau.hpp"

namespace hbvm {

using Vector = Eigen::VectorXd;
using VectorField = std::function<Vector(const Vector&)>;
using JacobianField = std::function<Eigen::MatrixXd(const Vector&)>;

/// y' = f(y), y(0) = y0.
struct FirstOrderIVP {
  int dim = 0;
  VectorField f;
  JacobianField jacobian;  // optional; finite differences are used when empty
  Vector y0;
  /// Whether f may be called from several threads at once. Parameter sweeps
  /// run sequentially when false.
  bool concurrent_safe = true;
};

/// q'' = f(q), q(0) = q0, q'(0) = p0.
struct SecondOrderIVP {
  int dim = 0;
  VectorField f;
  JacobianField jacobian;
  Vector q0;
  Vector p0;
  bool concurrent_safe = true;
};

/// State (q, p) stacked, y' = (p, f(q)).
FirstOrderIVP as_first_order(const SecondOrderIVP& ivp);

enum class IterationScheme { FixedPoint, NewtonHybrid };

/// Unknowns of the implicit system: the s Legendre coefficients (default) or the k stage values.
enum class IterationSpace { Coefficients, Stages };

struct SolverConfig {
  double h = 0.01;
  int n_steps = 1;
  double tol = 1e-14;
  int max_iter = 100;
  IterationScheme scheme = IterationScheme::FixedPoint;
  IterationSpace space = IterationSpace::Coefficients;
  /// Fixed-point sweeps without contraction before newton-hybrid switches to simplified Newton.
  int newton_switch_after = 10;

  void validate() const;
};

/// sigma(ch) = y_ref + h sum_j I_j(c) gamma_j over one step.
struct StagePolynomial {
  int s = 0;
  Eigen::MatrixXd gamma;  // m x s, column j is gamma_j
  Vector y_ref;
  double h = 0.0;
};

Vector dense_output(const StagePolynomial& poly, double c);

/// sigma(ch) = q_ref + c h p_ref + h^2 sum_j (I_s(c)^T X_s)_j gamma_j, with the
/// velocity p_ref + h sum_j I_j(c) gamma_j.
struct NystromPolynomial {
  int s = 0;
  Eigen::MatrixXd gamma;
  Vector q_ref;
  Vector p_ref;
  double h = 0.0;
};

Vector dense_output(const NystromPolynomial& poly, double c);
Vector dense_velocity(const NystromPolynomial& poly, double c);

/// Precomputed HBVM(k,s) data: rule, basis samples and tableaus. Immutable.
class HbvmMethod {
 public:
  HbvmMethod(int k, int s);
  HbvmMethod(const QuadratureRule& rule, int s);

  int k() const noexcept { return k_; }
  int s() const noexcept { return s_; }
  const TableauMatrices& matrices() const noexcept { return m_; }
  const SpectralMatrices& spectral() const noexcept { return spectral_; }
  const Eigen::MatrixXd& A() const noexcept { return A_; }
  /// I_s X_s (k x s); empty when s < 2.
  const Eigen::MatrixXd& IX() const noexcept { return IX_; }
  const Eigen::MatrixXd& A_bar() const noexcept { return A_bar_; }
  const Eigen::VectorXd& b_bar() const noexcept { return b_bar_; }
  bool supports_nystrom() const noexcept { return s_ >= 2; }

 private:
  void init(const QuadratureRule& rule);

  int k_;
  int s_;
  TableauMatrices m_;
  SpectralMatrices spectral_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd IX_;
  Eigen::MatrixXd A_bar_;
  Eigen::VectorXd b_bar_;
};

struct StepResult {
  Vector y1;
  Vector increment;  // h sum_l b_l f(sigma(c_l h)), before adding to y
  StagePolynomial poly;
  int iterations = 0;
  double residual = 0.0;
};

struct NystromStepResult {
  Vector q1;
  Vector p1;
  Vector q_increment;
  Vector p_increment;
  NystromPolynomial poly;
  int iterations = 0;
  double residual = 0.0;
};

StepResult hbvm_step(const FirstOrderIVP& ivp, const HbvmMethod& method, const Vector& y,
                     const SolverConfig& cfg);
StepResult hbvm_step(const FirstOrderIVP& ivp, int k, int s, const Vector& y,
                     const SolverConfig& cfg);

NystromStepResult rkn_step(const SecondOrderIVP& ivp, const HbvmMethod& method, const Vector& q,
                           const Vector& p, const SolverConfig& cfg);
NystromStepResult rkn_step(const SecondOrderIVP& ivp, int k, int s, const Vector& q,
                           const Vector& p, const SolverConfig& cfg);

/// Residual of the discrete fixed-point system at the given coefficients, max norm.
double coefficient_residual(const FirstOrderIVP& ivp, const HbvmMethod& method, const Vector& y,
                            double h, const Eigen::MatrixXd& gamma);

struct IntegrationFailure {
  int step = 0;  // 1-based index of the failed step
  std::string message;
};

/// For second-order runs each state is (q, p) stacked.
struct Trajectory {
  bool second_order = false;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<int> iterations;
  std::vector<double> residuals;
  std::optional<IntegrationFailure> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

/// n_steps steps of constant size h with compensated summation of the
/// increments. Stops at the first failing step; the partial trajectory is kept.
Trajectory integrate(const FirstOrderIVP& ivp, int k, int s, const SolverConfig& cfg);
Trajectory integrate(const SecondOrderIVP& ivp, int k, int s, const SolverConfig& cfg);

}  // namespace hbvm
