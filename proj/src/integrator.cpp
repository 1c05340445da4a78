#include "hbvm/integrator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hbvm/errors.hpp"

namespace hbvm {

namespace {

constexpr double kDivergenceBound = 1e300;

bool diverged(const Eigen::MatrixXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) return true;
  }
  return false;
}

double max_norm(const Eigen::MatrixXd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd finite_difference_jacobian(const VectorField& f, const Vector& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J(n, n);
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double delta = base * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + delta;
    xm[j] = x[j] - delta;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * delta);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

// Implicit system U = G(U) on an m x n block of unknowns. Stages are the
// m x k arguments at which f is sampled; G is affine in the sampled values F.
struct ImplicitSystem {
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> stage_args;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> map;
  Eigen::MatrixXd linear_part;  // n x n, dG ~ kron(linear_part, J0)
};

struct SolveResult {
  Eigen::MatrixXd unknowns;  // G(U) at the accepted iterate
  Eigen::MatrixXd samples;   // F at the accepted iterate
  int iterations = 0;
  double residual = 0.0;
};

Eigen::MatrixXd sample(const VectorField& f, const Eigen::MatrixXd& args) {
  Eigen::MatrixXd F(args.rows(), args.cols());
  for (Eigen::Index l = 0; l < args.cols(); ++l) {
    Vector fl = f(args.col(l));
    if (fl.size() != args.rows()) throw ParameterError("vector field returned wrong dimension");
    F.col(l) = fl;
  }
  return F;
}

SolveResult solve(const ImplicitSystem& sys, const VectorField& f,
                  const std::function<Eigen::MatrixXd()>& jacobian_at_start,
                  Eigen::MatrixXd U, const SolverConfig& cfg) {
  const Eigen::Index m = U.rows();
  const Eigen::Index n = U.cols();
  bool newton = false;
  int non_contracting = 0;
  double previous_increment = std::numeric_limits<double>::infinity();
  double last_newton_increment = std::numeric_limits<double>::infinity();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double residual = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const Eigen::MatrixXd args = sys.stage_args(U);
    if (diverged(args)) throw DivergenceError("stage values diverged");
    const Eigen::MatrixXd F = sample(f, args);
    if (diverged(F)) throw DivergenceError("vector field returned non-finite values");
    Eigen::MatrixXd G = sys.map(F);
    const Eigen::MatrixXd r = G - U;
    residual = max_norm(r);
    // Below this the residual is dominated by rounding of G itself.
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_norm(G));
    const double tol = std::max(cfg.tol, floor);

    if (!newton) {
      if (residual <= tol) return {std::move(G), F, iter, residual};
      if (residual >= previous_increment) ++non_contracting;
      previous_increment = residual;
      U = std::move(G);
      if (cfg.scheme == IterationScheme::NewtonHybrid && non_contracting >= cfg.newton_switch_after) {
        const Eigen::MatrixXd J0 = jacobian_at_start();
        Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m * n, m * n);
        for (Eigen::Index a = 0; a < n; ++a)
          for (Eigen::Index b = 0; b < n; ++b)
            system.block(a * m, b * m, m, m) -= sys.linear_part(a, b) * J0;
        lu.compute(system);
        newton = true;
      }
    } else {
      if (residual <= tol && last_newton_increment <= tol)
        return {std::move(G), F, iter, residual};
      const Vector rhs = Eigen::Map<const Vector>(r.data(), r.size());
      const Vector delta = lu.solve(rhs);
      if (diverged(delta)) throw DivergenceError("Newton correction diverged");
      U += Eigen::Map<const Eigen::MatrixXd>(delta.data(), m, n);
      last_newton_increment = max_norm(delta);
    }
  }
  throw StepFailureError("implicit stage system did not converge in " +
                             std::to_string(cfg.max_iter) + " iterations (residual " +
                             std::to_string(residual) + ")",
                         residual, cfg.max_iter);
}

Eigen::MatrixXd replicate(const Vector& v, Eigen::Index cols) { return v.replicate(1, cols); }

void check_state(const Vector& y, const char* what) {
  if (diverged(y)) throw DivergenceError(std::string(what) + " diverged");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("step size h must be > 0");
  if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
  if (n_steps < 0) throw ParameterError("n_steps must be >= 0");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
}

FirstOrderIVP as_first_order(const SecondOrderIVP& ivp) {
  const int m = ivp.dim;
  FirstOrderIVP out;
  out.dim = 2 * m;
  out.concurrent_safe = ivp.concurrent_safe;
  VectorField force = ivp.f;
  out.f = [force, m](const Vector& y) {
    Vector dy(2 * m);
    dy.head(m) = y.tail(m);
    dy.tail(m) = force(y.head(m));
    return dy;
  };
  if (ivp.jacobian) {
    JacobianField jac = ivp.jacobian;
    out.jacobian = [jac, m](const Vector& y) {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * m, 2 * m);
      J.topRightCorner(m, m).setIdentity();
      J.bottomLeftCorner(m, m) = jac(y.head(m));
      return J;
    };
  }
  out.y0.resize(2 * m);
  out.y0 << ivp.q0, ivp.p0;
  return out;
}

Vector dense_output(const StagePolynomial& poly, double c) {
  const LegendreBasis basis;
  return poly.y_ref + poly.h * (poly.gamma * basis.I_vector(poly.s, c));
}

Vector dense_output(const NystromPolynomial& poly, double c) {
  const LegendreBasis basis;
  const SpectralMatrices spectral = build_spectral(poly.s);
  const Vector weights = spectral.X.transpose() * basis.I_vector(poly.s, c);
  return poly.q_ref + (c * poly.h) * poly.p_ref + (poly.h * poly.h) * (poly.gamma * weights);
}

Vector dense_velocity(const NystromPolynomial& poly, double c) {
  const LegendreBasis basis;
  return poly.p_ref + poly.h * (poly.gamma * basis.I_vector(poly.s, c));
}

HbvmMethod::HbvmMethod(int k, int s) : k_(k), s_(s) {
  if (s < 1) throw ParameterError("s must be >= 1");
  if (k < s)
    throw ParameterError("k >= s required, got k = " + std::to_string(k) +
                         ", s = " + std::to_string(s));
  init(gauss_rule(k));
}

HbvmMethod::HbvmMethod(const QuadratureRule& rule, int s) : k_(rule.size()), s_(s) {
  init(rule);
}

void HbvmMethod::init(const QuadratureRule& rule) {
  m_ = build_tableau_matrices(rule, s_);
  spectral_ = build_spectral(s_);
  A_ = m_.I_s * m_.P_s.transpose() * m_.Omega;
  if (s_ >= 2) {
    IX_ = m_.I_s * spectral_.X;
    A_bar_ = IX_ * m_.P_s.transpose() * m_.Omega;
    b_bar_ = m_.b.cwiseProduct(Eigen::VectorXd::Ones(k_) - m_.c);
  }
}

StepResult hbvm_step(const FirstOrderIVP& ivp, const HbvmMethod& method, const Vector& y,
                     const SolverConfig& cfg) {
  cfg.validate();
  if (y.size() != ivp.dim) throw ParameterError("state dimension does not match the problem");
  check_state(y, "initial state");
  const auto& mat = method.matrices();
  const int k = method.k();
  const int s = method.s();
  const double h = cfg.h;
  const Eigen::Index m = y.size();
  auto jacobian = [&]() -> Eigen::MatrixXd {
    return ivp.jacobian ? ivp.jacobian(y) : finite_difference_jacobian(ivp.f, y);
  };
  const Eigen::MatrixXd OmegaP = mat.Omega * mat.P_s;  // k x s

  ImplicitSystem sys;
  Eigen::MatrixXd start;
  if (cfg.space == IterationSpace::Coefficients) {
    const Eigen::MatrixXd hIt = h * mat.I_s.transpose();  // s x k
    sys.stage_args = [&, hIt](const Eigen::MatrixXd& gamma) -> Eigen::MatrixXd {
      return replicate(y, k) + gamma * hIt;
    };
    sys.map = [&](const Eigen::MatrixXd& F) -> Eigen::MatrixXd { return F * OmegaP; };
    sys.linear_part = h * mat.P_s.transpose() * mat.Omega * mat.I_s;
    start = Eigen::MatrixXd::Zero(m, s);
  } else {
    const Eigen::MatrixXd hAt = h * method.A().transpose();
    sys.stage_args = [](const Eigen::MatrixXd& stages) -> Eigen::MatrixXd { return stages; };
    sys.map = [&, hAt](const Eigen::MatrixXd& F) -> Eigen::MatrixXd {
      return replicate(y, k) + F * hAt;
    };
    sys.linear_part = h * method.A();
    start = replicate(y, k);
  }

  SolveResult solved = solve(sys, ivp.f, jacobian, std::move(start), cfg);

  StepResult out;
  out.increment = h * (solved.samples * mat.b);
  out.y1 = y + out.increment;
  check_state(out.y1, "state");
  out.poly.s = s;
  out.poly.gamma = cfg.space == IterationSpace::Coefficients ? solved.unknowns
                                                             : Eigen::MatrixXd(solved.samples * OmegaP);
  out.poly.y_ref = y;
  out.poly.h = h;
  out.iterations = solved.iterations;
  out.residual = solved.residual;
  return out;
}

StepResult hbvm_step(const FirstOrderIVP& ivp, int k, int s, const Vector& y,
                     const SolverConfig& cfg) {
  return hbvm_step(ivp, HbvmMethod(k, s), y, cfg);
}

double coefficient_residual(const FirstOrderIVP& ivp, const HbvmMethod& method, const Vector& y,
                            double h, const Eigen::MatrixXd& gamma) {
  const auto& mat = method.matrices();
  const Eigen::MatrixXd args = replicate(y, method.k()) + h * gamma * mat.I_s.transpose();
  const Eigen::MatrixXd G = sample(ivp.f, args) * mat.Omega * mat.P_s;
  return max_norm(G - gamma);
}

namespace {
void require_nystrom(const HbvmMethod& method) {
  if (!method.supports_nystrom())
    throw UnsupportedTruncationError(
        "RKN stepping requires s >= 2: with s = 1 the weight 1 - c degenerates to 1; got s = " +
        std::to_string(method.s()));
}
}  // namespace

NystromStepResult rkn_step(const SecondOrderIVP& ivp, const HbvmMethod& method, const Vector& q,
                           const Vector& p, const SolverConfig& cfg) {
  require_nystrom(method);
  cfg.validate();
  if (q.size() != ivp.dim || p.size() != ivp.dim)
    throw ParameterError("state dimension does not match the problem");
  check_state(q, "initial position");
  check_state(p, "initial velocity");
  const auto& mat = method.matrices();
  const int k = method.k();
  const int s = method.s();
  const double h = cfg.h;
  const double h2 = h * h;
  const Eigen::Index m = q.size();
  auto jacobian = [&]() -> Eigen::MatrixXd {
    return ivp.jacobian ? ivp.jacobian(q) : finite_difference_jacobian(ivp.f, q);
  };
  const Eigen::MatrixXd OmegaP = mat.Omega * mat.P_s;
  // q + c_l h p for every node
  const Eigen::MatrixXd free_flight = replicate(q, k) + (h * p) * mat.c.transpose();

  ImplicitSystem sys;
  Eigen::MatrixXd start;
  if (cfg.space == IterationSpace::Coefficients) {
    const Eigen::MatrixXd h2IXt = h2 * method.IX().transpose();
    sys.stage_args = [&, h2IXt](const Eigen::MatrixXd& gamma) -> Eigen::MatrixXd {
      return free_flight + gamma * h2IXt;
    };
    sys.map = [&](const Eigen::MatrixXd& F) -> Eigen::MatrixXd { return F * OmegaP; };
    sys.linear_part = h2 * mat.P_s.transpose() * mat.Omega * method.IX();
    start = Eigen::MatrixXd::Zero(m, s);
  } else {
    const Eigen::MatrixXd h2Abt = h2 * method.A_bar().transpose();
    sys.stage_args = [](const Eigen::MatrixXd& stages) -> Eigen::MatrixXd { return stages; };
    sys.map = [&, h2Abt](const Eigen::MatrixXd& F) -> Eigen::MatrixXd {
      return free_flight + F * h2Abt;
    };
    sys.linear_part = h2 * method.A_bar();
    start = free_flight;
  }

  SolveResult solved = solve(sys, ivp.f, jacobian, std::move(start), cfg);

  NystromStepResult out;
  out.q_increment = h * p + h2 * (solved.samples * method.b_bar());
  out.p_increment = h * (solved.samples * mat.b);
  out.q1 = q + out.q_increment;
  out.p1 = p + out.p_increment;
  check_state(out.q1, "position");
  check_state(out.p1, "velocity");
  out.poly.s = s;
  out.poly.gamma = cfg.space == IterationSpace::Coefficients ? solved.unknowns
                                                             : Eigen::MatrixXd(solved.samples * OmegaP);
  out.poly.q_ref = q;
  out.poly.p_ref = p;
  out.poly.h = h;
  out.iterations = solved.iterations;
  out.residual = solved.residual;
  return out;
}

NystromStepResult rkn_step(const SecondOrderIVP& ivp, int k, int s, const Vector& q,
                           const Vector& p, const SolverConfig& cfg) {
  if (s < 2)
    throw UnsupportedTruncationError(
        "RKN stepping requires s >= 2: with s = 1 the weight 1 - c degenerates to 1; got s = " +
        std::to_string(s));
  return rkn_step(ivp, HbvmMethod(k, s), q, p, cfg);
}

namespace {

// Kahan-style accumulation of step increments.
struct CompensatedState {
  Vector value;
  Vector carry;

  explicit CompensatedState(const Vector& v) : value(v), carry(Vector::Zero(v.size())) {}

  void add(const Vector& increment) {
    const Vector corrected = increment + carry;
    const Vector next = value + corrected;
    carry = corrected - (next - value);
    value = next;
  }
};

void record_failure(Trajectory& traj, int step, const std::exception& e) {
  traj.failure = IntegrationFailure{step, "step " + std::to_string(step) + ": " + e.what()};
}

}  // namespace

Trajectory integrate(const FirstOrderIVP& ivp, int k, int s, const SolverConfig& cfg) {
  cfg.validate();
  const HbvmMethod method(k, s);
  if (ivp.y0.size() != ivp.dim) throw ParameterError("y0 dimension does not match the problem");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(ivp.y0);
  CompensatedState y(ivp.y0);
  for (int n = 1; n <= cfg.n_steps; ++n) {
    try {
      const StepResult step = hbvm_step(ivp, method, y.value, cfg);
      y.add(step.increment);
      check_state(y.value, "state");
      traj.times.push_back(n * cfg.h);
      traj.states.push_back(y.value);
      traj.iterations.push_back(step.iterations);
      traj.residuals.push_back(step.residual);
    } catch (const StepFailureError& e) {
      record_failure(traj, n, e);
      break;
    } catch (const DivergenceError& e) {
      record_failure(traj, n, e);
      break;
    }
  }
  return traj;
}

Trajectory integrate(const SecondOrderIVP& ivp, int k, int s, const SolverConfig& cfg) {
  cfg.validate();
  if (s < 2)
    throw UnsupportedTruncationError(
        "RKN stepping requires s >= 2: with s = 1 the weight 1 - c degenerates to 1; got s = " +
        std::to_string(s));
  const HbvmMethod method(k, s);
  if (ivp.q0.size() != ivp.dim || ivp.p0.size() != ivp.dim)
    throw ParameterError("initial data dimension does not match the problem");
  const int m = ivp.dim;
  Trajectory traj;
  traj.second_order = true;
  auto stacked = [m](const Vector& q, const Vector& p) {
    Vector y(2 * m);
    y << q, p;
    return y;
  };
  traj.times.push_back(0.0);
  traj.states.push_back(stacked(ivp.q0, ivp.p0));
  CompensatedState q(ivp.q0);
  CompensatedState p(ivp.p0);
  for (int n = 1; n <= cfg.n_steps; ++n) {
    try {
      const NystromStepResult step = rkn_step(ivp, method, q.value, p.value, cfg);
      q.add(step.q_increment);
      p.add(step.p_increment);
      traj.times.push_back(n * cfg.h);
      traj.states.push_back(stacked(q.value, p.value));
      traj.iterations.push_back(step.iterations);
      traj.residuals.push_back(step.residual);
    } catch (const StepFailureError& e) {
      record_failure(traj, n, e);
      break;
    } catch (const DivergenceError& e) {
      record_failure(traj, n, e);
      break;
    }
  }
  return traj;
}

}  // namespace hbvm
