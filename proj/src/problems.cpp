#include "hbvm/problems.hpp"

#include <cmath>
#include <string>

#include "hbvm/errors.hpp"
#include "hbvm/format.hpp"

namespace hbvm {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Eigen::MatrixXd scalar_matrix(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

}  // namespace

SecondOrderIVP HamiltonianProblem::second_order() const {
  SecondOrderIVP ivp;
  ivp.dim = m;
  ivp.f = force;
  ivp.jacobian = force_jacobian;
  ivp.q0 = q0;
  ivp.p0 = p0;
  return ivp;
}

FirstOrderIVP HamiltonianProblem::first_order() const { return as_first_order(second_order()); }

HamiltonianProblem make_harmonic() {
  HamiltonianProblem p;
  p.name = "harmonic";
  p.m = 1;
  p.H = [](const Vector& q, const Vector& v) { return 0.5 * (v[0] * v[0] + q[0] * q[0]); };
  p.force = [](const Vector& q) { return Vector(-q); };
  p.force_jacobian = [](const Vector&) { return scalar_matrix(-1.0); };
  p.q0 = vec({1.0});
  p.p0 = vec({0.0});
  p.exact = [](double t) { return std::make_pair(vec({std::cos(t)}), vec({-std::sin(t)})); };
  return p;
}

HamiltonianProblem make_pendulum() {
  HamiltonianProblem p;
  p.name = "pendulum";
  p.m = 1;
  p.H = [](const Vector& q, const Vector& v) { return 0.5 * v[0] * v[0] - std::cos(q[0]); };
  p.force = [](const Vector& q) { return vec({-std::sin(q[0])}); };
  p.force_jacobian = [](const Vector& q) { return scalar_matrix(-std::cos(q[0])); };
  p.q0 = vec({1.0});
  p.p0 = vec({0.0});
  return p;
}

HamiltonianProblem make_kepler(double e) {
  if (!(e >= 0.0 && e < 1.0))
    throw ParameterError("kepler: eccentricity must be in [0, 1), got " + format_double(e));
  HamiltonianProblem p;
  p.name = "kepler:" + format_double(e);
  p.m = 2;
  p.H = [](const Vector& q, const Vector& v) { return 0.5 * v.squaredNorm() - 1.0 / q.norm(); };
  p.force = [](const Vector& q) {
    const double r = q.norm();
    return Vector(-q / (r * r * r));
  };
  p.force_jacobian = [](const Vector& q) {
    const double r = q.norm();
    const double r3 = r * r * r;
    Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(2, 2) / r3;
    J += 3.0 * q * q.transpose() / (r3 * r * r);
    return J;
  };
  p.q0 = vec({1.0 - e, 0.0});
  p.p0 = vec({0.0, std::sqrt((1.0 + e) / (1.0 - e))});
  if (e == 0.0) {
    p.exact = [](double t) {
      return std::make_pair(vec({std::cos(t), std::sin(t)}), vec({-std::sin(t), std::cos(t)}));
    };
  }
  return p;
}

HamiltonianProblem make_poly_oscillator(int degree) {
  if (degree < 2 || degree > 10 || degree % 2 != 0)
    throw ParameterError("polyosc: degree must be even and in [2, 10], got " +
                         std::to_string(degree));
  HamiltonianProblem p;
  p.name = "polyosc:" + std::to_string(degree);
  p.m = 1;
  const double d = degree;
  p.H = [d](const Vector& q, const Vector& v) { return 0.5 * v[0] * v[0] + std::pow(q[0], d) / d; };
  p.force = [d](const Vector& q) { return vec({-std::pow(q[0], d - 1.0)}); };
  p.force_jacobian = [d](const Vector& q) {
    return scalar_matrix(-(d - 1.0) * std::pow(q[0], d - 2.0));
  };
  p.q0 = vec({1.0});
  p.p0 = vec({0.0});
  if (degree == 2) p.exact = make_harmonic().exact;
  return p;
}

HamiltonianProblem make_henon_heiles() {
  HamiltonianProblem p;
  p.name = "henonheiles";
  p.m = 2;
  p.H = [](const Vector& q, const Vector& v) {
    const double x = q[0];
    const double y = q[1];
    return 0.5 * v.squaredNorm() + 0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0;
  };
  p.force = [](const Vector& q) {
    const double x = q[0];
    const double y = q[1];
    return vec({-(x + 2.0 * x * y), -(y + x * x - y * y)});
  };
  p.force_jacobian = [](const Vector& q) {
    const double x = q[0];
    const double y = q[1];
    Eigen::MatrixXd J(2, 2);
    J << -(1.0 + 2.0 * y), -2.0 * x, -2.0 * x, -(1.0 - 2.0 * y);
    return J;
  };
  p.q0 = vec({0.0, 0.45});
  p.p0 = vec({0.42, 0.0});
  return p;
}

HamiltonianProblem make_free() {
  HamiltonianProblem p;
  p.name = "free";
  p.m = 1;
  p.H = [](const Vector&, const Vector& v) { return 0.5 * v[0] * v[0]; };
  p.force = [](const Vector& q) { return Vector(Vector::Zero(q.size())); };
  p.force_jacobian = [](const Vector&) { return scalar_matrix(0.0); };
  p.q0 = vec({1.0});
  p.p0 = vec({0.0});
  p.exact = [](double) { return std::make_pair(vec({1.0}), vec({0.0})); };
  return p;
}

HamiltonianProblem problem_by_name(std::string_view name) {
  const auto colon = name.find(':');
  const std::string_view head = name.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? "" : name.substr(colon + 1);
  auto no_arg = [&] {
    if (colon != std::string_view::npos)
      throw ParameterError("problem '" + std::string(head) + "' takes no parameter");
  };
  if (head == "harmonic") return no_arg(), make_harmonic();
  if (head == "pendulum") return no_arg(), make_pendulum();
  if (head == "henonheiles") return no_arg(), make_henon_heiles();
  if (head == "free") return no_arg(), make_free();
  try {
    if (head == "kepler") {
      if (arg.empty()) throw ParameterError("kepler requires an eccentricity, e.g. kepler:0.3");
      return make_kepler(parse_double(arg));
    }
    if (head == "polyosc") {
      if (arg.empty()) throw ParameterError("polyosc requires a degree, e.g. polyosc:4");
      const double d = parse_double(arg);
      if (d != std::floor(d)) throw ParameterError("polyosc degree must be an integer");
      return make_poly_oscillator(static_cast<int>(d));
    }
  } catch (const FormatError& e) {
    throw ParameterError("bad problem parameter in '" + std::string(name) + "': " + e.what());
  }
  throw ParameterError("unknown problem '" + std::string(name) + "'");
}

std::vector<EnergySample> energy_series(const HamiltonianProblem& problem,
                                        const Trajectory& trajectory) {
  if (trajectory.times.size() != trajectory.states.size())
    throw ParameterError("energy_series: trajectory times and states differ in length");
  std::vector<EnergySample> out;
  out.reserve(trajectory.states.size());
  const int m = problem.m;
  double H0 = 0.0;
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const Vector& y = trajectory.states[i];
    if (y.size() != 2 * m)
      throw ParameterError("energy_series: state dimension " + std::to_string(y.size()) +
                           " does not match 2m = " + std::to_string(2 * m));
    const double H = problem.H(y.head(m), y.tail(m));
    if (i == 0) H0 = H;
    out.push_back({trajectory.times[i], H, H - H0});
  }
  return out;
}

}  // namespace hbvm
