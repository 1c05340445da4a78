#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbvm/integrator.hpp"

namespace hbvm {

/// Separable Hamiltonian H(q, p) = |p|^2 / 2 + U(q) with force -grad U.
struct HamiltonianProblem {
  std::string name;
  int m = 0;
  std::function<double(const Vector& q, const Vector& p)> H;
  VectorField force;
  JacobianField force_jacobian;
  Vector q0;
  Vector p0;
  /// Exact flow from (q0, p0), when known: t -> (q(t), p(t)).
  std::function<std::pair<Vector, Vector>(double)> exact;

  double initial_energy() const { return H(q0, p0); }
  SecondOrderIVP second_order() const;
  FirstOrderIVP first_order() const;
};

HamiltonianProblem make_harmonic();
HamiltonianProblem make_pendulum();
/// Kepler two-body problem with eccentricity e in [0,1); period 2 pi, H = -1/2.
HamiltonianProblem make_kepler(double e);
/// H = p^2/2 + q^d / d for even d in [2, 10].
HamiltonianProblem make_poly_oscillator(int degree);
HamiltonianProblem make_henon_heiles();
/// Free particle (force zero) at rest at q = 1.
HamiltonianProblem make_free();

/// harmonic | pendulum | kepler:e | polyosc:d | henonheiles | free
HamiltonianProblem problem_by_name(std::string_view name);

struct EnergySample {
  double time = 0.0;
  double H = 0.0;
  double drift = 0.0;  // H - H(first state)
};

/// Energy along a trajectory whose states are (q, p) stacked.
std::vector<EnergySample> energy_series(const HamiltonianProblem& problem,
                                        const Trajectory& trajectory);

}  // namespace hbvm
