#pragma once

#include <string>
#include <vector>

#include "hbvm/errors.hpp"
#include "hbvm/integrator.hpp"
#include "hbvm/problems.hpp"

namespace hbvm {

/// Integration failure inside an experiment, with run context.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

struct OrderRow {
  double h = 0.0;
  int steps = 0;
  double error = 0.0;  // max-norm of the (q, p) error at t_end
  double order = 0.0;  // against the next row; NaN for the last row or zero errors
};

struct OrderStudy {
  double t_end = 0.0;
  bool exact_reference = false;
  std::vector<OrderRow> rows;
};

struct OrderStudyOptions {
  double t_end = 0.0;  // <= 0 selects default_order_horizon(h_list)
  double tol = 1e-14;
  IterationScheme scheme = IterationScheme::FixedPoint;
};

/// Default horizon of an order study: 10 steps of the largest h.
double default_order_horizon(const std::vector<double>& h_list);

/// Terminal errors of HBVM(k,s) for every h in a strictly decreasing list of
/// at least four step sizes, each dividing t_end. Without an exact solution
/// the reference is the same method at h_min / 10 with tol 1e-14.
OrderStudy run_order_study(const HamiltonianProblem& problem, int s, int k,
                           const std::vector<double>& h_list,
                           const OrderStudyOptions& options = {});

std::string order_study_csv(const OrderStudy& study);

struct DriftStudy {
  std::vector<EnergySample> samples;
  double max_abs_drift = 0.0;
};

DriftStudy run_drift_study(const HamiltonianProblem& problem, int s, int k, double h,
                           int n_steps, double tol = 1e-14,
                           IterationScheme scheme = IterationScheme::FixedPoint);

/// step,time,H,drift
std::string drift_study_csv(const DriftStudy& study);

struct RknEquivalence {
  double max_q_deviation = 0.0;
  double max_p_deviation = 0.0;
  int states_compared = 0;
};

/// Runs the partitioned first-order HBVM and the RKN method on the same
/// problem and configuration; requires s >= 2.
RknEquivalence run_rkn_equiv(const HamiltonianProblem& problem, int s, int k, double h,
                             int n_steps, double tol = 1e-14,
                             IterationScheme scheme = IterationScheme::FixedPoint);

std::string rkn_equiv_csv(const RknEquivalence& report);
std::string rkn_equiv_json(const RknEquivalence& report);

/// step,time,q1..qm,p1..pm,H,drift,iterations,residual
std::string trajectory_csv(const HamiltonianProblem& problem, const Trajectory& trajectory);
std::string trajectory_json(const HamiltonianProblem& problem, const Trajectory& trajectory);

}  // namespace hbvm
