#include "hbvm/experiments.hpp"

#include <cmath>
#include <future>
#include <json.hpp>
#include <limits>
#include <string>

#include "hbvm/errors.hpp"
#include "hbvm/format.hpp"

namespace hbvm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SolverConfig make_config(double h, int n_steps, double tol, IterationScheme scheme) {
  SolverConfig cfg;
  cfg.h = h;
  cfg.n_steps = n_steps;
  cfg.tol = tol;
  cfg.scheme = scheme;
  cfg.validate();
  return cfg;
}

void require_success(const Trajectory& traj, const std::string& context) {
  if (!traj.ok()) throw NumericalFailure(context + ": " + traj.failure->message);
}

int steps_for(double t_end, double h) {
  const double ratio = t_end / h;
  const double steps = std::round(ratio);
  if (steps < 1 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw ParameterError("step size " + format_double(h) + " does not divide t_end = " +
                         format_double(t_end));
  return static_cast<int>(steps);
}

Vector stacked(const std::pair<Vector, Vector>& qp) {
  Vector y(qp.first.size() + qp.second.size());
  y << qp.first, qp.second;
  return y;
}

}  // namespace

double default_order_horizon(const std::vector<double>& h_list) {
  if (h_list.empty()) throw ParameterError("h list is empty");
  return 10.0 * h_list.front();
}

OrderStudy run_order_study(const HamiltonianProblem& problem, int s, int k,
                           const std::vector<double>& h_list, const OrderStudyOptions& options) {
  if (k < s) throw ParameterError("k >= s required");
  if (h_list.size() < 4) throw ParameterError("order study needs at least 4 step sizes");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw ParameterError("step sizes must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw ParameterError("h list must be strictly decreasing");
  }
  OrderStudy study;
  study.t_end = options.t_end > 0.0 ? options.t_end : default_order_horizon(h_list);
  const FirstOrderIVP ivp = problem.first_order();

  auto run = [&](double h, double tol) {
    const int steps = steps_for(study.t_end, h);
    Trajectory traj = integrate(ivp, k, s, make_config(h, steps, tol, options.scheme));
    require_success(traj, problem.name + " HBVM(" + std::to_string(k) + "," +
                              std::to_string(s) + ") h=" + format_double(h));
    return std::make_pair(steps, traj.states.back());
  };

  Vector reference;
  if (problem.exact) {
    study.exact_reference = true;
  } else {
    const double h_ref = h_list.back() / 10.0;
    reference = run(h_ref, 1e-14).second;
  }

  // Independent runs; results are assembled in input order.
  std::vector<std::future<std::pair<int, Vector>>> pending;
  const auto policy = ivp.concurrent_safe ? std::launch::async : std::launch::deferred;
  for (double h : h_list)
    pending.push_back(std::async(policy, [&, h] { return run(h, options.tol); }));

  for (std::size_t i = 0; i < h_list.size(); ++i) {
    const auto [steps, final_state] = pending[i].get();
    const double t = steps * h_list[i];
    const Vector target = problem.exact ? stacked(problem.exact(t)) : reference;
    study.rows.push_back({h_list[i], steps, (final_state - target).cwiseAbs().maxCoeff(), kNaN});
  }
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    const OrderRow& a = study.rows[i];
    const OrderRow& b = study.rows[i + 1];
    if (a.error > 0.0 && b.error > 0.0)
      study.rows[i].order = std::log(a.error / b.error) / std::log(a.h / b.h);
  }
  return study;
}

std::string order_study_csv(const OrderStudy& study) {
  std::string out = "h,steps,error,order\n";
  for (const auto& r : study.rows)
    out += format_double(r.h) + "," + std::to_string(r.steps) + "," + format_double(r.error) +
           "," + format_double(r.order) + "\n";
  return out;
}

DriftStudy run_drift_study(const HamiltonianProblem& problem, int s, int k, double h,
                           int n_steps, double tol, IterationScheme scheme) {
  if (k < s) throw ParameterError("k >= s required");
  const Trajectory traj = integrate(problem.first_order(), k, s, make_config(h, n_steps, tol, scheme));
  require_success(traj, problem.name + " drift study");
  DriftStudy study;
  study.samples = energy_series(problem, traj);
  for (const auto& e : study.samples)
    study.max_abs_drift = std::max(study.max_abs_drift, std::abs(e.drift));
  return study;
}

std::string drift_study_csv(const DriftStudy& study) {
  std::string out = "step,time,H,drift\n";
  for (std::size_t i = 0; i < study.samples.size(); ++i) {
    const auto& e = study.samples[i];
    out += std::to_string(i) + "," + format_double(e.time) + "," + format_double(e.H) + "," +
           format_double(e.drift) + "\n";
  }
  return out;
}

RknEquivalence run_rkn_equiv(const HamiltonianProblem& problem, int s, int k, double h,
                             int n_steps, double tol, IterationScheme scheme) {
  if (k < s) throw ParameterError("k >= s required");
  if (s < 2)
    throw UnsupportedTruncationError(
        "rkn-equiv requires s >= 2: with s = 1 the weight 1 - c degenerates to 1");
  const SolverConfig cfg = make_config(h, n_steps, tol, scheme);
  const Trajectory first = integrate(problem.first_order(), k, s, cfg);
  require_success(first, problem.name + " first-order run");
  const Trajectory second = integrate(problem.second_order(), k, s, cfg);
  require_success(second, problem.name + " RKN run");
  const int m = problem.m;
  RknEquivalence report;
  for (std::size_t i = 0; i < first.states.size(); ++i) {
    const Vector diff = first.states[i] - second.states[i];
    report.max_q_deviation = std::max(report.max_q_deviation, diff.head(m).cwiseAbs().maxCoeff());
    report.max_p_deviation = std::max(report.max_p_deviation, diff.tail(m).cwiseAbs().maxCoeff());
    ++report.states_compared;
  }
  return report;
}

std::string rkn_equiv_csv(const RknEquivalence& report) {
  return "metric,value\nmax_q_deviation," + format_double(report.max_q_deviation) +
         "\nmax_p_deviation," + format_double(report.max_p_deviation) + "\nstates_compared," +
         std::to_string(report.states_compared) + "\n";
}

std::string rkn_equiv_json(const RknEquivalence& report) {
  nlohmann::json j;
  j["max_q_deviation"] = report.max_q_deviation;
  j["max_p_deviation"] = report.max_p_deviation;
  j["states_compared"] = report.states_compared;
  return j.dump(2) + "\n";
}

std::string trajectory_csv(const HamiltonianProblem& problem, const Trajectory& trajectory) {
  const auto energy = energy_series(problem, trajectory);
  const int m = problem.m;
  std::string out = "step,time";
  for (int i = 1; i <= m; ++i) out += ",q" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",p" + std::to_string(i);
  out += ",H,drift,iterations,residual\n";
  for (std::size_t n = 0; n < trajectory.states.size(); ++n) {
    out += std::to_string(n) + "," + format_double(trajectory.times[n]);
    for (Eigen::Index i = 0; i < trajectory.states[n].size(); ++i)
      out += "," + format_double(trajectory.states[n][i]);
    out += "," + format_double(energy[n].H) + "," + format_double(energy[n].drift);
    if (n == 0) {
      out += ",0,0\n";
    } else {
      out += "," + std::to_string(trajectory.iterations[n - 1]) + "," +
             format_double(trajectory.residuals[n - 1]) + "\n";
    }
  }
  return out;
}

std::string trajectory_json(const HamiltonianProblem& problem, const Trajectory& trajectory) {
  const auto energy = energy_series(problem, trajectory);
  const int m = problem.m;
  nlohmann::json j;
  j["problem"] = problem.name;
  j["times"] = trajectory.times;
  nlohmann::json q = nlohmann::json::array();
  nlohmann::json p = nlohmann::json::array();
  nlohmann::json H = nlohmann::json::array();
  for (std::size_t n = 0; n < trajectory.states.size(); ++n) {
    const Vector& y = trajectory.states[n];
    q.push_back(std::vector<double>(y.data(), y.data() + m));
    p.push_back(std::vector<double>(y.data() + m, y.data() + 2 * m));
    H.push_back(energy[n].H);
  }
  j["q"] = q;
  j["p"] = p;
  j["H"] = H;
  j["iterations"] = trajectory.iterations;
  j["residuals"] = trajectory.residuals;
  return j.dump(2) + "\n";
}

}  // namespace hbvm
