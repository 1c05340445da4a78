#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hbvm/errors.hpp"
#include "hbvm/experiments.hpp"
#include "oracles.hpp"

using namespace hbvm;
using doctest::Approx;

namespace {

const std::vector<double> kHList{0.2, 0.1, 0.05, 0.025};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("order study: midpoint rule on the harmonic oscillator") {
  const auto study = run_order_study(make_harmonic(), 1, 1, kHList);
  CHECK(study.exact_reference);
  CHECK(study.t_end == Approx(2.0));
  REQUIRE(study.rows.size() == 4);
  CHECK(study.rows[0].steps == 10);
  CHECK(study.rows[3].steps == 80);
  for (int i = 0; i < 3; ++i) {
    CHECK(study.rows[i].order >= 1.75);
    CHECK(study.rows[i].order <= 2.25);
  }
  CHECK(std::isnan(study.rows[3].order));
}

TEST_CASE("order study: pendulum with a computed reference") {
  const auto study = run_order_study(make_pendulum(), 2, 2, kHList);
  CHECK_FALSE(study.exact_reference);
  for (int i = 0; i < 3; ++i) CHECK(study.rows[i].order == Approx(4.0).epsilon(0.25 / 4));
  for (int i = 0; i + 1 < 4; ++i) CHECK(study.rows[i + 1].error < study.rows[i].error);
}

TEST_CASE("order study: observed order is the consecutive log ratio") {
  const auto study = run_order_study(make_kepler(0.0), 2, 3, kHList);
  for (int i = 0; i < 3; ++i) {
    const auto& a = study.rows[i];
    const auto& b = study.rows[i + 1];
    CHECK(a.order == Approx(std::log(a.error / b.error) / std::log(a.h / b.h)).epsilon(1e-14));
  }
}

TEST_CASE("order study: zero errors give NA orders") {
  const auto study = run_order_study(make_free(), 2, 3, kHList);
  for (const auto& row : study.rows) {
    CHECK(row.error == 0.0);
    CHECK(std::isnan(row.order));
  }
  const auto csv = lines(order_study_csv(study));
  REQUIRE(csv.size() == 5);
  CHECK(csv[0] == "h,steps,error,order");
  CHECK(csv[1] == "0.2,10,0,NA");
  CHECK(csv[4] == "0.025,80,0,NA");
}

TEST_CASE("order study: explicit horizon and argument checks") {
  OrderStudyOptions opts;
  opts.t_end = 4.0;
  const auto study = run_order_study(make_harmonic(), 2, 2, kHList, opts);
  CHECK(study.t_end == 4.0);
  CHECK(study.rows[0].steps == 20);
  CHECK(default_order_horizon(kHList) == 2.0);

  CHECK_THROWS_AS(run_order_study(make_harmonic(), 2, 2, {0.2, 0.1, 0.05}), ParameterError);
  CHECK_THROWS_AS(run_order_study(make_harmonic(), 2, 2, {0.2, 0.1, 0.1, 0.05}), ParameterError);
  CHECK_THROWS_AS(run_order_study(make_harmonic(), 2, 2, {0.2, 0.1, 0.05, -0.025}),
                  ParameterError);
  CHECK_THROWS_AS(run_order_study(make_harmonic(), 3, 2, kHList), ParameterError);
  opts.t_end = 1.03;
  CHECK_THROWS_AS(run_order_study(make_harmonic(), 2, 2, kHList, opts), ParameterError);
}

TEST_CASE("order study: integration failure carries context") {
  try {
    run_order_study(make_poly_oscillator(10), 2, 2, {4.0, 2.0, 1.0, 0.5});
    FAIL("expected a numerical failure");
  } catch (const NumericalFailure& e) {
    CHECK(std::string(e.what()).find("HBVM(2,2) h=4") != std::string::npos);
  }
}

TEST_CASE("drift study on the quartic oscillator") {
  const auto prob = problem_by_name("polyosc:4");
  const auto hbvm4 = run_drift_study(prob, 2, 4, 0.1, 1000);
  const auto hbvm6 = run_drift_study(prob, 2, 6, 0.1, 1000);
  const auto gauss = run_drift_study(prob, 2, 2, 0.1, 1000);
  CHECK(hbvm4.samples.size() == 1001);
  CHECK(hbvm4.max_abs_drift <= 1e-10);
  CHECK(hbvm6.max_abs_drift <= 1e-10);
  CHECK(gauss.max_abs_drift > hbvm4.max_abs_drift);
  CHECK(gauss.max_abs_drift > 1e-8);
  // Both conserving runs follow the same polynomial, so they agree closely.
  CHECK(std::abs(hbvm4.samples.back().H - hbvm6.samples.back().H) <= 1e-12);
}

TEST_CASE("drift study on the harmonic oscillator") {
  for (int s = 1; s <= 4; ++s)
    for (int k = s; k <= s + 3; ++k)
      CHECK(run_drift_study(make_harmonic(), s, k, 0.1, 100).max_abs_drift <= 1e-12);
}

TEST_CASE("drift study csv") {
  const auto study = run_drift_study(make_harmonic(), 2, 2, 0.1, 3);
  const auto csv = lines(drift_study_csv(study));
  REQUIRE(csv.size() == 5);
  CHECK(csv[0] == "step,time,H,drift");
  CHECK(csv[1] == "0,0,0.5,0");
  CHECK(csv[2].rfind("1,0.1,", 0) == 0);
  CHECK(csv[4].rfind("3,", 0) == 0);
  CHECK_THROWS_AS(run_drift_study(make_harmonic(), 2, 1, 0.1, 3), ParameterError);
  CHECK_THROWS_AS(run_drift_study(make_harmonic(), 2, 2, -0.1, 3), ParameterError);
}

TEST_CASE("rkn equivalence") {
  const auto report = run_rkn_equiv(make_kepler(0.3), 2, 3, 0.05, 100);
  CHECK(report.states_compared == 101);
  CHECK(report.max_q_deviation <= 1e-10);
  CHECK(report.max_p_deviation <= 1e-10);

  const auto zero = run_rkn_equiv(make_free(), 2, 2, 0.1, 20);
  CHECK(zero.max_q_deviation == 0.0);
  CHECK(zero.max_p_deviation == 0.0);

  try {
    run_rkn_equiv(make_kepler(0.3), 1, 3, 0.05, 10);
    FAIL("expected UnsupportedTruncationError");
  } catch (const UnsupportedTruncationError& e) {
    CHECK(std::string(e.what()).find("s >= 2") != std::string::npos);
  }

  const auto csv = lines(rkn_equiv_csv(zero));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "metric,value");
  CHECK(csv[1] == "max_q_deviation,0");
  CHECK(csv[3] == "states_compared,21");
  CHECK(rkn_equiv_json(zero).find("\"states_compared\": 21") != std::string::npos);
}

TEST_CASE("trajectory csv") {
  const auto prob = make_kepler(0.0);
  SolverConfig cfg;
  cfg.h = 0.1;
  cfg.n_steps = 2;
  const auto traj = integrate(prob.first_order(), 2, 2, cfg);
  const auto csv = lines(trajectory_csv(prob, traj));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "step,time,q1,q2,p1,p2,H,drift,iterations,residual");
  CHECK(csv[1] == "0,0,1,0,0,1,-0.5,0,0,0");
  CHECK(trajectory_json(prob, traj).find("\"problem\": \"kepler:0\"") != std::string::npos);
}
