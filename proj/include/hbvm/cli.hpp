#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hbvm/integrator.hpp"

namespace hbvm {

/// Parsed command line of the experiment front end.
struct ExperimentSpec {
  std::string command;  // tableau | integrate | order-study | drift-study | rkn-equiv
  std::string problem;
  int k = 0;
  int s = 0;
  double h = 0.0;
  std::vector<double> h_list;
  int steps = 100;
  double tol = 1e-14;
  double t_end = 0.0;
  std::string family = "rk";
  std::string format;  // empty selects the command default
  std::string out;
  IterationScheme scheme = IterationScheme::FixedPoint;

  /// Throws ParameterError / UnsupportedTruncationError before any computation.
  void validate() const;
};

/// Exit status: 0 success, 1 usage error, 2 numerical failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hbvm
