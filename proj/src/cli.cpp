#include "hbvm/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hbvm/errors.hpp"
#include "hbvm/experiments.hpp"
#include "hbvm/format.hpp"
#include "hbvm/problems.hpp"
#include "hbvm/tableau.hpp"

namespace hbvm {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const FormatError&) {
      throw UsageError("--h-list: '" + item + "' is not a number");
    }
  }
  return out;
}

bool is_rkn_family(const std::string& family) { return family == "rkn" || family == "hbvm-rkn"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("--out: cannot open '" + path + "' for writing");
  file << text;
}

// Writes to --out when given, otherwise to standard output.
void emit(const ExperimentSpec& spec, const std::string& text, std::ostream& out) {
  if (spec.out.empty()) {
    out << text;
  } else {
    write_text(spec.out, text);
  }
}

std::string resolved_format(const ExperimentSpec& spec) {
  if (!spec.format.empty()) return spec.format;
  return spec.command == "tableau" || spec.command == "rkn-equiv" ? "json" : "csv";
}

int run_tableau(const ExperimentSpec& spec, std::ostream& out) {
  AnyTableau tableau;
  if (spec.family == "rk" || spec.family == "hbvm-rk") {
    tableau = build_rk(spec.k, spec.s);
  } else if (is_rkn_family(spec.family)) {
    tableau = build_rkn(spec.k, spec.s);
  } else {
    tableau = build_lowrank_symplectic(spec.k, spec.s);
  }
  const TableauFormat format = format_from_string(resolved_format(spec));
  if (format == TableauFormat::Csv && !spec.out.empty()) {
    std::filesystem::create_directories(spec.out);
    for (const auto& doc : export_csv_documents(tableau))
      write_text((std::filesystem::path(spec.out) / doc.name).string(), doc.content);
    return 0;
  }
  emit(spec, export_tableau(tableau, format), out);
  return 0;
}

int run_integrate(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const HamiltonianProblem problem = problem_by_name(spec.problem);
  SolverConfig cfg;
  cfg.h = spec.h;
  cfg.n_steps = spec.steps;
  cfg.tol = spec.tol;
  cfg.scheme = spec.scheme;
  const Trajectory traj = is_rkn_family(spec.family)
                              ? integrate(problem.second_order(), spec.k, spec.s, cfg)
                              : integrate(problem.first_order(), spec.k, spec.s, cfg);
  emit(spec, resolved_format(spec) == "json" ? trajectory_json(problem, traj)
                                             : trajectory_csv(problem, traj),
       out);
  if (!traj.ok()) {
    err << "error: " << traj.failure->message << "\n";
    return 2;
  }
  return 0;
}

int run_order(const ExperimentSpec& spec, std::ostream& out) {
  OrderStudyOptions options;
  options.t_end = spec.t_end;
  options.tol = spec.tol;
  options.scheme = spec.scheme;
  const OrderStudy study =
      run_order_study(problem_by_name(spec.problem), spec.s, spec.k, spec.h_list, options);
  if (resolved_format(spec) == "json") {
    std::string text = "{\n  \"t_end\": " + format_double(study.t_end) +
                       ",\n  \"exact_reference\": " + (study.exact_reference ? "true" : "false") +
                       ",\n  \"rows\": [";
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
      const auto& r = study.rows[i];
      const std::string order = std::isnan(r.order) ? "\"NA\"" : format_double(r.order);
      text += std::string(i ? "," : "") + "\n    {\"h\": " + format_double(r.h) +
              ", \"steps\": " + std::to_string(r.steps) + ", \"error\": " +
              format_double(r.error) + ", \"order\": " + order + "}";
    }
    text += "\n  ]\n}\n";
    emit(spec, text, out);
  } else {
    emit(spec, order_study_csv(study), out);
  }
  return 0;
}

int run_drift(const ExperimentSpec& spec, std::ostream& out) {
  const DriftStudy study = run_drift_study(problem_by_name(spec.problem), spec.s, spec.k, spec.h,
                                           spec.steps, spec.tol, spec.scheme);
  emit(spec, drift_study_csv(study), out);
  if (!spec.out.empty()) out << "max_abs_drift," << format_double(study.max_abs_drift) << "\n";
  return 0;
}

int run_equiv(const ExperimentSpec& spec, std::ostream& out) {
  const RknEquivalence report = run_rkn_equiv(problem_by_name(spec.problem), spec.s, spec.k,
                                              spec.h, spec.steps, spec.tol, spec.scheme);
  emit(spec, resolved_format(spec) == "json" ? rkn_equiv_json(report) : rkn_equiv_csv(report),
       out);
  return 0;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (s < 1) throw ParameterError("--s: s >= 1 required");
  if (k < s)
    throw ParameterError("--k: k >= s required (got k = " + std::to_string(k) +
                         ", s = " + std::to_string(s) + ")");
  if (k > kMaxGaussNodes) throw ParameterError("--k: k <= 64 required");
  if (command != "tableau") problem_by_name(problem);
  if (command == "integrate" || command == "drift-study" || command == "rkn-equiv") {
    if (!(h > 0.0)) throw ParameterError("--h: step size must be > 0");
    if (steps < 0) throw ParameterError("--steps: must be >= 0");
  }
  if (command == "order-study") {
    if (h_list.size() < 4) throw ParameterError("--h-list: at least 4 step sizes required");
    for (std::size_t i = 0; i < h_list.size(); ++i) {
      if (!(h_list[i] > 0.0)) throw ParameterError("--h-list: step sizes must be > 0");
      if (i > 0 && !(h_list[i] < h_list[i - 1]))
        throw ParameterError("--h-list: step sizes must be strictly decreasing");
    }
    if (t_end < 0.0) throw ParameterError("--t-end: must be > 0");
  }
  if (!(tol > 0.0)) throw ParameterError("--tol: must be > 0");
  const bool known_family = family == "rk" || family == "hbvm-rk" || is_rkn_family(family) ||
                            family == "lowrank" || family == "lowrank-symplectic";
  if (!known_family) throw ParameterError("--family: expected rk, rkn or lowrank");
  if (command == "integrate" && !(family == "rk" || family == "hbvm-rk" || is_rkn_family(family)))
    throw ParameterError("--family: integrate supports rk or rkn");
  if ((command == "rkn-equiv" || is_rkn_family(family)) && s < 2)
    throw UnsupportedTruncationError(
        "--s: RKN methods require s >= 2 (with s = 1 the weight 1 - c degenerates to 1)");
  if (!format.empty() && format != "json" && format != "csv")
    throw ParameterError("--format: expected json or csv");
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HBVM(k,s) tableaus, integrations and order/energy studies", "hbvm"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  ExperimentSpec spec;
  std::string h_list_text;
  std::string scheme_text = "fixed-point";

  auto add_common = [&](CLI::App* sub, bool with_problem) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--k", spec.k, "quadrature nodes")->required();
    sub->add_option("--s", spec.s, "polynomial degree")->required();
    sub->add_option("--tol", spec.tol, "nonlinear tolerance");
    sub->add_option("--format", spec.format, "json or csv");
    sub->add_option("--out", spec.out, "output path");
    if (with_problem) {
      sub->add_option("--problem", spec.problem,
                      "harmonic | pendulum | kepler:e | polyosc:d | henonheiles | free")
          ->required();
      sub->add_option("--scheme", scheme_text, "fixed-point or newton-hybrid");
    }
  };

  CLI::App* tableau = app.add_subcommand("tableau", "build and export a tableau");
  add_common(tableau, false);
  tableau->add_option("--family", spec.family, "rk | rkn | lowrank");

  CLI::App* integ = app.add_subcommand("integrate", "integrate a built-in problem");
  add_common(integ, true);
  integ->add_option("--h", spec.h, "step size")->required();
  integ->add_option("--steps", spec.steps, "number of steps");
  integ->add_option("--family", spec.family, "rk (first order) or rkn (second order)");

  CLI::App* order = app.add_subcommand("order-study", "observed order over a list of step sizes");
  add_common(order, true);
  order->add_option("--h-list", h_list_text, "comma-separated, strictly decreasing")->required();
  order->add_option("--t-end", spec.t_end, "final time (default 10 h_max)");

  CLI::App* drift = app.add_subcommand("drift-study", "energy drift along a run");
  add_common(drift, true);
  drift->add_option("--h", spec.h, "step size")->required();
  drift->add_option("--steps", spec.steps, "number of steps");

  CLI::App* equiv = app.add_subcommand("rkn-equiv", "compare first-order and RKN runs");
  add_common(equiv, true);
  equiv->add_option("--h", spec.h, "step size")->required();
  equiv->add_option("--steps", spec.steps, "number of steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    spec.command = app.get_subcommands().front()->get_name();
    if (!h_list_text.empty()) spec.h_list = parse_h_list(h_list_text);
    if (scheme_text == "fixed-point") {
      spec.scheme = IterationScheme::FixedPoint;
    } else if (scheme_text == "newton-hybrid") {
      spec.scheme = IterationScheme::NewtonHybrid;
    } else {
      throw UsageError("--scheme: expected fixed-point or newton-hybrid");
    }
    spec.validate();
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (spec.command == "tableau") return run_tableau(spec, out);
    if (spec.command == "integrate") return run_integrate(spec, out, err);
    if (spec.command == "order-study") return run_order(spec, out);
    if (spec.command == "drift-study") return run_drift(spec, out);
    return run_equiv(spec, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const UnsupportedTruncationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "usage error: --out: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("hbvm");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hbvm
