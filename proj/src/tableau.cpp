#include "hbvm/tableau.hpp"

#include <string>

#include "hbvm/errors.hpp"
#include "hbvm/legendre.hpp"

namespace hbvm {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::HbvmRk:
      return "hbvm-rk";
    case Family::HbvmRkn:
      return "hbvm-rkn";
    case Family::LowRankSymplectic:
      return "lowrank-symplectic";
  }
  throw InternalError("unknown tableau family");
}

Family family_from_string(std::string_view name) {
  if (name == "hbvm-rk") return Family::HbvmRk;
  if (name == "hbvm-rkn") return Family::HbvmRkn;
  if (name == "lowrank-symplectic") return Family::LowRankSymplectic;
  throw FormatError("unknown tableau family '" + std::string(name) + "'");
}

namespace {

void require_k_ge_s(int k, int s) {
  if (s < 1) throw ParameterError("s must be >= 1, got " + std::to_string(s));
  if (k < s)
    throw ParameterError("k >= s required, got k = " + std::to_string(k) +
                         ", s = " + std::to_string(s));
}

void require_rkn_s(int s) {
  if (s < 2)
    throw UnsupportedTruncationError(
        "RKN methods require s >= 2: with s = 1 the weight 1 - c degenerates to 1; got s = " +
        std::to_string(s));
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TableauMatrices build_tableau_matrices(const QuadratureRule& rule, int s) {
  const int k = rule.size();
  require_k_ge_s(k, s);
  const LegendreBasis basis;
  TableauMatrices t;
  t.c = to_vector(rule.nodes());
  t.b = to_vector(rule.weights());
  t.Omega = t.b.asDiagonal();
  t.I_s.resize(k, s);
  t.P_s1.resize(k, s + 1);
  for (int i = 0; i < k; ++i) {
    t.I_s.row(i) = basis.I_vector(s, t.c[i]).transpose();
    t.P_s1.row(i) = basis.P_vector(s + 1, t.c[i]).transpose();
  }
  t.P_s = t.P_s1.leftCols(s);
  return t;
}

ButcherTableauRK build_rk(const QuadratureRule& rule, int s) {
  const TableauMatrices m = build_tableau_matrices(rule, s);
  ButcherTableauRK t;
  t.family = Family::HbvmRk;
  t.k = rule.size();
  t.s = s;
  t.c = m.c;
  t.b = m.b;
  t.A = m.I_s * m.P_s.transpose() * m.Omega;
  return t;
}

ButcherTableauRK build_rk(int k, int s) {
  require_k_ge_s(k, s);
  return build_rk(gauss_rule(k), s);
}

ButcherTableauRKN build_rkn(const QuadratureRule& rule, int s) {
  require_rkn_s(s);
  const TableauMatrices m = build_tableau_matrices(rule, s);
  const SpectralMatrices spectral = build_spectral(s);
  ButcherTableauRKN t;
  t.k = rule.size();
  t.s = s;
  t.c = m.c;
  t.b = m.b;
  t.b_bar = m.b.cwiseProduct((Eigen::VectorXd::Ones(t.k) - m.c));
  t.A_bar = m.I_s * spectral.X * m.P_s.transpose() * m.Omega;
  return t;
}

ButcherTableauRKN build_rkn(int k, int s) {
  require_rkn_s(s);
  require_k_ge_s(k, s);
  return build_rkn(gauss_rule(k), s);
}

ButcherTableauRK build_lowrank_symplectic(int k, int s) {
  require_k_ge_s(k, s);
  const TableauMatrices m = build_tableau_matrices(gauss_rule(k), s);
  const SpectralMatrices spectral = build_spectral(s);
  ButcherTableauRK t;
  t.family = Family::LowRankSymplectic;
  t.k = k;
  t.s = s;
  t.c = m.c;
  t.b = m.b;
  t.A = m.P_s * spectral.X * m.P_s.transpose() * m.Omega;
  return t;
}

ButcherTableauRK gauss_collocation(int s) {
  if (s < 1 || s > 10) throw ParameterError("gauss_collocation: s must be in [1, 10]");
  const QuadratureRule rule = gauss_rule(s);
  const auto& nodes = rule.nodes();
  auto cardinal = [&](int j, double x) {
    double value = 1.0;
    for (int m = 0; m < s; ++m)
      if (m != j) value *= (x - nodes[m]) / (nodes[j] - nodes[m]);
    return value;
  };
  // The s-node rule integrates the degree s-1 cardinal polynomials exactly on [0, upper].
  auto integral = [&](int j, double upper) {
    double sum = 0.0;
    for (int q = 0; q < s; ++q) sum += rule.weights()[q] * cardinal(j, upper * nodes[q]);
    return upper * sum;
  };
  ButcherTableauRK t;
  t.family = Family::HbvmRk;
  t.k = s;
  t.s = s;
  t.c = to_vector(nodes);
  t.b.resize(s);
  t.A.resize(s, s);
  for (int j = 0; j < s; ++j) {
    t.b[j] = integral(j, 1.0);
    for (int i = 0; i < s; ++i) t.A(i, j) = integral(j, nodes[i]);
  }
  return t;
}

}  // namespace hbvm
