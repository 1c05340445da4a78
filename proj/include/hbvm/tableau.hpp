#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hbvm/quadrature.hpp"

namespace hbvm {

enum class Family { HbvmRk, HbvmRkn, LowRankSymplectic };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Discrete HBVM(k,s) Runge-Kutta tableau (c, b, A). The low-rank symplectic
/// variant shares this layout but not the row-sum property A 1 = c.
struct ButcherTableauRK {
  Family family = Family::HbvmRk;
  int k = 0;
  int s = 0;
  Eigen::VectorXd c;
  Eigen::VectorXd b;
  Eigen::MatrixXd A;
};

/// Discrete HBVM(k,s) Runge-Kutta-Nystrom tableau (c, b_bar, b, A_bar), s >= 2.
struct ButcherTableauRKN {
  int k = 0;
  int s = 0;
  Eigen::VectorXd c;
  Eigen::VectorXd b;
  Eigen::VectorXd b_bar;
  Eigen::MatrixXd A_bar;
};

using AnyTableau = std::variant<ButcherTableauRK, ButcherTableauRKN>;

/// Basis data sampled at the quadrature nodes.
struct TableauMatrices {
  Eigen::VectorXd c;
  Eigen::VectorXd b;
  Eigen::MatrixXd Omega;  // diag(b)
  Eigen::MatrixXd I_s;    // k x s, I_s(i, j) = int_0^{c_i} P_j
  Eigen::MatrixXd P_s;    // k x s, P_s(i, j) = P_j(c_i)
  Eigen::MatrixXd P_s1;   // k x (s+1)
};

TableauMatrices build_tableau_matrices(const QuadratureRule& rule, int s);

/// A = I_s P_s^T Omega on the k-node Gauss rule. Requires k >= s >= 1.
ButcherTableauRK build_rk(int k, int s);
/// Same construction on an arbitrary rule (k = rule size).
ButcherTableauRK build_rk(const QuadratureRule& rule, int s);

/// A_bar = I_s X_s P_s^T Omega, b_bar = b o (1 - c). Requires k >= s >= 2.
ButcherTableauRKN build_rkn(int k, int s);
ButcherTableauRKN build_rkn(const QuadratureRule& rule, int s);

/// A = P_s X_s P_s^T Omega with the k-node Gauss weights.
ButcherTableauRK build_lowrank_symplectic(int k, int s);

/// s-stage Gauss collocation from Lagrange cardinal polynomials, 1 <= s <= 10.
ButcherTableauRK gauss_collocation(int s);

enum class TableauFormat { Json, Csv };

TableauFormat format_from_string(std::string_view name);

/// One CSV file of a tableau export.
struct CsvDocument {
  std::string name;
  std::string content;
};

/// meta.csv (key,value), c.csv / b.csv / b_bar.csv (i,value), A.csv or A_bar.csv (i,j,value).
std::vector<CsvDocument> export_csv_documents(const AnyTableau& tableau);
AnyTableau import_csv_documents(const std::vector<CsvDocument>& documents);

/// JSON object, or for CSV the documents concatenated with "## <name>" separator lines.
std::string export_tableau(const AnyTableau& tableau, TableauFormat format);
AnyTableau import_tableau(std::string_view bytes, TableauFormat format);

}  // namespace hbvm
