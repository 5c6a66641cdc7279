#pragma once

// Ridge-atom dictionaries, linear measurements, and the l1-regularized solver
//   minimize ||y - G a||_2^2 + lambda ||a||_1.

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kplane/analytic.hpp"
#include "kplane/fields.hpp"

namespace kplane {

struct Dictionary {
  int d = 0;
  int k = 0;
  double s = 0.0;
  std::vector<Frame> frame_grid;
  std::vector<std::vector<double>> offset_grid;
  /// Frame-major: atom index = frame_index * offset_grid.size() + offset_index.
  std::vector<RidgeAtom> atoms;

  std::size_t size() const { return atoms.size(); }
  std::size_t frame_index(std::size_t atom) const { return atom / offset_grid.size(); }
  std::size_t offset_index(std::size_t atom) const { return atom % offset_grid.size(); }
};

/// Unit-weight rbf atoms rho_s(A x - t) on frame_grid x offset_grid. Rejects
/// empty grids, s <= d-k, and duplicate atoms ((A, t) ~ (U A, U t) within 1e-9).
Dictionary build_dictionary(const std::vector<Frame>& frame_grid, const std::vector<std::vector<double>>& offset_grid,
                            double s, int d, int k);

struct MeasurementSet {
  std::vector<GridField> functionals;
  void validate() const;
};

struct LassoProblem {
  Eigen::MatrixXd gram;  // M x J
  Eigen::VectorXd y;
  double lambda = 1.0;
  double tol = 1e-8;
  int max_iter = 20000;

  void validate() const;
};

/// G[m, j] = h^d * sum over grid nodes of h_m(x) * atom_j(x).
Eigen::MatrixXd assemble(const Dictionary& dict, const MeasurementSet& meas, const GridSpec& field_grid);

struct LassoResult {
  Eigen::VectorXd a;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // objective after every iteration
};

double lasso_objective(const LassoProblem& p, const Eigen::VectorXd& a);

/// Optimality residuals of the un-halved objective: with c = G^T (y - G a),
/// off_support = max(0, max |c_j| - lambda/2) over a_j = 0 and
/// on_support = max |c_j - sign(a_j) lambda/2| over a_j != 0.
struct KktReport {
  double max_correlation = 0.0;  // max |c_j| over a_j = 0
  double off_support = 0.0;
  double on_support = 0.0;
  double violation() const { return std::max(off_support, on_support); }
};
KktReport kkt_report(const LassoProblem& p, const Eigen::VectorXd& a);

/// FISTA with backtracking and monotone restart. Stops once the KKT violation
/// drops to lambda * tol, or after max_iter iterations.
LassoResult solve_lasso(const LassoProblem& p);

/// ||a||_1.
double reg_cost(std::span<const double> a);

/// Indices with |a_j| > threshold.
std::vector<std::size_t> support(std::span<const double> a, double threshold = 1e-10);

/// sum over |a_j| > 1e-10 of a_j * atom_j sampled on grid.
GridField reconstruct(std::span<const double> a, const Dictionary& dict, const GridSpec& grid);

nlohmann::json to_json(const Dictionary& dict);
Dictionary dictionary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LassoProblem& p);
LassoProblem problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LassoResult& r);

}  // namespace kplane
