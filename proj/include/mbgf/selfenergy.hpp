#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace mbgf {

class exact_self_energy;

// Frequency -> symmetric matrix map together with everything a root solver
// needs to know about it: the singular frequencies (bracket edges), optional
// per-orbital refinements, optional frequency windows where the evaluator is
// not trustworthy, and fast diagonal paths when available.
struct self_energy_evaluator {
  int m = 0;
  Eigen::VectorXd eps;
  double fermi = 0.0;

  std::function<Eigen::MatrixXd(double)> eval;
  std::function<Eigen::MatrixXd(double)> deriv;        // analytic path; may be empty
  std::function<double(int, double)> diag;             // fast diagonal path; may be empty
  std::function<double(int, double)> diag_deriv;       // may be empty

  // Optional direct path for the matrix solver: fills f_k = mu_k(w) - w for the
  // ascending eigenvalues mu_k of eps + sigma(w) plus their eigenvectors, without
  // forming sigma. The exact evaluator supplies this through the eigenvalues g of
  // G(w), where f = -1/g stays finite across the poles of G.
  std::function<void(double, Eigen::VectorXd&, Eigen::MatrixXd&)> curves;

  std::vector<double> singularities;                   // sorted, deduplicated
  std::vector<std::vector<double>> orbital_singularities;  // per orbital when they differ
  std::vector<std::vector<std::pair<double, double>>> orbital_excluded;  // unevaluable windows

  std::string provenance;          // exact | order-N | tda2 | scgf2
  bool monotone_diagonal = false;  // diagonal entries decrease between singularities

  const std::vector<double>& singularities_for(int q) const {
    if (q >= 0 && static_cast<std::size_t>(q) < orbital_singularities.size())
      return orbital_singularities[q];
    return singularities;
  }
  const std::vector<std::pair<double, double>>& excluded_for(int q) const {
    static const std::vector<std::pair<double, double>> none;
    if (q >= 0 && static_cast<std::size_t>(q) < orbital_excluded.size())
      return orbital_excluded[q];
    return none;
  }
  double eval_diag(int q, double w) const { return diag ? diag(q, w) : eval(w)(q, q); }
};

// Wraps the exact self-energy for the solver; singularities are located inside
// [lo, hi] once at construction.
self_energy_evaluator make_exact_evaluator(const exact_self_energy& se, double lo, double hi);

}  // namespace mbgf
