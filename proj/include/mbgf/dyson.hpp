#pragma once

#include "mbgf/integrals.hpp"
#include "mbgf/lehmann.hpp"
#include "mbgf/selfenergy.hpp"

namespace mbgf {

struct scan_options {
  double lo = 0.0, hi = 0.0;      // scan window; required
  int points = 2001;              // per bracket segment
  double tol = 1e-10;             // residual target at an accepted root
  double edge_margin_rel = 1e-6;  // relative inset from bracket edges
  int refine_factor = 4;          // extra resolution on suspicious jumps
  double min_residue = 0.0;       // reporting filter, off by default
};

struct dyson_root {
  double omega = 0.0;
  double residue = 0.0;
  double residue_error = 0.0;
  Eigen::VectorXd vector;  // unit Dyson vector; basis vector in diagonal mode
  int orbital = -1;        // diagonal mode
  int bracket = -1;
  bool hole = false;       // below the Fermi level; retagged from exact poles when known
  bool principal = false;  // bracket contains the dominant orbital energy
  bool tracking_ok = true;
  bool is_ip() const { return omega < 0.0; }
};

struct scan_report {
  int jump_refinements = 0;
  int rejected_crossings = 0;  // sign changes that failed the root test
  int skipped_points = 0;      // evaluator failures during the scan
  double excluded_fraction = 0.0;
};

std::vector<std::pair<double, double>> find_brackets(const std::vector<double>& singularities,
                                                     double lo, double hi,
                                                     double dedup_tol = 1e-10);

std::vector<dyson_root> solve_diagonal(const self_energy_evaluator& se, int q,
                                       const scan_options& opt, scan_report* report = nullptr);
std::vector<dyson_root> solve_diagonal_all(const self_energy_evaluator& se,
                                           const scan_options& opt, scan_report* report = nullptr);
std::vector<dyson_root> solve_matrix(const self_energy_evaluator& se, const scan_options& opt,
                                     scan_report* report = nullptr);

// Residue F = 1 / (1 - v' sigma'(w) v) with the evaluator's derivative path, or a
// central difference whose step shrinks near singular frequencies.
double residue_at(const self_energy_evaluator& se, double omega, const Eigen::VectorXd& v,
                  int q, double* error_bar = nullptr);

// Reassigns hole/particle tags by matching against exact pole positions.
void retag_from_poles(std::vector<dyson_root>& roots, const pole_set& ps, double tol = 1e-6);

struct sum_rule_report {
  double ip_residue_sum = 0.0;
  double ip_deviation = 0.0;               // against the electron count
  std::vector<double> orbital_sums;        // diagonal mode
  double max_orbital_deviation = 0.0;      // against 1
};

sum_rule_report check_sum_rules_matrix(const std::vector<dyson_root>& roots, int n_e);
sum_rule_report check_sum_rules_diagonal(const std::vector<dyson_root>& roots, int m);

// Ground-state energy from the hole roots:
// E = e_nuc + 1/2 sum_IP (v' hcore v + w) F.
double galitskii_migdal(const std::vector<dyson_root>& roots, const integral_set& ints);

}  // namespace mbgf
