#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mbgf/fci.hpp"

namespace mbgf {

struct spectral_pole {
  double omega = 0.0;
  Eigen::MatrixXd weight;  // symmetric PSD outer products of transition amplitudes
  bool hole = false;       // removal sector origin
};

struct pole_set {
  int m = 0;
  std::vector<spectral_pole> poles;  // ascending omega
  double trace_sum() const;          // equals m when the state sums are complete
  std::vector<int> orbital_poles(int q, double floor = 1e-12) const;
};

struct lehmann_data {
  pole_set poles;
  double lambda = 1.0;
  double e0 = 0.0;        // electronic ground energy of the N sector
  double e0_total = 0.0;  // e0 + e_nuc
  int n_e = 0;
  bool ground_degenerate = false;
};

// Diagonalizes the N sector at the declared spin projection and both reachable
// (N +- 1) projections, then assembles the spectral poles of G. Eigenstates with
// no one-particle coupling to the ground state are not poles and are dropped
// (trace weight below weight_floor); degenerate poles of one sector merge within
// merge_tol.
lehmann_data build_lehmann(const integral_set& ints, double lambda,
                           int max_dim = default_sector_cap, double merge_tol = 1e-10,
                           double weight_floor = 1e-12);

// G(w) = sum_k W_k / (w - w_k); raises numerical_error within 1e-13 of a pole.
Eigen::MatrixXd lehmann_green(const pole_set& ps, double omega);
Eigen::MatrixXd lehmann_green_derivative(const pole_set& ps, double omega);

}  // namespace mbgf
