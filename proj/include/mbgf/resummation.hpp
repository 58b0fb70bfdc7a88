#pragma once

#include <memory>
#include <vector>

#include "mbgf/dyson.hpp"
#include "mbgf/integrals.hpp"
#include "mbgf/selfenergy.hpp"

namespace mbgf {

// Frequency-dependent 2p1h and 2h1p ladder amplitudes at one omega. Amplitudes
// are stored per external orbital; u runs over (a, b, i) and v over (i, j, a)
// positions in the virtual/occupied lists.
struct tda_amplitudes {
  double omega = 0.0;
  int cycles = 0;
  int m = 0;
  int no = 0, nv = 0;
  std::vector<int> externals;  // orbitals with amplitudes present
  std::vector<double> u;       // [external][a][b][i], a/b/i list positions
  std::vector<double> v;       // [external][i][j][a]

  int ext_pos(int p) const;
  double u_at(int p, int a, int b, int i) const {
    return u[((static_cast<std::size_t>(ext_pos(p)) * nv + a) * nv + b) * no + i];
  }
  double v_at(int p, int i, int j, int a) const {
    return v[((static_cast<std::size_t>(ext_pos(p)) * no + i) * no + j) * nv + a];
  }
};

// Seeds U = V = 0, substitutes the right-hand sides once (first-order
// amplitudes), then applies n_cycles further Jacobi substitutions. A
// denominator below 1e-10 with a nonzero right-hand side raises
// numerical_error; dead amplitudes pass through as exact zeros. p_filter >= 0
// restricts the externals to one orbital (the diagonal fast path).
tda_amplitudes tda2_iterate(const integral_set& ints, double omega, int n_cycles,
                            int p_filter = -1);

double tda2_sigma_element(const integral_set& ints, const tda_amplitudes& amps, int p,
                          int q);
Eigen::MatrixXd tda2_sigma(const integral_set& ints, const tda_amplitudes& amps);

// TDA(2) evaluator; singularities stay at the 2p1h/2h1p orbital-energy
// differences at every cycle count.
self_energy_evaluator make_tda_evaluator(integral_set ints, int n_cycles, double lo,
                                         double hi);

// One pole of a diagonal dressed propagator line.
struct sc_pole {
  double omega = 0.0;
  double residue = 1.0;
  bool hole = false;
};

struct sc_pole_state {
  int m = 0;
  int cycle = -1;  // -1 marks the mean-field seed
  std::vector<std::vector<sc_pole>> orbitals;

  long long total_poles() const;
  std::vector<double> orbital_residue_sums() const;
};

// Mean-field seed: one pole per orbital at eps_q with unit residue.
sc_pole_state scgf2_seed(const integral_set& ints);

struct scgf2_options {
  double lo = 0.0, hi = 0.0;          // frequency window for the root solves
  long long pole_cap = 1000000;       // projected-pole guard
  long long term_cap = 20000000;      // memory guard on stored triple terms
  double f_product_floor = 1e-18;     // residue triple products skipped below
  double merge_tol = 1e-10;           // singularity dedup
  scan_options scan;                  // tolerances for solve_diagonal
};

struct scgf2_cycle_result {
  self_energy_evaluator evaluator;  // built from the input state
  sc_pole_state state;              // poles/residues of the output propagator
  double skipped_weight = 0.0;      // summed |F products| dropped by the floor
  long long term_count = 0;
  long long projected_poles = 0;
  double max_orbital_residue_excess = 0.0;
  scan_report scan_totals{};
};

// Builds sigma^sc(2) from the state's poles (diagonal only), solves the
// diagonal Dyson equation per orbital, and returns the next state. With the
// seed state the evaluator reproduces sigma2 bitwise.
scgf2_cycle_result scgf2_cycle(const integral_set& ints, const sc_pole_state& state,
                               const scgf2_options& opt);

self_energy_evaluator make_scgf2_evaluator(const integral_set& ints,
                                           const sc_pole_state& state,
                                           const scgf2_options& opt,
                                           double* skipped_weight = nullptr,
                                           long long* term_count = nullptr);

// Drops poles with residue below the floor; the largest-residue pole of each
// orbital always survives. Sum-rule loss is the caller's to report.
sc_pole_state prune_poles(const sc_pole_state& state, double residue_floor);

}  // namespace mbgf
