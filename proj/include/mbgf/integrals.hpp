#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

namespace mbgf {

// Spatial-orbital integrals in chemists' notation (ij|kl), real, 8-fold symmetric.
struct spatial_integrals {
  int norb = 0;
  int nelec = 0;
  int ms2 = 0;
  double e_nuc = 0.0;
  Eigen::MatrixXd hcore;                 // norb x norb
  std::vector<double> eri;               // norb^4 dense
  std::vector<double> orbital_energies;  // empty when the source supplies none

  void allocate();
  std::size_t eri_index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * norb + j) * norb + k) * norb + l;
  }
  double eri_get(int i, int j, int k, int l) const { return eri[eri_index(i, j, k, l)]; }
  // Stores (ij|kl) into all eight symmetry-equivalent slots.
  void eri_set(int i, int j, int k, int l, double v);
};

// Antisymmetrized spin-orbital integrals. Spins interleave: p = 2*spatial + spin,
// even p alpha, odd p beta.
struct integral_set {
  int m = 0;
  int n_e = 0;
  double e_nuc = 0.0;
  Eigen::VectorXd eps;
  Eigen::MatrixXd hcore;
  std::vector<double> v;                    // m^4 of <pq||rs>
  std::vector<std::pair<int, int>> labels;  // (spatial index, spin)
  spatial_integrals spatial;                // retained for round trips

  double vas(int p, int q, int r, int s) const {
    return v[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s];
  }
  // Aufbau occupation: the n_e lowest orbital energies, ties broken by index.
  std::vector<int> occupied() const;
  std::vector<int> virtuals() const;
  double fermi_level() const;  // midpoint of the aufbau gap
  void validate() const;       // structural checks, throws validation_error
};

// Builds the spin-orbital set. Orbital energies come from the source when present;
// otherwise they are the Fock diagonal computed with the first nelec spin orbitals
// occupied (canonical ordering assumed).
integral_set expand_to_spin(const spatial_integrals& sp);

}  // namespace mbgf
