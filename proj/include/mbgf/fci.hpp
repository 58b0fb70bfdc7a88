#pragma once

#include <Eigen/Dense>

#include "mbgf/determinants.hpp"
#include "mbgf/integrals.hpp"

namespace mbgf {

inline constexpr int default_sector_cap = 20000;

struct sector_spectrum {
  std::vector<determinant> dets;
  Eigen::VectorXd energies;  // ascending, electronic part only
  Eigen::MatrixXd vectors;   // column k belongs to energies[k]
  double lambda = 1.0;
};

// Matrix element of the interpolated Hamiltonian
//   H(lambda) = H0 + lambda (H - H0),  H0 = sum_p eps_p n_p,
// electronic part only; the nuclear constant is carried separately.
double hamiltonian_element(const integral_set& ints, const determinant& a, const determinant& b,
                           double lambda);

Eigen::MatrixXd build_hamiltonian(const integral_set& ints, const std::vector<determinant>& dets,
                                  double lambda, int max_dim = default_sector_cap);

sector_spectrum diagonalize_sector(const integral_set& ints, std::vector<determinant> dets,
                                   double lambda, int max_dim = default_sector_cap);

}  // namespace mbgf
