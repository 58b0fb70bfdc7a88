#pragma once

#include "mbgf/lehmann.hpp"

namespace mbgf {

// Exact self-energy sigma(w) = w - eps - G(w)^{-1} with the analytic derivative
// sigma'(w) = 1 + G^{-1} G' G^{-1}. G is inverted through its eigendecomposition;
// a condition number beyond 1e12 raises numerical_error.
class exact_self_energy {
 public:
  exact_self_energy(integral_set ints, lehmann_data data);

  const integral_set& ints() const { return ints_; }
  const lehmann_data& data() const { return data_; }
  int m() const { return data_.poles.m; }

  Eigen::MatrixXd green(double w) const;
  Eigen::MatrixXd sigma(double w) const;
  Eigen::MatrixXd sigma_derivative(double w) const;
  // Two-sided average at w +- off, the residue-formula derivative; widens the
  // offset on pole collision.
  Eigen::MatrixXd sigma_derivative_averaged(double w, double off = 1e-9) const;

  // Singular frequencies of sigma in [lo, hi]: zeros of the eigenvalues of G,
  // each isolated between consecutive poles of G because every eigenvalue of G
  // decreases strictly between poles.
  std::vector<double> singularities_matrix(double lo, double hi) const;
  std::vector<double> singularities_diagonal(int q, double lo, double hi,
                                             double weight_floor = 1e-12) const;

  static constexpr double condition_cap = 1e12;

 private:
  integral_set ints_;
  lehmann_data data_;
};

}  // namespace mbgf
