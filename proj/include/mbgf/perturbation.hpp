#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mbgf/exact_sigma.hpp"
#include "mbgf/selfenergy.hpp"

namespace mbgf {

// Analytic second-order self-energy, 2p1h plus 2h1p terms. The matrix is built
// element by element with a fixed loop order so the diagonal entry and the
// (q,q) matrix entry are the same double. Denominators under 1e-12 with a
// nonzero coupling raise numerical_error; dead terms pass through as zero.
double sigma2_element(const integral_set& ints, int p, int q, double omega);
double sigma2_element_derivative(const integral_set& ints, int p, int q, double omega);
Eigen::MatrixXd sigma2_analytic(const integral_set& ints, double omega);
Eigen::MatrixXd sigma2_derivative(const integral_set& ints, double omega);
double sigma2_diag(const integral_set& ints, int q, double omega);
double sigma2_diag_derivative(const integral_set& ints, int q, double omega);

// 2p1h/2h1p singular frequencies of sigma2 with a nonzero coupling to orbital
// q (q < 0: to any orbital), sorted, merged within 1e-10.
std::vector<double> sigma2_singularities(const integral_set& ints, int q = -1,
                                         double coupling_floor = 1e-12);

// Candidate singular frequencies for the order-n correction. Order <= 3 keeps
// the coupling-filtered 2p1h/2h1p set; higher orders add every unfiltered
// orbital-energy combination with up to floor(n/2)+1 particle (or hole) lines,
// since interior denominators need no direct coupling to the external orbital.
std::vector<double> denominator_catalogue(const integral_set& ints, int q, int order,
                                          double coupling_floor = 1e-12);

enum class stencil_fit { vandermonde_poly, richardson };

// Symmetric lambda grid and the extraction matrix mapping samples
// sigma(w; lambda_j) to Taylor coefficients delta-sigma^(n). The default path
// interpolates on a Chebyshev-scaled basis and converts to monomials; the
// Richardson path combines minimal central-difference stencils at h and 2h.
struct lambda_stencil {
  int max_order = 0;
  double h = 0.0;
  stencil_fit fit = stencil_fit::vandermonde_poly;
  std::vector<double> points;      // 2*max_order+1 values, symmetric about 0
  Eigen::MatrixXd extract;         // (max_order+1) x points; row n gives delta^(n)
  double fit_condition = 0.0;      // singular-value ratio of the design matrix
  std::vector<double> amplification;  // L1 row norms of extract

  static lambda_stencil make(int max_order, double h = 0.05,
                             stencil_fit fit = stencil_fit::vandermonde_poly);
};

// Exact engines for every nonzero stencil lambda. sigma(w; 0) is identically
// zero, so the center point carries no engine.
class lambda_scan {
 public:
  lambda_scan(integral_set ints, lambda_stencil stencil,
              int max_sector_dim = default_sector_cap);

  const integral_set& ints() const { return ints_; }
  const lambda_stencil& stencil() const { return stencil_; }
  int points() const { return static_cast<int>(stencil_.points.size()); }
  // Null at the lambda = 0 point.
  const exact_self_energy* engine(int j) const { return engines_[j].get(); }

  // Samples sigma(w; lambda_j) for every stencil point (zero matrix at 0).
  std::vector<Eigen::MatrixXd> sigma_samples(double omega) const;
  Eigen::MatrixXd order_correction(int order, double omega) const;
  // Frequencies within margin of any engine pole or singularity, merged; grid
  // points there are unusable for the fit.
  std::vector<std::pair<double, double>> unusable_zones(double lo, double hi,
                                                        double margin) const;

 private:
  integral_set ints_;
  lambda_stencil stencil_;
  std::vector<std::unique_ptr<exact_self_energy>> engines_;
};

struct order_corrections {
  std::vector<double> omega;               // grid points kept
  std::vector<double> dropped;             // grid points rejected near poles
  std::vector<std::vector<Eigen::MatrixXd>> delta;  // [order][grid point]
  double fit_condition = 0.0;
  std::vector<double> amplification;

  // Cumulative sigma^(n) at grid index k; orders 0 and 1 vanish to fit noise.
  Eigen::MatrixXd cumulative(int order, int k) const;
};

order_corrections extract_order_corrections(const lambda_scan& scan,
                                            const std::vector<double>& omega_grid,
                                            double drop_margin = 1e-6);
order_corrections extract_order_corrections(const integral_set& ints,
                                            const std::vector<double>& omega_grid,
                                            const lambda_stencil& stencil,
                                            int max_sector_dim = default_sector_cap,
                                            double drop_margin = 1e-6);

// Cumulative order-n evaluator: analytic sigma2 plus the fitted corrections of
// orders 3..n folded into one engine-weight vector. Bracket edges come from the
// frozen denominator catalogue; zones of width sweep_margin around every
// engine singularity are excluded from root scans.
self_energy_evaluator make_order_evaluator(std::shared_ptr<const lambda_scan> scan,
                                           int order, double lo, double hi,
                                           double sweep_margin = 0.05);

// Bold-line G at cumulative order n: (w - eps - sigma_n(w))^{-1}. Raises
// numerical_error at a Dyson root, where the matrix is singular.
Eigen::MatrixXd g_dyson_n(const integral_set& ints, const self_energy_evaluator& se,
                          double omega);

}  // namespace mbgf
