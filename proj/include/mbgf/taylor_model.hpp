#pragma once

#include <vector>

namespace mbgf {

// One pole trajectory E(lambda) = c0 + c1*lambda + c2*lambda^2.
struct model_pole {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double at(double lambda) const { return c0 + lambda * (c1 + lambda * c2); }
};

struct model_poles {
  std::vector<model_pole> poles;

  // The four-pole set the analysis is built around.
  static model_poles defaults();
  // Poles must stay distinct at lambda = 0 and lambda = 1.
  void validate() const;
};

// g(omega; lambda) = sum_k 1 / (omega - E_k(lambda)).
double model_g(const model_poles& mp, double omega, double lambda);

// Exact Taylor coefficients of g in lambda about 0, by the per-pole recurrence
// d0*t_n = c1*t_{n-1} + c2*t_{n-2}; no numerical differentiation involved.
std::vector<double> taylor_coefficients(const model_poles& mp, double omega,
                                        int max_order);
double taylor_partial_sum(const std::vector<double>& coefficients, int order,
                          double lambda);

enum class series_class { convergent, divergent, inconclusive };

// Judges the lambda = 1 series from the error trend over the last six orders:
// the six-step geometric-mean error ratio against 0.95/1.05 thresholds, with an
// immediate convergent verdict once the error reaches rounding level.
series_class classify_series(const model_poles& mp, double omega, int max_order);

struct convergence_entry {
  double omega = 0.0;
  series_class cls = series_class::inconclusive;
  double exact_g = 0.0;
  double last_error = 0.0;
};

struct convergence_map_result {
  double step = 0.0;
  int max_order = 0;
  std::vector<convergence_entry> entries;
  std::vector<double> skipped;  // grid points within the pole margin
  bool has_central = false;
  double central_lo = 0.0, central_hi = 0.0;  // outermost convergent grid points
  bool terminal_low_convergent = false;
  bool terminal_high_convergent = false;
};

// Classifies a uniform grid, skipping points within margin of any pole at
// lambda = 0 or 1, and reports the contiguous convergent region around
// omega = 0 plus the terminal-region verdicts.
convergence_map_result convergence_map(const model_poles& mp, double lo, double hi,
                                       double step, int max_order,
                                       double pole_margin = 1e-3);

std::vector<double> make_model_grid(double lo, double hi, double step);

}  // namespace mbgf
