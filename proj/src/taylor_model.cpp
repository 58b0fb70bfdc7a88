#include "mbgf/taylor_model.hpp"

#include <algorithm>
#include <cmath>

#include "mbgf/errors.hpp"

namespace mbgf {

model_poles model_poles::defaults() {
  model_poles mp;
  mp.poles = {{1.9, 0.2, 0.2}, {0.75, 0.1, 0.1}, {-1.1, -0.1, -0.1}, {-2.2, -0.15, -0.15}};
  return mp;
}

void model_poles::validate() const {
  if (poles.empty()) throw validation_error("model needs at least one pole");
  for (double lambda : {0.0, 1.0})
    for (std::size_t a = 0; a < poles.size(); ++a)
      for (std::size_t b = a + 1; b < poles.size(); ++b)
        if (std::abs(poles[a].at(lambda) - poles[b].at(lambda)) <= 1e-9)
          throw validation_error("model poles must stay distinct at lambda=0 and 1");
}

double model_g(const model_poles& mp, double omega, double lambda) {
  double g = 0.0;
  for (const model_pole& p : mp.poles) {
    const double d = omega - p.at(lambda);
    if (std::abs(d) < 1e-13)
      throw numerical_error("frequency sits on a model pole");
    g += 1.0 / d;
  }
  return g;
}

std::vector<double> taylor_coefficients(const model_poles& mp, double omega,
                                        int max_order) {
  if (max_order < 0) throw validation_error("negative Taylor order");
  std::vector<double> c(max_order + 1, 0.0);
  for (const model_pole& p : mp.poles) {
    const double d0 = omega - p.c0;
    if (std::abs(d0) < 1e-13)
      throw numerical_error("frequency sits on a lambda=0 model pole");
    double tm2 = 0.0, tm1 = 0.0;
    for (int n = 0; n <= max_order; ++n) {
      const double t = (n == 0) ? 1.0 / d0 : (p.c1 * tm1 + p.c2 * tm2) / d0;
      c[n] += t;
      tm2 = tm1;
      tm1 = t;
    }
  }
  return c;
}

double taylor_partial_sum(const std::vector<double>& coefficients, int order,
                          double lambda) {
  if (order < 0 || order >= static_cast<int>(coefficients.size()))
    throw validation_error("partial-sum order outside the coefficient range");
  double s = 0.0, pw = 1.0;
  for (int t = 0; t <= order; ++t) {
    s += coefficients[t] * pw;
    pw *= lambda;
  }
  return s;
}

series_class classify_series(const model_poles& mp, double omega, int max_order) {
  if (max_order < 7)
    throw validation_error("classification needs at least seven orders");
  const double exact = model_g(mp, omega, 1.0);
  const std::vector<double> c = taylor_coefficients(mp, omega, max_order);

  std::vector<double> errs(max_order + 1);
  double s = 0.0;
  for (int n = 0; n <= max_order; ++n) {
    s += c[n];  // partial sums at lambda = 1
    errs[n] = std::abs(s - exact);
  }
  if (errs[max_order] < 1e-14 * (1.0 + std::abs(exact))) return series_class::convergent;

  const double tail = errs[max_order];
  const double head = errs[max_order - 6];
  if (head == 0.0 || tail == 0.0) return series_class::convergent;
  const double ratio = std::pow(tail / head, 1.0 / 6.0);
  if (ratio <= 0.95) return series_class::convergent;
  if (ratio >= 1.05) return series_class::divergent;
  return series_class::inconclusive;
}

std::vector<double> make_model_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo < hi)) throw validation_error("bad grid window");
  const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (int k = 0; k <= n; ++k) grid.push_back(lo + k * step);
  return grid;
}

convergence_map_result convergence_map(const model_poles& mp, double lo, double hi,
                                       double step, int max_order, double pole_margin) {
  mp.validate();
  convergence_map_result out;
  out.step = step;
  out.max_order = max_order;

  std::vector<double> pole_positions;
  for (const model_pole& p : mp.poles) {
    pole_positions.push_back(p.at(0.0));
    pole_positions.push_back(p.at(1.0));
  }

  for (double w : make_model_grid(lo, hi, step)) {
    bool near_pole = false;
    for (double s : pole_positions)
      if (std::abs(w - s) < pole_margin) {
        near_pole = true;
        break;
      }
    if (near_pole) {
      out.skipped.push_back(w);
      continue;
    }
    convergence_entry e;
    e.omega = w;
    e.exact_g = model_g(mp, w, 1.0);
    e.cls = classify_series(mp, w, max_order);
    const std::vector<double> c = taylor_coefficients(mp, w, max_order);
    e.last_error = std::abs(taylor_partial_sum(c, max_order, 1.0) - e.exact_g);
    out.entries.push_back(e);
  }
  if (out.entries.empty()) return out;

  // Contiguous convergent run through the grid point nearest omega = 0.
  std::size_t center = 0;
  for (std::size_t k = 1; k < out.entries.size(); ++k)
    if (std::abs(out.entries[k].omega) < std::abs(out.entries[center].omega)) center = k;
  if (out.entries[center].cls == series_class::convergent) {
    std::size_t a = center, b = center;
    while (a > 0 && out.entries[a - 1].cls == series_class::convergent) --a;
    while (b + 1 < out.entries.size() &&
           out.entries[b + 1].cls == series_class::convergent)
      ++b;
    out.has_central = true;
    out.central_lo = out.entries[a].omega;
    out.central_hi = out.entries[b].omega;
  }
  out.terminal_low_convergent = out.entries.front().cls == series_class::convergent;
  out.terminal_high_convergent = out.entries.back().cls == series_class::convergent;
  return out;
}

}  // namespace mbgf
