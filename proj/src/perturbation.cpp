#include "mbgf/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mbgf/errors.hpp"
#include "mbgf/util.hpp"

namespace mbgf {

namespace {

constexpr double kCollision = 1e-12;

[[noreturn]] void throw_collision(double omega, double d) {
  std::ostringstream os;
  os << "second-order denominator collision at omega=" << omega << " (|d|=" << std::abs(d)
     << "); move the frequency off the 2p1h/2h1p value";
  throw numerical_error(os.str());
}

void merge_sorted(std::vector<double>& vals, double tol) {
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end(),
                         [tol](double a, double b) { return std::abs(b - a) <= tol; }),
             vals.end());
}

// Ascending k-subsets of pool; fn receives the chosen energy sum.
void subset_sums(const std::vector<int>& pool, const Eigen::VectorXd& eps, int k,
                 int start, double acc, const std::function<void(double)>& fn) {
  if (k == 0) {
    fn(acc);
    return;
  }
  for (int t = start; t <= static_cast<int>(pool.size()) - k; ++t)
    subset_sums(pool, eps, k - 1, t + 1, acc + eps[pool[t]], fn);
}

}  // namespace

double sigma2_element(const integral_set& ints, int p, int q, double omega) {
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  double acc = 0.0;
  for (int i : occ)
    for (int a : vir)
      for (int b : vir) {
        const double vqi_ab = ints.vas(q, i, a, b);
        const double vab_pi = ints.vas(a, b, p, i);
        if (vqi_ab == 0.0 || vab_pi == 0.0) continue;
        const double d1 = ((omega + ints.eps[i]) - ints.eps[a]) - ints.eps[b];
        if (std::abs(d1) < kCollision) throw_collision(omega, d1);
        acc += 0.5 * vqi_ab * (vab_pi / d1);
      }
  for (int i : occ)
    for (int j : occ)
      for (int a : vir) {
        const double vij_pa = ints.vas(i, j, p, a);
        const double vqa_ij = ints.vas(q, a, i, j);
        if (vij_pa == 0.0 || vqa_ij == 0.0) continue;
        const double dV = ((ints.eps[i] + ints.eps[j]) - omega) - ints.eps[a];
        if (std::abs(dV) < kCollision) throw_collision(omega, dV);
        acc -= 0.5 * vij_pa * (vqa_ij / dV);
      }
  return acc;
}

double sigma2_element_derivative(const integral_set& ints, int p, int q, double omega) {
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  double acc = 0.0;
  for (int i : occ)
    for (int a : vir)
      for (int b : vir) {
        const double vqi_ab = ints.vas(q, i, a, b);
        const double vab_pi = ints.vas(a, b, p, i);
        if (vqi_ab == 0.0 || vab_pi == 0.0) continue;
        const double d1 = ((omega + ints.eps[i]) - ints.eps[a]) - ints.eps[b];
        if (std::abs(d1) < kCollision) throw_collision(omega, d1);
        acc -= 0.5 * vqi_ab * (vab_pi / (d1 * d1));
      }
  for (int i : occ)
    for (int j : occ)
      for (int a : vir) {
        const double vij_pa = ints.vas(i, j, p, a);
        const double vqa_ij = ints.vas(q, a, i, j);
        if (vij_pa == 0.0 || vqa_ij == 0.0) continue;
        const double dV = ((ints.eps[i] + ints.eps[j]) - omega) - ints.eps[a];
        if (std::abs(dV) < kCollision) throw_collision(omega, dV);
        acc -= 0.5 * vij_pa * (vqa_ij / (dV * dV));
      }
  return acc;
}

Eigen::MatrixXd sigma2_analytic(const integral_set& ints, double omega) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ints.m, ints.m);
  for (int p = 0; p < ints.m; ++p)
    for (int q = p; q < ints.m; ++q) {
      const double el = sigma2_element(ints, p, q, omega);
      s(p, q) = el;
      s(q, p) = el;
    }
  return s;
}

Eigen::MatrixXd sigma2_derivative(const integral_set& ints, double omega) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ints.m, ints.m);
  for (int p = 0; p < ints.m; ++p)
    for (int q = p; q < ints.m; ++q) {
      const double el = sigma2_element_derivative(ints, p, q, omega);
      s(p, q) = el;
      s(q, p) = el;
    }
  return s;
}

double sigma2_diag(const integral_set& ints, int q, double omega) {
  return sigma2_element(ints, q, q, omega);
}

double sigma2_diag_derivative(const integral_set& ints, int q, double omega) {
  return sigma2_element_derivative(ints, q, q, omega);
}

std::vector<double> sigma2_singularities(const integral_set& ints, int q,
                                         double coupling_floor) {
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  std::vector<double> vals;
  auto coupled_2p1h = [&](int i, int a, int b) {
    if (q >= 0) return std::abs(ints.vas(q, i, a, b)) > coupling_floor;
    for (int p = 0; p < ints.m; ++p)
      if (std::abs(ints.vas(p, i, a, b)) > coupling_floor) return true;
    return false;
  };
  auto coupled_2h1p = [&](int i, int j, int a) {
    if (q >= 0) return std::abs(ints.vas(q, a, i, j)) > coupling_floor;
    for (int p = 0; p < ints.m; ++p)
      if (std::abs(ints.vas(p, a, i, j)) > coupling_floor) return true;
    return false;
  };
  for (int i : occ)
    for (std::size_t ia = 0; ia < vir.size(); ++ia)
      for (std::size_t ib = ia + 1; ib < vir.size(); ++ib) {
        const int a = vir[ia], b = vir[ib];
        if (!coupled_2p1h(i, a, b)) continue;
        vals.push_back(ints.eps[a] + ints.eps[b] - ints.eps[i]);
      }
  for (std::size_t ii = 0; ii < occ.size(); ++ii)
    for (std::size_t ij = ii + 1; ij < occ.size(); ++ij)
      for (int a : vir) {
        const int i = occ[ii], j = occ[ij];
        if (!coupled_2h1p(i, j, a)) continue;
        vals.push_back(ints.eps[i] + ints.eps[j] - ints.eps[a]);
      }
  merge_sorted(vals, 1e-10);
  return vals;
}

std::vector<double> denominator_catalogue(const integral_set& ints, int q, int order,
                                          double coupling_floor) {
  if (order < 2) throw validation_error("denominator catalogue needs order >= 2");
  if (order <= 3) return sigma2_singularities(ints, q, coupling_floor);

  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  std::vector<double> vals;
  const int rank_max = order / 2 + 1;
  for (int r = 2; r <= rank_max; ++r) {
    // r particle lines against r-1 hole lines, then the mirror image.
    subset_sums(vir, ints.eps, r, 0, 0.0, [&](double ep) {
      subset_sums(occ, ints.eps, r - 1, 0, 0.0,
                  [&](double eh) { vals.push_back(ep - eh); });
    });
    subset_sums(occ, ints.eps, r, 0, 0.0, [&](double eh) {
      subset_sums(vir, ints.eps, r - 1, 0, 0.0,
                  [&](double ep) { vals.push_back(eh - ep); });
    });
  }
  merge_sorted(vals, 1e-10);
  return vals;
}

lambda_stencil lambda_stencil::make(int max_order, double h, stencil_fit fit) {
  if (max_order < 2 || max_order > 9)
    throw validation_error("stencil max_order must lie in [2, 9]");
  if (!(h > 0.0)) throw validation_error("stencil spacing must be positive");

  lambda_stencil st;
  st.max_order = max_order;
  st.h = h;
  st.fit = fit;
  const int K = max_order;
  const int n_pts = 2 * K + 1;
  st.points.resize(n_pts);
  for (int j = 0; j < n_pts; ++j) st.points[j] = (j - K) * h;
  const double lambda_max = K * h;

  st.extract = Eigen::MatrixXd::Zero(max_order + 1, n_pts);

  if (fit == stencil_fit::vandermonde_poly) {
    // Chebyshev values at the scaled grid points.
    Eigen::MatrixXd design(n_pts, n_pts);
    for (int j = 0; j < n_pts; ++j) {
      const double x = st.points[j] / lambda_max;
      double tkm1 = 1.0, tk = x;
      design(j, 0) = 1.0;
      if (n_pts > 1) design(j, 1) = x;
      for (int k = 2; k < n_pts; ++k) {
        const double tk1 = 2.0 * x * tk - tkm1;
        design(j, k) = tk1;
        tkm1 = tk;
        tk = tk1;
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    st.fit_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(st.fit_condition <= 1e12))
      throw numerical_error("stencil design matrix is ill-conditioned (condition " +
                            std::to_string(st.fit_condition) +
                            "); reduce max_order or widen h");
    const Eigen::MatrixXd design_inv = svd.solve(Eigen::MatrixXd::Identity(n_pts, n_pts));

    // Chebyshev-to-monomial coefficients: cheb(n, k) multiplies x^n inside T_k.
    Eigen::MatrixXd cheb = Eigen::MatrixXd::Zero(n_pts, n_pts);
    cheb(0, 0) = 1.0;
    if (n_pts > 1) cheb(1, 1) = 1.0;
    for (int k = 2; k < n_pts; ++k) {
      for (int n = 1; n < n_pts; ++n) cheb(n, k) += 2.0 * cheb(n - 1, k - 1);
      for (int n = 0; n < n_pts; ++n) cheb(n, k) -= cheb(n, k - 2);
    }

    const Eigen::MatrixXd coeff = cheb * design_inv;  // monomial coefficients in x
    double scale = 1.0;
    for (int n = 0; n <= max_order; ++n) {
      st.extract.row(n) = coeff.row(n) / scale;
      scale *= lambda_max;
    }
  } else {
    // Minimal central-difference stencils at spacings h and 2h, combined by one
    // Richardson step; the top odd order falls back to the single stencil.
    st.fit_condition = 1.0;
    st.extract(0, K) = 1.0;
    for (int n = 1; n <= max_order; ++n) {
      const int half = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
      auto weights_at = [&](int step) -> Eigen::VectorXd {
        const int w = 2 * half + 1;
        Eigen::MatrixXd a(w, w);
        double tfact = 1.0;
        for (int t = 0; t < w; ++t) {
          if (t > 0) tfact *= t;
          for (int c = 0; c < w; ++c) {
            const double off = (c - half) * step * h;
            a(t, c) = (t == 0 ? 1.0 : std::pow(off, t)) / tfact;
          }
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(w);
        rhs(n) = 1.0;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        st.fit_condition = std::max(st.fit_condition, sv(0) / sv(sv.size() - 1));
        return svd.solve(rhs);
      };
      const Eigen::VectorXd wh = weights_at(1);
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_pts);
      if (2 * half <= K) {
        const Eigen::VectorXd w2 = weights_at(2);
        for (int c = -half; c <= half; ++c) {
          row(K + c) += 4.0 / 3.0 * wh(c + half);
          row(K + 2 * c) -= 1.0 / 3.0 * w2(c + half);
        }
      } else {
        for (int c = -half; c <= half; ++c) row(K + c) += wh(c + half);
      }
      double fact = 1.0;
      for (int t = 2; t <= n; ++t) fact *= t;
      st.extract.row(n) = row / fact;
    }
    if (!(st.fit_condition <= 1e12))
      throw numerical_error("difference-stencil weights are ill-conditioned; reduce max_order");
  }

  st.amplification.resize(max_order + 1);
  for (int n = 0; n <= max_order; ++n)
    st.amplification[n] = st.extract.row(n).cwiseAbs().sum();
  return st;
}

lambda_scan::lambda_scan(integral_set ints, lambda_stencil stencil, int max_sector_dim)
    : ints_(std::move(ints)), stencil_(std::move(stencil)) {
  ints_.validate();
  engines_.resize(stencil_.points.size());
  for (std::size_t j = 0; j < stencil_.points.size(); ++j) {
    const double lambda = stencil_.points[j];
    if (std::abs(lambda) < 1e-15) continue;
    lehmann_data data = build_lehmann(ints_, lambda, max_sector_dim);
    engines_[j] = std::make_unique<exact_self_energy>(ints_, std::move(data));
  }
}

std::vector<Eigen::MatrixXd> lambda_scan::sigma_samples(double omega) const {
  std::vector<Eigen::MatrixXd> out(engines_.size());
  for (std::size_t j = 0; j < engines_.size(); ++j)
    out[j] = engines_[j] ? engines_[j]->sigma(omega)
                         : Eigen::MatrixXd::Zero(ints_.m, ints_.m);
  return out;
}

Eigen::MatrixXd lambda_scan::order_correction(int order, double omega) const {
  if (order < 0 || order > stencil_.max_order)
    throw validation_error("order outside the stencil range");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ints_.m, ints_.m);
  for (std::size_t j = 0; j < engines_.size(); ++j) {
    if (!engines_[j]) continue;
    const double c = stencil_.extract(order, static_cast<int>(j));
    if (c == 0.0) continue;
    acc += c * engines_[j]->sigma(omega);
  }
  return acc;
}

std::vector<std::pair<double, double>> lambda_scan::unusable_zones(double lo, double hi,
                                                                   double margin) const {
  std::vector<double> centers;
  for (const auto& e : engines_) {
    if (!e) continue;
    for (double s : e->singularities_matrix(lo - margin, hi + margin)) centers.push_back(s);
    for (const auto& p : e->data().poles.poles)
      if (p.omega >= lo - margin && p.omega <= hi + margin) centers.push_back(p.omega);
  }
  std::sort(centers.begin(), centers.end());
  std::vector<std::pair<double, double>> zones;
  for (double c : centers) {
    if (!zones.empty() && c - margin <= zones.back().second)
      zones.back().second = std::max(zones.back().second, c + margin);
    else
      zones.emplace_back(c - margin, c + margin);
  }
  return zones;
}

order_corrections extract_order_corrections(const lambda_scan& scan,
                                            const std::vector<double>& omega_grid,
                                            double drop_margin) {
  if (omega_grid.empty()) throw validation_error("empty frequency grid");
  const auto [lo_it, hi_it] = std::minmax_element(omega_grid.begin(), omega_grid.end());
  const auto zones = scan.unusable_zones(*lo_it, *hi_it, drop_margin);
  auto unusable = [&zones](double w) {
    for (const auto& z : zones)
      if (w >= z.first && w <= z.second) return true;
    return false;
  };

  const lambda_stencil& st = scan.stencil();
  order_corrections oc;
  oc.fit_condition = st.fit_condition;
  oc.amplification = st.amplification;
  oc.delta.resize(st.max_order + 1);
  for (double w : omega_grid) {
    if (unusable(w)) {
      oc.dropped.push_back(w);
      continue;
    }
    const auto samples = scan.sigma_samples(w);
    oc.omega.push_back(w);
    for (int n = 0; n <= st.max_order; ++n) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(scan.ints().m, scan.ints().m);
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const double c = st.extract(n, static_cast<int>(j));
        if (c != 0.0) acc += c * samples[j];
      }
      oc.delta[n].push_back(std::move(acc));
    }
  }
  return oc;
}

order_corrections extract_order_corrections(const integral_set& ints,
                                            const std::vector<double>& omega_grid,
                                            const lambda_stencil& stencil,
                                            int max_sector_dim, double drop_margin) {
  lambda_scan scan(ints, stencil, max_sector_dim);
  return extract_order_corrections(scan, omega_grid, drop_margin);
}

Eigen::MatrixXd order_corrections::cumulative(int order, int k) const {
  if (order < 0 || order >= static_cast<int>(delta.size()))
    throw validation_error("order outside the extracted range");
  if (k < 0 || k >= static_cast<int>(omega.size()))
    throw validation_error("grid index out of range");
  Eigen::MatrixXd acc = delta[0][k];
  for (int n = 1; n <= order; ++n) acc += delta[n][k];
  return acc;
}

self_energy_evaluator make_order_evaluator(std::shared_ptr<const lambda_scan> scan,
                                           int order, double lo, double hi,
                                           double sweep_margin) {
  if (!scan) throw validation_error("null lambda scan");
  const lambda_stencil& st = scan->stencil();
  if (order < 2 || order > st.max_order)
    throw validation_error("evaluator order outside the stencil range");
  if (!(lo < hi)) throw validation_error("empty frequency window");

  const integral_set& ints = scan->ints();
  // Weight per engine folding delta-sigma^(3)..delta-sigma^(n) into one pass;
  // the analytic second order stands in for the fitted one.
  std::vector<std::pair<double, const exact_self_energy*>> terms;
  for (int j = 0; j < scan->points(); ++j) {
    const exact_self_energy* e = scan->engine(j);
    if (!e) continue;
    double c = 0.0;
    for (int k = 3; k <= order; ++k) c += st.extract(k, j);
    if (c != 0.0) terms.emplace_back(c, e);
  }

  self_energy_evaluator ev;
  ev.m = ints.m;
  ev.eps = ints.eps;
  ev.fermi = ints.fermi_level();
  ev.provenance = "order-" + std::to_string(order);
  ev.monotone_diagonal = (order == 2);

  ev.eval = [&ints, terms, scan](double w) {
    Eigen::MatrixXd s = sigma2_analytic(ints, w);
    for (const auto& [c, e] : terms) s += c * e->sigma(w);
    return s;
  };
  ev.deriv = [&ints, terms, scan](double w) {
    Eigen::MatrixXd s = sigma2_derivative(ints, w);
    for (const auto& [c, e] : terms) s += c * e->sigma_derivative(w);
    return s;
  };
  ev.diag = [&ints, terms, scan](int q, double w) {
    double s = sigma2_element(ints, q, q, w);
    for (const auto& [c, e] : terms) s += c * e->sigma(w)(q, q);
    return s;
  };
  ev.diag_deriv = [&ints, terms, scan](int q, double w) {
    double s = sigma2_element_derivative(ints, q, q, w);
    for (const auto& [c, e] : terms) s += c * e->sigma_derivative(w)(q, q);
    return s;
  };

  ev.singularities = denominator_catalogue(ints, -1, order);
  ev.orbital_singularities.resize(ints.m);
  for (int q = 0; q < ints.m; ++q)
    ev.orbital_singularities[q] = denominator_catalogue(ints, q, order);

  if (!terms.empty()) {
    std::vector<double> centers;
    for (const auto& [c, e] : terms) {
      (void)c;
      for (double s : e->singularities_matrix(lo - sweep_margin, hi + sweep_margin))
        centers.push_back(s);
    }
    std::sort(centers.begin(), centers.end());
    std::vector<std::pair<double, double>> zones;
    for (double c : centers) {
      if (!zones.empty() && c - sweep_margin <= zones.back().second)
        zones.back().second = std::max(zones.back().second, c + sweep_margin);
      else
        zones.emplace_back(c - sweep_margin, c + sweep_margin);
    }
    ev.orbital_excluded.assign(ints.m, zones);
  }
  return ev;
}

Eigen::MatrixXd g_dyson_n(const integral_set& ints, const self_energy_evaluator& se,
                          double omega) {
  Eigen::MatrixXd a = -se.eval(omega);
  for (int p = 0; p < ints.m; ++p) a(p, p) += omega - ints.eps[p];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw numerical_error("Dyson matrix singular at omega=" + std::to_string(omega) +
                          " (root of the inverse Dyson equation)");
  return lu.inverse();
}

}  // namespace mbgf
