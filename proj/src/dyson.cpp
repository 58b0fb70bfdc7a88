#include "mbgf/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mbgf/errors.hpp"
#include "mbgf/exact_sigma.hpp"

namespace mbgf {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::vector<std::pair<double, double>> merge_zones(std::vector<std::pair<double, double>> z) {
  std::sort(z.begin(), z.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : z) {
    if (!(b > a)) continue;
    if (!out.empty() && a <= out.back().second)
      out.back().second = std::max(out.back().second, b);
    else
      out.push_back({a, b});
  }
  return out;
}

// Removes the zones from [a, b]; accumulates the removed length.
std::vector<std::pair<double, double>> subtract_zones(
    double a, double b, const std::vector<std::pair<double, double>>& zones,
    double* removed) {
  std::vector<std::pair<double, double>> segs;
  double cur = a;
  for (const auto& [zl0, zr0] : zones) {
    if (zr0 <= cur) continue;
    if (zl0 >= b) break;
    double zl = std::max(zl0, cur), zr = std::min(zr0, b);
    if (zl > cur) segs.push_back({cur, zl});
    if (removed) *removed += zr - zl;
    cur = zr;
    if (cur >= b) break;
  }
  if (cur < b) segs.push_back({cur, b});
  return segs;
}

struct candidate {
  double a, b, fa, fb;
  int curve;    // sorted eigenvalue index; 0 in diagonal mode
  int bracket;
};

struct root_hit {
  double x = 0.0;
  double fx = 0.0;
  bool accepted = false;
};

// Bisection to a relative width floor, then one secant step. A crossing is
// accepted when the residual meets tol or when the residual grows when probed
// away from the crossing; a pole crossing shrinks instead and is rejected.
template <typename F>
root_hit bisect_root(F&& f, double a, double b, double fa, double fb, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  const double width_floor = 1e-14 * scale;
  for (int it = 0; it < 120 && (b - a) > width_floor; ++it) {
    double mid = 0.5 * (a + b);
    double fm = f(mid);
    if (!std::isfinite(fm)) {
      bool moved = false;
      for (int k = 1; k <= 4 && !moved; ++k) {
        for (double c : {mid + k * (b - a) / 64.0, mid - k * (b - a) / 64.0}) {
          if (c <= a || c >= b) continue;
          double fc = f(c);
          if (std::isfinite(fc)) {
            mid = c;
            fm = fc;
            moved = true;
            break;
          }
        }
      }
      if (!moved) break;
    }
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  double x = 0.5 * (a + b);
  if (fb != fa) {
    double xs = a - fa * (b - a) / (fb - fa);
    if (xs > a && xs < b) x = xs;
  }
  double fx = f(x);
  if (!std::isfinite(fx)) {
    x = 0.5 * (a + b);
    fx = f(x);
  }
  root_hit h{x, fx, false};
  if (!std::isfinite(fx)) return h;
  double g0 = std::abs(fx);
  if (g0 <= tol) {
    h.accepted = true;
    return h;
  }
  double off = 8.0 * std::max(b - a, width_floor);
  double f1 = f(x + off), f2 = f(x - off);
  double g1 = (std::isfinite(f1) ? std::abs(f1) : 0.0) +
              (std::isfinite(f2) ? std::abs(f2) : 0.0);
  h.accepted = g1 > 2.0 * g0;
  return h;
}

// Sign scan over one segment; suspicious jumps get a finer second look.
template <typename CurveF>
void scan_candidates(CurveF&& curves, double a, double b, int points, int refine_factor,
                     int ncurves, int bracket, std::vector<candidate>& out,
                     scan_report* rep) {
  points = std::max(points, 9);
  std::vector<double> xs(points);
  std::vector<Eigen::VectorXd> fs(points);
  std::vector<char> ok(points, 0);
  for (int i = 0; i < points; ++i) {
    xs[i] = a + (b - a) * i / (points - 1);
    Eigen::VectorXd fv;
    if (curves(xs[i], fv) && fv.allFinite()) {
      fs[i] = fv;
      ok[i] = 1;
    } else if (rep) {
      ++rep->skipped_points;
    }
  }
  std::vector<double> deltas;
  deltas.reserve(static_cast<std::size_t>(points) * ncurves);
  for (int i = 0; i + 1 < points; ++i) {
    if (!ok[i] || !ok[i + 1]) continue;
    for (int k = 0; k < ncurves; ++k) deltas.push_back(std::abs(fs[i + 1][k] - fs[i][k]));
  }
  double median = 0.0;
  if (!deltas.empty()) {
    auto mid = deltas.begin() + deltas.size() / 2;
    std::nth_element(deltas.begin(), mid, deltas.end());
    median = *mid;
  }
  const double jump = 50.0 * std::max(median, 1e-300);
  for (int i = 0; i + 1 < points; ++i) {
    if (!ok[i] || !ok[i + 1]) continue;
    bool jumpy = false;
    for (int k = 0; k < ncurves && !jumpy; ++k)
      jumpy = std::abs(fs[i + 1][k] - fs[i][k]) > jump;
    if (jumpy && refine_factor > 1) {
      if (rep) ++rep->jump_refinements;
      int sub = refine_factor * 4;
      std::vector<double> rx(sub + 1);
      std::vector<Eigen::VectorXd> rf(sub + 1);
      std::vector<char> rok(sub + 1, 0);
      for (int j = 0; j <= sub; ++j) {
        rx[j] = xs[i] + (xs[i + 1] - xs[i]) * j / sub;
        Eigen::VectorXd fv;
        if (curves(rx[j], fv) && fv.allFinite()) {
          rf[j] = fv;
          rok[j] = 1;
        }
      }
      for (int j = 0; j < sub; ++j) {
        if (!rok[j] || !rok[j + 1]) continue;
        for (int k = 0; k < ncurves; ++k)
          if ((rf[j][k] > 0.0) != (rf[j + 1][k] > 0.0))
            out.push_back({rx[j], rx[j + 1], rf[j][k], rf[j + 1][k], k, bracket});
      }
    } else {
      for (int k = 0; k < ncurves; ++k)
        if ((fs[i][k] > 0.0) != (fs[i + 1][k] > 0.0))
          out.push_back({xs[i], xs[i + 1], fs[i][k], fs[i + 1][k], k, bracket});
    }
  }
}

// Endpoint evaluation with a small inward retreat when the edge itself fails.
template <typename F>
bool edge_value(F&& f, double* x, double toward, double* val) {
  double step = (toward - *x) / 512.0;
  for (int k = 0; k < 6; ++k) {
    double v = f(*x);
    if (std::isfinite(v)) {
      *val = v;
      return true;
    }
    *x += step;
  }
  return false;
}

double nearest_gap(const std::vector<double>& sing, double omega) {
  double gap = std::numeric_limits<double>::infinity();
  for (double s : sing) gap = std::min(gap, std::abs(omega - s));
  return gap;
}

void mark_principal_diagonal(std::vector<dyson_root>& roots,
                             const std::vector<std::pair<double, double>>& brackets,
                             double eps_q) {
  int home = -1;
  for (int i = 0; i < static_cast<int>(brackets.size()); ++i)
    if (brackets[i].first <= eps_q && eps_q <= brackets[i].second) home = i;
  if (home < 0) return;
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    if (roots[i].bracket != home) continue;
    double d = std::abs(roots[i].omega - eps_q);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  if (best >= 0) roots[best].principal = true;
}

}  // namespace

std::vector<std::pair<double, double>> find_brackets(const std::vector<double>& singularities,
                                                     double lo, double hi, double dedup_tol) {
  if (!(hi > lo)) throw validation_error("bracket window is empty");
  std::vector<double> inside;
  for (double s : singularities)
    if (s > lo && s < hi) inside.push_back(s);
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end(),
                           [&](double a, double b) { return std::abs(b - a) <= dedup_tol; }),
               inside.end());
  std::vector<std::pair<double, double>> out;
  double prev = lo;
  for (double s : inside) {
    out.push_back({prev, s});
    prev = s;
  }
  out.push_back({prev, hi});
  return out;
}

double residue_at(const self_energy_evaluator& se, double omega, const Eigen::VectorXd& v,
                  int q, double* error_bar) {
  auto scalar = [&](double w) -> double {
    if (q >= 0 && se.diag) return se.diag(q, w);
    return v.dot(se.eval(w) * v);
  };
  auto fd_slope = [&](double hh, bool* okp) -> double {
    try {
      double above = scalar(omega + hh), below = scalar(omega - hh);
      bool ok = std::isfinite(above) && std::isfinite(below);
      if (okp) *okp = ok;
      return ok ? (above - below) / (2.0 * hh) : 0.0;
    } catch (const mbgf_error&) {
      if (okp) *okp = false;
      return 0.0;
    }
  };
  double h = std::min(1e-6, nearest_gap(se.singularities_for(q), omega) / 16.0);
  if (!std::isfinite(h)) h = 1e-6;
  h = std::max(h, 1e-9);

  bool have_analytic = false;
  double slope = 0.0;
  try {
    if (q >= 0 && se.diag_deriv) {
      slope = se.diag_deriv(q, omega);
      have_analytic = std::isfinite(slope);
    } else if (se.deriv) {
      slope = v.dot(se.deriv(omega) * v);
      have_analytic = std::isfinite(slope);
    }
  } catch (const mbgf_error&) {
    have_analytic = false;
  }

  double bar = nan_v;
  double residue;
  if (have_analytic) {
    residue = 1.0 / (1.0 - slope);
    for (double hh = h; hh <= h * 1e3; hh *= 10.0) {
      bool ok = false;
      double s_fd = fd_slope(hh, &ok);
      if (ok) {
        bar = std::abs(residue - 1.0 / (1.0 - s_fd));
        break;
      }
    }
  } else {
    bool ok1 = false, ok2 = false;
    double s1 = 0.0, s2 = 0.0;
    double hh = h;
    for (int attempt = 0; attempt < 4 && !(ok1 && ok2); ++attempt, hh *= 10.0) {
      s1 = fd_slope(hh, &ok1);
      s2 = fd_slope(0.5 * hh, &ok2);
    }
    if (!(ok1 && ok2)) throw numerical_error("self-energy derivative not evaluable near root");
    residue = 1.0 / (1.0 - s1);
    bar = std::abs(residue - 1.0 / (1.0 - s2));
  }
  if (error_bar) *error_bar = bar;
  return residue;
}

std::vector<dyson_root> solve_diagonal(const self_energy_evaluator& se, int q,
                                       const scan_options& opt, scan_report* report) {
  if (!(opt.hi > opt.lo)) throw validation_error("scan window is empty");
  if (q < 0 || q >= se.m) throw validation_error("orbital index out of range");
  auto f = [&](double w) -> double {
    try {
      return w - se.eps[q] - se.eval_diag(q, w);
    } catch (const mbgf_error&) {
      return nan_v;
    }
  };
  auto brackets = find_brackets(se.singularities_for(q), opt.lo, opt.hi);
  auto zones = merge_zones(se.excluded_for(q));
  double removed = 0.0;
  std::vector<candidate> cands;
  for (int bi = 0; bi < static_cast<int>(brackets.size()); ++bi) {
    auto [wa, wb] = brackets[bi];
    double margin = std::max(1e-9, (wb - wa) * opt.edge_margin_rel);
    double a = wa + margin, b = wb - margin;
    if (!(b > a)) continue;
    for (auto [sa, sb] : subtract_zones(a, b, zones, &removed)) {
      if (!(sb > sa)) continue;
      if (se.monotone_diagonal) {
        double xa = sa, xb = sb, fa, fb;
        if (edge_value(f, &xa, sb, &fa) && edge_value(f, &xb, sa, &fb) &&
            (fa > 0.0) != (fb > 0.0))
          cands.push_back({xa, xb, fa, fb, 0, bi});
      } else {
        int pts = std::max(9, static_cast<int>(std::lround(
                                  opt.points * (sb - sa) / (wb - wa))));
        auto curve1 = [&](double w, Eigen::VectorXd& fv) {
          fv.resize(1);
          fv[0] = f(w);
          return true;
        };
        scan_candidates(curve1, sa, sb, pts, opt.refine_factor, 1, bi, cands, report);
      }
    }
  }
  if (report) report->excluded_fraction += removed / (opt.hi - opt.lo);

  std::vector<dyson_root> roots;
  for (const auto& c : cands) {
    root_hit hit = bisect_root(f, c.a, c.b, c.fa, c.fb, opt.tol);
    if (!hit.accepted) {
      if (report) ++report->rejected_crossings;
      continue;
    }
    if (!roots.empty() && roots.back().bracket == c.bracket &&
        std::abs(roots.back().omega - hit.x) < 1e-11)
      continue;
    dyson_root r;
    r.omega = hit.x;
    r.orbital = q;
    r.bracket = c.bracket;
    r.vector = Eigen::VectorXd::Zero(se.m);
    r.vector[q] = 1.0;
    r.hole = hit.x < se.fermi;
    r.residue = residue_at(se, hit.x, r.vector, q, &r.residue_error);
    roots.push_back(std::move(r));
  }
  std::stable_sort(roots.begin(), roots.end(),
                   [](const dyson_root& x, const dyson_root& y) { return x.omega < y.omega; });
  mark_principal_diagonal(roots, brackets, se.eps[q]);
  if (opt.min_residue > 0.0) {
    roots.erase(std::remove_if(roots.begin(), roots.end(),
                               [&](const dyson_root& r) { return r.residue < opt.min_residue; }),
                roots.end());
  }
  return roots;
}

std::vector<dyson_root> solve_diagonal_all(const self_energy_evaluator& se,
                                           const scan_options& opt, scan_report* report) {
  std::vector<dyson_root> all;
  scan_report agg;
  for (int q = 0; q < se.m; ++q) {
    scan_report local;
    auto part = solve_diagonal(se, q, opt, &local);
    all.insert(all.end(), part.begin(), part.end());
    agg.jump_refinements += local.jump_refinements;
    agg.rejected_crossings += local.rejected_crossings;
    agg.skipped_points += local.skipped_points;
    agg.excluded_fraction += local.excluded_fraction;
  }
  if (se.m > 0) agg.excluded_fraction /= se.m;
  if (report) *report = agg;
  return all;
}

std::vector<dyson_root> solve_matrix(const self_energy_evaluator& se, const scan_options& opt,
                                     scan_report* report) {
  if (!(opt.hi > opt.lo)) throw validation_error("scan window is empty");
  const int m = se.m;
  auto curves_at = [&](double w, Eigen::VectorXd& fv, Eigen::MatrixXd* vecs) -> bool {
    try {
      if (se.curves) {
        Eigen::MatrixXd vv;
        se.curves(w, fv, vv);
        if (vecs) *vecs = vv;
      } else {
        Eigen::MatrixXd a = se.eval(w);
        a.diagonal() += se.eps;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success) return false;
        fv = es.eigenvalues();
        fv.array() -= w;
        if (vecs) *vecs = es.eigenvectors();
      }
      return fv.allFinite();
    } catch (const mbgf_error&) {
      return false;
    }
  };

  auto brackets = find_brackets(se.singularities, opt.lo, opt.hi);
  std::vector<std::pair<double, double>> zone_union;
  for (int q = 0; q < m; ++q) {
    const auto& z = se.excluded_for(q);
    zone_union.insert(zone_union.end(), z.begin(), z.end());
  }
  zone_union = merge_zones(std::move(zone_union));

  double removed = 0.0;
  std::vector<candidate> cands;
  for (int bi = 0; bi < static_cast<int>(brackets.size()); ++bi) {
    auto [wa, wb] = brackets[bi];
    double margin = std::max(1e-9, (wb - wa) * opt.edge_margin_rel);
    double a = wa + margin, b = wb - margin;
    if (!(b > a)) continue;
    for (auto [sa, sb] : subtract_zones(a, b, zone_union, &removed)) {
      if (!(sb > sa)) continue;
      if (se.monotone_diagonal) {
        Eigen::VectorXd fa, fb;
        bool oka = false, okb = false;
        double xa = sa, xb = sb;
        for (int k = 0; k < 6 && !oka; ++k) {
          oka = curves_at(xa, fa, nullptr);
          if (!oka) xa += (sb - sa) / 512.0;
        }
        for (int k = 0; k < 6 && !okb; ++k) {
          okb = curves_at(xb, fb, nullptr);
          if (!okb) xb -= (sb - sa) / 512.0;
        }
        if (oka && okb)
          for (int k = 0; k < m; ++k)
            if ((fa[k] > 0.0) != (fb[k] > 0.0))
              cands.push_back({xa, xb, fa[k], fb[k], k, bi});
      } else {
        int pts = std::max(9, static_cast<int>(std::lround(
                                  opt.points * (sb - sa) / (wb - wa))));
        auto curvef = [&](double w, Eigen::VectorXd& fv) { return curves_at(w, fv, nullptr); };
        scan_candidates(curvef, sa, sb, pts, opt.refine_factor, m, bi, cands, report);
      }
    }
  }
  if (report) report->excluded_fraction += removed / (opt.hi - opt.lo);

  std::vector<dyson_root> roots;
  for (const auto& c : cands) {
    auto fk = [&](double w) -> double {
      Eigen::VectorXd fv;
      if (!curves_at(w, fv, nullptr)) return nan_v;
      return fv[c.curve];
    };
    root_hit hit = bisect_root(fk, c.a, c.b, c.fa, c.fb, opt.tol);
    if (!hit.accepted) {
      if (report) ++report->rejected_crossings;
      continue;
    }
    bool dup = false;
    for (const auto& r : roots)
      dup = dup || (r.orbital == c.curve && std::abs(r.omega - hit.x) < 1e-11);
    if (dup) continue;

    Eigen::VectorXd fv;
    Eigen::MatrixXd vecs;
    if (!curves_at(hit.x, fv, &vecs)) continue;
    dyson_root r;
    r.omega = hit.x;
    r.orbital = c.curve;  // sorted curve index in matrix mode
    r.bracket = c.bracket;
    r.vector = vecs.col(c.curve);
    r.hole = hit.x < se.fermi;
    r.residue = residue_at(se, hit.x, r.vector, -1, &r.residue_error);

    // curve identity across the originating grid cell; degenerate groups are
    // compared through the projector onto their span
    Eigen::VectorXd fa_v;
    Eigen::MatrixXd va;
    if (curves_at(c.a, fa_v, &va)) {
      Eigen::VectorXd ref = va.col(c.curve);
      double overlap = 0.0;
      for (int j = 0; j < m; ++j)
        if (std::abs(fv[j] - fv[c.curve]) < 1e-9) {
          double p = vecs.col(j).dot(ref);
          overlap += p * p;
        }
      r.tracking_ok = std::sqrt(overlap) >= 0.5;
    }
    roots.push_back(std::move(r));
  }

  std::stable_sort(roots.begin(), roots.end(),
                   [](const dyson_root& x, const dyson_root& y) { return x.omega < y.omega; });

  // principal roots: per dominant orbital, the root nearest that orbital energy
  // inside the bracket holding it
  for (int p = 0; p < m; ++p) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
      int dom = 0;
      roots[i].vector.cwiseAbs().maxCoeff(&dom);
      if (dom != p) continue;
      const auto& br = brackets[roots[i].bracket];
      if (!(br.first <= se.eps[p] && se.eps[p] <= br.second)) continue;
      double d = std::abs(roots[i].omega - se.eps[p]);
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    if (best >= 0) roots[best].principal = true;
  }

  if (opt.min_residue > 0.0) {
    roots.erase(std::remove_if(roots.begin(), roots.end(),
                               [&](const dyson_root& r) { return r.residue < opt.min_residue; }),
                roots.end());
  }
  return roots;
}

void retag_from_poles(std::vector<dyson_root>& roots, const pole_set& ps, double tol) {
  for (auto& r : roots) {
    double best = tol;
    for (const auto& p : ps.poles) {
      double d = std::abs(r.omega - p.omega);
      if (d <= best) {
        best = d;
        r.hole = p.hole;
      }
    }
  }
}

sum_rule_report check_sum_rules_matrix(const std::vector<dyson_root>& roots, int n_e) {
  sum_rule_report rep;
  for (const auto& r : roots)
    if (r.hole) rep.ip_residue_sum += r.residue;
  rep.ip_deviation = std::abs(rep.ip_residue_sum - n_e);
  return rep;
}

sum_rule_report check_sum_rules_diagonal(const std::vector<dyson_root>& roots, int m) {
  sum_rule_report rep;
  rep.orbital_sums.assign(m, 0.0);
  for (const auto& r : roots) {
    if (r.orbital >= 0 && r.orbital < m) rep.orbital_sums[r.orbital] += r.residue;
    if (r.hole) rep.ip_residue_sum += r.residue;
  }
  for (double s : rep.orbital_sums)
    rep.max_orbital_deviation = std::max(rep.max_orbital_deviation, std::abs(s - 1.0));
  return rep;
}

double galitskii_migdal(const std::vector<dyson_root>& roots, const integral_set& ints) {
  double e = ints.e_nuc;
  for (const auto& r : roots) {
    if (!r.hole) continue;
    double hvv = r.vector.dot(ints.hcore * r.vector);
    e += 0.5 * r.residue * (hvv + r.omega);
  }
  return e;
}

namespace {

double green_qq(const pole_set& ps, int q, double w) {
  double acc = 0.0;
  for (const auto& p : ps.poles) acc += p.weight(q, q) / (w - p.omega);
  return acc;
}

double green_qq_deriv(const pole_set& ps, int q, double w) {
  double acc = 0.0;
  for (const auto& p : ps.poles) {
    double d = w - p.omega;
    acc -= p.weight(q, q) / (d * d);
  }
  return acc;
}

}  // namespace

self_energy_evaluator make_exact_evaluator(const exact_self_energy& se, double lo, double hi) {
  self_energy_evaluator ev;
  const exact_self_energy* ex = &se;  // caller keeps the exact engine alive
  ev.m = se.m();
  ev.eps = se.ints().eps;
  ev.fermi = se.ints().fermi_level();
  ev.provenance = "exact";
  ev.monotone_diagonal = true;
  ev.eval = [ex](double w) { return ex->sigma(w); };
  ev.deriv = [ex](double w) { return ex->sigma_derivative_averaged(w); };

  // Scalar path through G_qq alone: sigma_q = w - eps_q - 1/G_qq, whose Dyson
  // roots are exactly the poles of G_qq and whose residues are their weights.
  // -1/G_qq is finite through every pole, so no guard is needed.
  ev.diag = [ex](int q, double w) {
    const pole_set& ps = ex->data().poles;
    return w - ex->ints().eps[q] - 1.0 / green_qq(ps, q, w);
  };
  ev.diag_deriv = [ex](int q, double w) {
    const pole_set& ps = ex->data().poles;
    auto slope = [&](double x) {
      double g = green_qq(ps, q, x);
      return 1.0 + green_qq_deriv(ps, q, x) / (g * g);
    };
    for (double off = 1e-9; off <= 1e-5; off *= 10.0) {
      double s = 0.5 * (slope(w + off) + slope(w - off));
      if (std::isfinite(s)) return s;
    }
    throw numerical_error("diagonal self-energy derivative not evaluable");
  };

  // Matrix curves through the eigenvalues g of G: f = -1/g equals
  // eigenvalue(eps + sigma) - w and stays finite across the poles of G.
  ev.curves = [ex](double w, Eigen::VectorXd& f, Eigen::MatrixXd& vecs) {
    const pole_set& ps = ex->data().poles;
    const int m = ps.m;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (const auto& p : ps.poles) g += p.weight / (w - p.omega);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    Eigen::VectorXd ge = es.eigenvalues();
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd fv(m);
    for (int j = 0; j < m; ++j) fv[j] = -1.0 / ge[j];
    std::sort(order.begin(), order.end(), [&](int x, int y) { return fv[x] < fv[y]; });
    f.resize(m);
    vecs.resize(m, m);
    for (int j = 0; j < m; ++j) {
      f[j] = fv[order[j]];
      vecs.col(j) = es.eigenvectors().col(order[j]);
    }
  };

  ev.singularities = se.singularities_matrix(lo, hi);
  ev.orbital_singularities.resize(ev.m);
  for (int q = 0; q < ev.m; ++q)
    ev.orbital_singularities[q] = se.singularities_diagonal(q, lo, hi);
  return ev;
}

}  // namespace mbgf
