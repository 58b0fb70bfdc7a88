// Acceptance gate: one clause line per check, one verdict line per criterion.
// Run with --criterion N for a single criterion, or no arguments for all ten.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mbgf/determinants.hpp"
#include "mbgf/dyson.hpp"
#include "mbgf/errors.hpp"
#include "mbgf/exact_sigma.hpp"
#include "mbgf/fcidump.hpp"
#include "mbgf/lehmann.hpp"
#include "mbgf/models.hpp"
#include "mbgf/perturbation.hpp"
#include "mbgf/resummation.hpp"
#include "mbgf/taylor_model.hpp"

using namespace mbgf;

namespace {

bool clause(bool ok, const std::string& label, const std::string& detail) {
  std::printf("  [%s] %s: %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
  return ok;
}

void skip(const std::string& label, const std::string& detail) {
  std::printf("  [SKIP] %s: %s\n", label.c_str(), detail.c_str());
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

integral_set dimer(double u) {
  model_spec spec;
  spec.kind = model_kind::hubbard_dimer;
  spec.t = 1.0;
  spec.u = u;
  spec.sites = 2;
  return generate_model(spec);
}

integral_set chain4(double u) {
  model_spec spec;
  spec.kind = model_kind::hubbard_chain;
  spec.t = 1.0;
  spec.u = u;
  spec.sites = 4;
  return generate_model(spec);
}

std::pair<double, double> pole_span(const pole_set& ps) {
  return {ps.poles.front().omega, ps.poles.back().omega};
}

// ---------------------------------------------------------------- criterion 1

bool criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  integral_set ints = dimer(2.0);
  lehmann_data ld = build_lehmann(ints, 1.0);
  const double e_exact = 1.0 - std::sqrt(5.0);
  bool ok = clause(std::abs(ld.e0_total - e_exact) <= 1e-10, "c1.energy",
                   "|E0 - (1 - sqrt 5)| = " + num(std::abs(ld.e0_total - e_exact)));

  exact_self_energy se(ints, ld);
  auto [plo, phi] = pole_span(ld.poles);
  self_energy_evaluator ev = make_exact_evaluator(se, plo - 1.0, phi + 1.0);
  scan_options opt;
  opt.lo = plo - 1.0;
  opt.hi = phi + 1.0;
  std::vector<dyson_root> roots = solve_matrix(ev, opt);

  double worst = 0.0;
  for (const auto& p : ld.poles.poles) {
    double best = 1e300;
    for (const auto& r : roots) best = std::min(best, std::abs(r.omega - p.omega));
    worst = std::max(worst, best);
  }
  ok &= clause(worst <= 1e-8, "c1.poles",
               "max |matrix root - FCI pole| = " + num(worst) + " over " +
                   std::to_string(ld.poles.poles.size()) + " poles, " +
                   std::to_string(roots.size()) + " roots");
  double dt = now_seconds(t0);
  ok &= clause(dt < 5.0, "c1.runtime", num(dt) + " s");
  return ok;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  integral_set ints = dimer(2.0);
  lehmann_data ld = build_lehmann(ints, 1.0);
  exact_self_energy se(ints, ld);
  auto [plo, phi] = pole_span(ld.poles);
  self_energy_evaluator ev = make_exact_evaluator(se, plo - 1.0, phi + 1.0);
  scan_options opt;
  opt.lo = plo - 1.0;
  opt.hi = phi + 1.0;

  std::vector<dyson_root> mroots = solve_matrix(ev, opt);
  sum_rule_report mrep = check_sum_rules_matrix(mroots, ints.n_e);
  bool ok = clause(mrep.ip_deviation <= 1e-7, "c2.ip_sum",
                   "sum_IP F = " + num(mrep.ip_residue_sum) + ", |dev| = " +
                       num(mrep.ip_deviation));

  std::vector<dyson_root> droots = solve_diagonal_all(ev, opt);
  sum_rule_report drep = check_sum_rules_diagonal(droots, ints.m);
  ok &= clause(drep.max_orbital_deviation <= 1e-7, "c2.orbital_sums",
               "max |sum_q F - 1| = " + num(drep.max_orbital_deviation));
  double dt = now_seconds(t0);
  ok &= clause(dt < 5.0, "c2.runtime", num(dt) + " s");
  return ok;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_3() {
  bool ok = true;
  for (double u : {1.0, 2.0, 4.0}) {
    integral_set ints = dimer(u);
    lehmann_data ld = build_lehmann(ints, 1.0);
    exact_self_energy se(ints, ld);
    auto [plo, phi] = pole_span(ld.poles);
    self_energy_evaluator ev = make_exact_evaluator(se, plo - 1.0, phi + 1.0);
    scan_options opt;
    opt.lo = plo - 1.0;
    opt.hi = phi + 1.0;
    std::vector<dyson_root> roots = solve_matrix(ev, opt);
    retag_from_poles(roots, ld.poles);
    double gm = galitskii_migdal(roots, ints);
    ok &= clause(std::abs(gm - ld.e0_total) <= 1e-6, "c3.gm[U=" + num(u) + "]",
                 "E_GM = " + num(gm) + ", FCI = " + num(ld.e0_total) + ", |dev| = " +
                     num(std::abs(gm - ld.e0_total)));
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_4() {
  integral_set ints = dimer(2.0);
  std::vector<double> sing = sigma2_singularities(ints, -1);
  double lo = sing.front() - 2.0, hi = sing.back() + 2.0;

  lambda_stencil st = lambda_stencil::make(4);
  lambda_scan scan(ints, st);
  auto zones = scan.unusable_zones(lo, hi, 0.02);

  std::vector<double> grid;
  const int fine = 2000;
  for (int i = 0; i <= fine && grid.size() < 400; ++i) {
    double w = lo + (hi - lo) * i / fine;
    bool far = true;
    for (double s : sing) far &= std::abs(w - s) >= 0.05;
    for (auto& z : zones) far &= (w < z.first || w > z.second);
    if (far) grid.push_back(w);
  }
  std::vector<double> grid50;
  for (int k = 0; k < 50; ++k) grid50.push_back(grid[k * grid.size() / 50]);

  order_corrections oc = extract_order_corrections(scan, grid50);
  bool ok = clause(oc.omega.size() == 50, "c4.grid",
                   std::to_string(oc.omega.size()) + " of 50 grid points usable");

  double worst = 0.0;
  for (std::size_t k = 0; k < oc.omega.size(); ++k) {
    Eigen::MatrixXd ref = sigma2_analytic(ints, oc.omega[k]);
    worst = std::max(worst, (oc.delta[2][k] - ref).cwiseAbs().maxCoeff());
  }
  ok &= clause(worst <= 1e-6, "c4.order2",
               "max |fitted - analytic| = " + num(worst) + " over " +
                   std::to_string(oc.omega.size()) + " points");
  return ok;
}

// ---------------------------------------------------------------- criterion 5

// Second differences by divided differences, so skipped sample points are
// harmless. Signs below the noise floor are ignored.
bool bracket_curvature_constant(const self_energy_evaluator& ev, int q, double a,
                                double b) {
  const auto& zones = ev.excluded_for(q);
  std::vector<std::pair<double, double>> segments;
  double cur = a;
  for (const auto& z : zones) {
    if (z.second <= a || z.first >= b) continue;
    if (z.first > cur) segments.push_back({cur, std::min(z.first, b)});
    cur = std::max(cur, z.second);
  }
  if (cur < b) segments.push_back({cur, b});

  std::vector<double> curv;
  for (auto& seg : segments) {
    double w0 = seg.first + (seg.second - seg.first) * 0.04;
    double w1 = seg.second - (seg.second - seg.first) * 0.04;
    if (w1 <= w0) continue;
    std::vector<std::pair<double, double>> samples;
    const int n = 21;
    for (int i = 0; i < n; ++i) {
      double w = w0 + (w1 - w0) * i / (n - 1);
      try {
        samples.push_back({w, ev.eval_diag(q, w)});
      } catch (const mbgf_error&) {
      }
    }
    for (std::size_t i = 2; i < samples.size(); ++i) {
      auto [xa, fa] = samples[i - 2];
      auto [xb, fb] = samples[i - 1];
      auto [xc, fc] = samples[i];
      curv.push_back(2.0 * ((fc - fb) / (xc - xb) - (fb - fa) / (xb - xa)) / (xc - xa));
    }
  }
  if (curv.empty()) return true;
  double maxabs = 0.0;
  for (double c : curv) maxabs = std::max(maxabs, std::abs(c));
  double floor = std::max(1e-8, 1e-6 * maxabs);
  int pos = 0, neg = 0;
  for (double c : curv) {
    if (c > floor) ++pos;
    if (c < -floor) ++neg;
  }
  return pos == 0 || neg == 0;
}

bool criterion_5() {
  integral_set ints = chain4(2.0);
  lambda_stencil st = lambda_stencil::make(4);
  auto scan = std::make_shared<const lambda_scan>(ints, st);
  std::vector<double> cat = denominator_catalogue(ints, -1, 3);
  double lo = std::min(cat.front(), ints.eps.minCoeff()) - 4.0;
  double hi = std::max(cat.back(), ints.eps.maxCoeff()) + 4.0;

  self_energy_evaluator ev2 = make_order_evaluator(scan, 2, lo, hi);
  self_energy_evaluator ev3 = make_order_evaluator(scan, 3, lo, hi);
  scan_options opt;
  opt.lo = lo;
  opt.hi = hi;
  opt.points = 1201;

  bool curvature_ok = true;
  bool sigma2_one_per_bracket = true;
  int empty_noncentral = 0;
  int noncentral_total = 0;

  for (int q = 0; q < ints.m; ++q) {
    auto brackets = find_brackets(ev3.singularities_for(q), lo, hi);
    int central = -1;
    for (std::size_t b = 0; b < brackets.size(); ++b)
      if (ints.eps[q] > brackets[b].first && ints.eps[q] < brackets[b].second)
        central = static_cast<int>(b);

    std::vector<int> n2(brackets.size(), 0), n3(brackets.size(), 0);
    for (const auto& r : solve_diagonal(ev2, q, opt))
      if (r.bracket >= 0) ++n2[r.bracket];
    for (const auto& r : solve_diagonal(ev3, q, opt))
      if (r.bracket >= 0) ++n3[r.bracket];

    for (std::size_t b = 0; b < brackets.size(); ++b) {
      if (n2[b] != 1) sigma2_one_per_bracket = false;
      if (static_cast<int>(b) == central) continue;
      ++noncentral_total;
      if (n3[b] == 0) ++empty_noncentral;
      if (!bracket_curvature_constant(ev3, q, brackets[b].first, brackets[b].second))
        curvature_ok = false;
    }
  }

  bool ok = clause(curvature_ok, "c5.curvature",
                   "constant-sign second differences in all " +
                       std::to_string(noncentral_total) + " non-central brackets");
  ok &= clause(sigma2_one_per_bracket, "c5.order2_roots",
               "order-2 diagonal finds exactly 1 root per bracket");
  ok &= clause(empty_noncentral >= 1, "c5.order3_empty",
               std::to_string(empty_noncentral) + " non-central brackets with 0 order-3 roots");
  return ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_6() {
  integral_set ints = dimer(2.0);
  lehmann_data ld = build_lehmann(ints, 1.0);

  const int homo = 0;
  double exact_ip = 0.0, best_w = -1.0;
  for (int k : ld.poles.orbital_poles(homo)) {
    const auto& p = ld.poles.poles[k];
    if (p.hole && p.weight(homo, homo) > best_w) {
      best_w = p.weight(homo, homo);
      exact_ip = p.omega;
    }
  }

  lambda_stencil st = lambda_stencil::make(4);
  auto scan = std::make_shared<const lambda_scan>(ints, st);
  std::vector<double> cat = denominator_catalogue(ints, -1, 4);
  double lo = std::min(cat.front(), ints.eps.minCoeff()) - 3.0;
  double hi = std::max(cat.back(), ints.eps.maxCoeff()) + 3.0;
  scan_options opt;
  opt.lo = lo;
  opt.hi = hi;

  double err[5] = {0, 0, 0, 0, 0};
  bool found = true;
  for (int n = 2; n <= 4; ++n) {
    self_energy_evaluator ev = make_order_evaluator(scan, n, lo, hi);
    double best_f = -1.0, w = 0.0;
    for (const auto& r : solve_diagonal(ev, homo, opt))
      if (r.principal && r.residue > best_f) {
        best_f = r.residue;
        w = r.omega;
      }
    if (best_f < 0.0) found = false;
    err[n] = std::abs(w - exact_ip);
  }
  std::string detail = "errors n=2,3,4: " + num(err[2]) + ", " + num(err[3]) + ", " +
                       num(err[4]) + " against IP " + num(exact_ip);
  if (!found) return clause(false, "c6.principal", "principal root missing; " + detail);
  bool monotone = err[2] > err[3] && err[3] > err[4];
  if (monotone) return clause(true, "c6.monotone", detail);
  return clause(err[4] < err[2], "c6.fallback", "monotonicity broken; " + detail);
}

// ---------------------------------------------------------------- criterion 7

bool criterion_7() {
  integral_set ints = chain4(2.0);
  std::vector<double> sing = sigma2_singularities(ints, -1);
  double lo = std::min(sing.front(), ints.eps.minCoeff()) - 3.0;
  double hi = std::max(sing.back(), ints.eps.maxCoeff()) + 3.0;

  self_energy_evaluator ev0 = make_tda_evaluator(ints, 0, lo, hi);
  double worst = -1.0;
  bool bitwise = true;
  for (int i = 0; i < 16; ++i) {
    double w = lo + (hi - lo) * (i + 0.5) / 16.0;
    bool far = true;
    for (double s : sing) far &= std::abs(w - s) >= 0.2;
    if (!far) continue;
    Eigen::MatrixXd d = ev0.eval(w) - sigma2_analytic(ints, w);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
    if (worst != 0.0) bitwise = false;
  }
  bool ok = clause(bitwise, "c7.leading_order",
                   "cycle-0 TDA matrix vs analytic order 2, max |diff| = " + num(worst));

  scan_options opt;
  opt.lo = lo;
  opt.hi = hi;
  opt.points = 1201;
  std::vector<int> counts20, counts21;
  long long total20 = 0, total21 = 0;
  for (int parity = 0; parity < 2; ++parity) {
    self_energy_evaluator ev = make_tda_evaluator(ints, 20 + parity, lo, hi);
    for (int q = 0; q < ints.m; ++q) {
      auto brackets = find_brackets(ev.singularities_for(q), lo, hi);
      std::vector<int> n(brackets.size(), 0);
      for (const auto& r : solve_diagonal(ev, q, opt))
        if (!r.principal && r.bracket >= 0) ++n[r.bracket];
      for (int c : n) {
        (parity == 0 ? counts20 : counts21).push_back(c);
        (parity == 0 ? total20 : total21) += c;
      }
    }
  }
  ok &= clause(counts20 != counts21, "c7.parity",
               "satellite roots at 20 cycles: " + std::to_string(total20) +
                   ", at 21 cycles: " + std::to_string(total21));
  return ok;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_8() {
  integral_set ints = dimer(2.0);
  sc_pole_state seed = scgf2_seed(ints);
  scgf2_options opt;
  opt.lo = -10.0;
  opt.hi = 12.0;
  opt.scan.lo = opt.lo;
  opt.scan.hi = opt.hi;

  self_energy_evaluator ev_seed = make_scgf2_evaluator(ints, seed, opt);
  std::vector<double> sing = sigma2_singularities(ints, -1);
  double worst = 0.0;
  for (int i = 0; i < 12; ++i) {
    double w = -5.0 + i * 1.0 + 0.37;
    bool far = true;
    for (double s : sing) far &= std::abs(w - s) >= 0.3;
    if (!far) continue;
    for (int q = 0; q < ints.m; ++q)
      worst = std::max(worst,
                       std::abs(ev_seed.diag(q, w) - sigma2_diag(ints, q, w)));
  }
  bool ok = clause(worst == 0.0, "c8.seed_bitwise",
                   "seed evaluator vs analytic order 2, max |diff| = " + num(worst));

  scgf2_cycle_result s0 = scgf2_cycle(ints, seed, opt);
  scgf2_cycle_result s1 = scgf2_cycle(ints, s0.state, opt);
  long long n0 = s0.state.total_poles(), n1 = s1.state.total_poles();
  double factor = n0 > 0 ? static_cast<double>(n1) / n0 : 0.0;
  ok &= clause(n1 > n0 && factor >= 3.0, "c8.growth",
               "poles cycle 0 -> 1: " + std::to_string(n0) + " -> " + std::to_string(n1) +
                   " (factor " + num(factor) + ")");

  const char* bh = std::getenv("MBGF_BH_FCIDUMP");
  if (!bh) {
    skip("c8.bh", "MBGF_BH_FCIDUMP not set; optional tier not run");
    return ok;
  }
  integral_set bhints = parse_fcidump_file(bh);
  double hf = bhints.e_nuc;
  for (int q : bhints.occupied()) hf += 0.5 * (bhints.hcore(q, q) + bhints.eps[q]);
  ok &= clause(std::abs(hf - (-24.752788)) <= 1e-4, "c8.bh_hf", "E_HF = " + num(hf));

  lehmann_data ld = build_lehmann(bhints, 1.0);
  ok &= clause(std::abs(ld.e0_total - (-24.809940)) <= 1e-4, "c8.bh_fci",
               "E_FCI = " + num(ld.e0_total));
  std::size_t ip_states =
      enumerate_sector(bhints.m, bhints.n_e - 1, 1).size();
  std::size_t ea_states =
      enumerate_sector(bhints.m, bhints.n_e + 1, 1).size();
  ok &= clause(ip_states == 300 && ea_states == 300, "c8.bh_sectors",
               std::to_string(ip_states) + " IP / " + std::to_string(ea_states) +
                   " EA FCI states");

  auto [plo, phi] = pole_span(ld.poles);
  scgf2_options bopt;
  bopt.lo = plo - 5.0;
  bopt.hi = phi + 5.0;
  bopt.scan.lo = bopt.lo;
  bopt.scan.hi = bopt.hi;
  scgf2_cycle_result b0 = scgf2_cycle(bhints, scgf2_seed(bhints), bopt);
  scgf2_cycle_result b1 = scgf2_cycle(bhints, b0.state, bopt);
  ok &= clause(b0.state.total_poles() == 72 && b1.state.total_poles() == 4314,
               "c8.bh_growth",
               "poles " + std::to_string(b0.state.total_poles()) + " -> " +
                   std::to_string(b1.state.total_poles()));
  return ok;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  model_poles mp = model_poles::defaults();

  double exact0 = model_g(mp, 0.0, 1.0);
  std::vector<double> c0 = taylor_coefficients(mp, 0.0, 19);
  double dev0 = std::abs(taylor_partial_sum(c0, 19, 1.0) - exact0);
  bool ok = clause(dev0 <= 1e-6, "c9.order19", "|S_19 - g| at omega 0 = " + num(dev0));

  double exact85 = model_g(mp, 0.85, 1.0);
  std::vector<double> c85 = taylor_coefficients(mp, 0.85, 19);
  double e19 = std::abs(taylor_partial_sum(c85, 19, 1.0) - exact85);
  double e11 = std::abs(taylor_partial_sum(c85, 11, 1.0) - exact85);
  ok &= clause(e19 > e11, "c9.divergence",
               "omega 0.85 errors: order 19 = " + num(e19) + ", order 11 = " + num(e11));

  convergence_map_result cm = convergence_map(mp, -3.0, 3.0, 0.05, 25);
  bool endpoints = cm.has_central && std::abs(cm.central_lo - (-1.1)) <= 0.05 + 1e-9 &&
                   std::abs(cm.central_hi - 0.75) <= 0.05 + 1e-9;
  ok &= clause(endpoints, "c9.central",
               "central region [" + num(cm.central_lo) + ", " + num(cm.central_hi) +
                   "] vs [-1.1, 0.75] within one 0.05 cell");
  double dt = now_seconds(t0);
  ok &= clause(dt < 1.0, "c9.runtime", num(dt) + " s");
  return ok;
}

// --------------------------------------------------------------- criterion 10

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool criterion_10() {
#ifndef MBGF_CLI_BINARY
  return clause(false, "c10.binary", "CLI binary path not compiled in");
#else
  struct job {
    std::string args, out;
  };
  std::vector<job> jobs = {
      {"exact --hubbard 1,2 --matrix --format csv", "acc10_a.csv"},
      {"scgf2 --hubbard 1,4 --cycles 2 --format json", "acc10_b.json"},
  };
  bool ok = true;
  for (const auto& j : jobs) {
    std::string base = std::string(MBGF_CLI_BINARY) + " " + j.args + " --out " + j.out;
    int r1 = std::system((base + " > " + j.out + ".1.txt 2>&1").c_str());
    std::string first = read_file(j.out);
    int r2 = std::system((base + " > " + j.out + ".2.txt 2>&1").c_str());
    bool same = r1 == 0 && r2 == 0 && !first.empty() && first == read_file(j.out) &&
                read_file(j.out + ".1.txt") == read_file(j.out + ".2.txt");
    ok &= clause(same, "c10." + j.args.substr(0, j.args.find(' ')),
                 "two identical runs byte-identical (artifact and stdout)");
    for (const std::string& f : {j.out, j.out + ".1.txt", j.out + ".2.txt"})
      std::remove(f.c_str());
  }
  return ok;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  bool (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10};
  bool all_ok = true;
  for (int n = 1; n <= 10; ++n) {
    if (only != 0 && n != only) continue;
    bool ok = false;
    try {
      ok = criteria[n - 1]();
    } catch (const std::exception& e) {
      std::printf("  [FAIL] c%d.exception: %s\n", n, e.what());
    }
    std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
    all_ok &= ok;
  }
  return all_ok ? 0 : 1;
}
