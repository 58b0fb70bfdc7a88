#include "mbgf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "mbgf/dyson.hpp"
#include "mbgf/errors.hpp"
#include "mbgf/exact_sigma.hpp"
#include "mbgf/fcidump.hpp"
#include "mbgf/lehmann.hpp"
#include "mbgf/models.hpp"
#include "mbgf/output.hpp"
#include "mbgf/perturbation.hpp"
#include "mbgf/resummation.hpp"
#include "mbgf/taylor_model.hpp"
#include "mbgf/util.hpp"
#include "mbgf/version.hpp"

namespace mbgf {
namespace {

struct problem {
  integral_set ints;
  std::string input_tag;  // source description plus content checksum
};

problem load_problem(const run_config& cfg) {
  problem pr;
  if (!cfg.fcidump_path.empty()) {
    pr.ints = parse_fcidump_file(cfg.fcidump_path);
    pr.input_tag = "fcidump " + cfg.fcidump_path + " fnv1a=" + hex16(fnv1a64_file(cfg.fcidump_path));
  } else {
    model_spec spec;
    spec.kind = cfg.hubbard_sites == 2 ? model_kind::hubbard_dimer : model_kind::hubbard_chain;
    spec.t = cfg.hubbard_t;
    spec.u = cfg.hubbard_u;
    spec.sites = cfg.hubbard_sites;
    pr.ints = generate_model(spec);
    std::ostringstream text;
    write_fcidump(text, pr.ints.spatial);
    pr.input_tag = model_signature(spec) + " fnv1a=" + hex16(fnv1a64(text.str()));
  }
  pr.ints.validate();
  return pr;
}

int pick_orbital(const run_config& cfg, const integral_set& ints) {
  if (cfg.orbital >= 0) {
    if (cfg.orbital >= ints.m)
      throw usage_error("--orbital " + std::to_string(cfg.orbital) + " is out of range for m=" +
                        std::to_string(ints.m));
    return cfg.orbital;
  }
  return ints.occupied().back();
}

std::pair<double, double> padded_span(const integral_set& ints, const std::vector<double>& marks,
                                      double pad) {
  double lo = ints.eps.minCoeff(), hi = ints.eps.maxCoeff();
  for (double s : marks) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo - pad, hi + pad};
}

std::pair<double, double> resolve_window(const run_config& cfg, const integral_set& ints,
                                         const std::vector<double>& marks, double pad) {
  if (cfg.have_window) return {cfg.omega_min, cfg.omega_max};
  return padded_span(ints, marks, pad);
}

bool wants_matrix(const run_config& cfg) {
  // Matrix mode is only defined for the exact evaluator; it is the default there.
  if (cfg.subcommand == "exact" || (cfg.subcommand == "roots" && cfg.eval_kind == "exact"))
    return cfg.mode != 1;
  if (cfg.mode == 2) throw usage_error("--matrix requires the exact evaluator");
  return false;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

// Canonical echo of the resolved settings. Output destination and format are
// deliberately left out so reruns into different files stamp equal headers.
std::string config_echo(const run_config& cfg, double lo, double hi, double step) {
  std::ostringstream os;
  os << cfg.subcommand;
  if (!cfg.fcidump_path.empty())
    os << " --fcidump " << cfg.fcidump_path;
  else if (cfg.use_hubbard)
    os << " --hubbard " << format_g12(cfg.hubbard_t) << "," << format_g12(cfg.hubbard_u) << ","
       << cfg.hubbard_sites;
  os << " --omega-min " << format_g12(lo) << " --omega-max " << format_g12(hi) << " --omega-step "
     << format_g12(step);
  const bool solver = cfg.subcommand != "model";
  if (cfg.subcommand == "roots") os << " --eval " << cfg.eval_kind;
  const bool uses_order =
      cfg.subcommand == "pt" || (cfg.subcommand == "roots" && cfg.eval_kind == "order");
  const bool uses_cycles = cfg.subcommand == "tda" || cfg.subcommand == "scgf2" ||
                           (cfg.subcommand == "roots" &&
                            (cfg.eval_kind == "tda" || cfg.eval_kind == "scgf2"));
  if (uses_order) os << " --order " << cfg.order << " --stencil-h " << format_g12(cfg.stencil_h);
  if (uses_cycles) os << " --cycles " << cfg.cycles;
  if (solver) {
    os << " --mode " << (wants_matrix(cfg) ? "matrix" : "diagonal");
    os << " --min-residue " << format_g12(cfg.min_residue);
    os << " --max-sector-dim " << cfg.max_sector_dim;
  }
  if (cfg.subcommand == "scgf2" || (cfg.subcommand == "roots" && cfg.eval_kind == "scgf2"))
    os << " --pole-cap " << cfg.pole_cap;
  if (cfg.subcommand == "model") os << " --orders " << join_ints(cfg.model_orders);
  if (cfg.subcommand == "pt" || cfg.subcommand == "tda" || cfg.subcommand == "model")
    os << " --orbital " << cfg.orbital;
  return os.str();
}

std::string artifact_path(const run_config& cfg) {
  if (!cfg.out_path.empty()) return cfg.out_path;
  return "mbgf_" + cfg.subcommand + (cfg.format == "json" ? ".json" : ".csv");
}

int dominant_component(const dyson_root& r) {
  if (r.orbital >= 0) return r.orbital;
  int best = 0;
  double mag = -1.0;
  for (int i = 0; i < r.vector.size(); ++i)
    if (std::abs(r.vector[i]) > mag) {
      mag = std::abs(r.vector[i]);
      best = i;
    }
  return best;
}

void write_root_artifact(const run_config& cfg, const artifact_header& hdr,
                         const std::vector<dyson_root>& roots, bool matrix_mode) {
  const std::string path = artifact_path(cfg);
  if (cfg.format == "csv") {
    std::vector<std::string> cols = {"omega",   "residue", "residue_error",
                                     "kind",    "orbital", "bracket",
                                     "hole",    "principal", "tracking_ok"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : roots) {
      rows.push_back({format_g12(r.omega), format_g12(r.residue), format_g12(r.residue_error),
                      r.is_ip() ? "IP" : "EA", std::to_string(dominant_component(r)),
                      std::to_string(r.bracket), r.hole ? "1" : "0", r.principal ? "1" : "0",
                      r.tracking_ok ? "1" : "0"});
    }
    write_text_file(path, csv_table(hdr, cols, rows));
  } else {
    nlohmann::ordered_json j = json_envelope(hdr);
    j["roots"] = nlohmann::ordered_json::array();
    for (const auto& r : roots) {
      nlohmann::ordered_json jr;
      jr["omega"] = r.omega;
      jr["residue"] = r.residue;
      jr["residue_error"] = r.residue_error;
      jr["kind"] = r.is_ip() ? "IP" : "EA";
      jr["orbital"] = dominant_component(r);
      jr["bracket"] = r.bracket;
      jr["hole"] = r.hole;
      jr["principal"] = r.principal;
      jr["tracking_ok"] = r.tracking_ok;
      if (matrix_mode) {
        std::vector<double> v(r.vector.data(), r.vector.data() + r.vector.size());
        jr["vector"] = v;
      }
      j["roots"].push_back(jr);
    }
    write_text_file(path, json_text(j));
  }
}

// Grid tables share one shape: a header, named columns, one row per frequency.
void write_grid_artifact(const run_config& cfg, const artifact_header& hdr,
                         const std::vector<std::string>& cols,
                         const std::vector<std::vector<std::string>>& rows) {
  const std::string path = artifact_path(cfg);
  if (cfg.format == "csv") {
    write_text_file(path, csv_table(hdr, cols, rows));
  } else {
    nlohmann::ordered_json j = json_envelope(hdr);
    j["columns"] = cols;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) j["rows"].push_back(row);
    write_text_file(path, json_text(j));
  }
}

void print_scan_line(std::ostream& os, const scan_report& rep) {
  os << "  scan: refinements=" << rep.jump_refinements << " rejected=" << rep.rejected_crossings
     << " skipped=" << rep.skipped_points
     << " excluded_fraction=" << format_g12(rep.excluded_fraction) << "\n";
}

void print_root_summary(std::ostream& os, const std::vector<dyson_root>& roots,
                        const sum_rule_report& sr, bool matrix_mode, int n_e, int m) {
  int ip = 0, principal = 0;
  for (const auto& r : roots) {
    if (r.is_ip()) ++ip;
    if (r.principal) ++principal;
  }
  os << "  roots: " << roots.size() << " (IP " << ip << ", EA "
     << (static_cast<int>(roots.size()) - ip) << "), principal " << principal << "\n";
  if (matrix_mode) {
    os << "  sum rule: ip_residue_sum=" << format_g12(sr.ip_residue_sum) << " target "
       << n_e << " dev=" << format_g12(sr.ip_deviation) << "\n";
  } else {
    os << "  sum rule: max orbital deviation=" << format_g12(sr.max_orbital_deviation) << " over "
       << m << " orbitals\n";
  }
}

std::vector<double> make_grid(double lo, double hi, double step) {
  return make_model_grid(lo, hi, step);
}

// ---- exact ---------------------------------------------------------------

int run_exact_kind(const run_config& cfg, std::ostream& os) {
  problem pr = load_problem(cfg);
  lehmann_data ld = build_lehmann(pr.ints, 1.0, cfg.max_sector_dim);
  std::vector<double> marks;
  for (const auto& p : ld.poles.poles) marks.push_back(p.omega);
  auto [lo, hi] = resolve_window(cfg, pr.ints, marks, 1.0);
  exact_self_energy engine(pr.ints, ld);
  auto ev = make_exact_evaluator(engine, lo, hi);

  scan_options so;
  so.lo = lo;
  so.hi = hi;
  so.min_residue = cfg.min_residue;
  scan_report rep;
  const bool matrix_mode = wants_matrix(cfg);
  std::vector<dyson_root> roots =
      matrix_mode ? solve_matrix(ev, so, &rep) : solve_diagonal_all(ev, so, &rep);
  retag_from_poles(roots, ld.poles);
  sum_rule_report sr = matrix_mode ? check_sum_rules_matrix(roots, pr.ints.n_e)
                                   : check_sum_rules_diagonal(roots, pr.ints.m);
  double gm = galitskii_migdal(roots, pr.ints);

  artifact_header hdr{config_echo(cfg, lo, hi, cfg.omega_step), pr.input_tag};
  write_root_artifact(cfg, hdr, roots, matrix_mode);

  os << "mbgf " << cfg.subcommand << " (exact)\n";
  os << "  input: " << pr.input_tag << "\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "]\n";
  os << "  spectral poles: " << ld.poles.poles.size()
     << " trace_sum=" << format_g12(ld.poles.trace_sum()) << " (m=" << pr.ints.m << ")\n";
  print_root_summary(os, roots, sr, matrix_mode, pr.ints.n_e, pr.ints.m);
  os << "  galitskii-migdal: " << format_g12(gm) << " fci=" << format_g12(ld.e0_total)
     << " diff=" << format_g12(gm - ld.e0_total) << "\n";
  print_scan_line(os, rep);
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

// ---- pt ------------------------------------------------------------------

int run_pt(const run_config& cfg, std::ostream& os) {
  problem pr = load_problem(cfg);
  auto cat = denominator_catalogue(pr.ints, -1, cfg.order);
  auto [lo, hi] = resolve_window(cfg, pr.ints, cat, 2.0);
  auto stencil = lambda_stencil::make(cfg.order, cfg.stencil_h);
  auto scan = std::make_shared<lambda_scan>(pr.ints, stencil, cfg.max_sector_dim);
  auto ev = make_order_evaluator(scan, cfg.order, lo, hi);

  scan_options so;
  so.lo = lo;
  so.hi = hi;
  so.min_residue = cfg.min_residue;
  scan_report rep;
  std::vector<dyson_root> roots = solve_diagonal_all(ev, so, &rep);
  sum_rule_report sr = check_sum_rules_diagonal(roots, pr.ints.m);
  double gm = galitskii_migdal(roots, pr.ints);

  // Satellite census: brackets away from the orbital energy with no real root.
  int satellites = 0, empty_satellites = 0;
  for (int q = 0; q < pr.ints.m; ++q) {
    auto brackets = find_brackets(ev.singularities_for(q), lo, hi);
    int home = -1;
    for (int b = 0; b < static_cast<int>(brackets.size()); ++b)
      if (brackets[b].first <= ev.eps[q] && ev.eps[q] <= brackets[b].second) home = b;
    std::vector<int> counts(brackets.size(), 0);
    for (const auto& r : roots)
      if (r.orbital == q && r.bracket >= 0 && r.bracket < static_cast<int>(counts.size()))
        ++counts[r.bracket];
    for (int b = 0; b < static_cast<int>(brackets.size()); ++b) {
      if (b == home) continue;
      ++satellites;
      if (counts[b] == 0) ++empty_satellites;
    }
  }

  // Per-order grid table for the report orbital.
  const int q = pick_orbital(cfg, pr.ints);
  auto grid = make_grid(lo, hi, cfg.omega_step);
  order_corrections oc = extract_order_corrections(*scan, grid);
  std::vector<std::string> cols = {"omega"};
  for (int n = 2; n <= cfg.order; ++n) cols.push_back("delta" + std::to_string(n));
  cols.push_back("cumulative");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < oc.omega.size(); ++k) {
    std::vector<std::string> row = {format_g12(oc.omega[k])};
    for (int n = 2; n <= cfg.order; ++n) row.push_back(format_g12(oc.delta[n][k](q, q)));
    row.push_back(format_g12(oc.cumulative(cfg.order, static_cast<int>(k))(q, q)));
    rows.push_back(std::move(row));
  }
  artifact_header hdr{config_echo(cfg, lo, hi, cfg.omega_step), pr.input_tag};
  write_grid_artifact(cfg, hdr, cols, rows);

  os << "mbgf pt (order " << cfg.order << ")\n";
  os << "  input: " << pr.input_tag << "\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "]\n";
  os << "  stencil: points=" << stencil.points.size() << " h=" << format_g12(stencil.h)
     << " fit_condition=" << format_g12(stencil.fit_condition) << "\n";
  os << "  amplification(order " << cfg.order << ")="
     << format_g12(stencil.amplification[cfg.order]) << "\n";
  os << "  grid: kept=" << oc.omega.size() << " dropped=" << oc.dropped.size() << "\n";
  print_root_summary(os, roots, sr, false, pr.ints.n_e, pr.ints.m);
  os << "  satellite brackets: " << satellites << " with zero real roots: " << empty_satellites
     << "\n";
  os << "  galitskii-migdal: " << format_g12(gm) << "\n";
  print_scan_line(os, rep);
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

// ---- tda -----------------------------------------------------------------

int run_tda(const run_config& cfg, std::ostream& os) {
  problem pr = load_problem(cfg);
  auto marks = sigma2_singularities(pr.ints);
  auto [lo, hi] = resolve_window(cfg, pr.ints, marks, 2.0);
  auto ev = make_tda_evaluator(pr.ints, cfg.cycles, lo, hi);

  scan_options so;
  so.lo = lo;
  so.hi = hi;
  so.min_residue = cfg.min_residue;
  scan_report rep;
  std::vector<dyson_root> roots = solve_diagonal_all(ev, so, &rep);
  sum_rule_report sr = check_sum_rules_diagonal(roots, pr.ints.m);

  const int q = pick_orbital(cfg, pr.ints);
  auto grid = make_grid(lo, hi, cfg.omega_step);
  std::vector<std::string> cols = {"omega", "sigma_tda", "inverse_g"};
  std::vector<std::vector<std::string>> rows;
  for (double w : grid) {
    try {
      double s = ev.diag(q, w);
      rows.push_back({format_g12(w), format_g12(s), format_g12(w - ev.eps[q] - s)});
    } catch (const numerical_error&) {
      // amplitude denominator collision; leave the point out
    }
  }
  artifact_header hdr{config_echo(cfg, lo, hi, cfg.omega_step), pr.input_tag};
  write_grid_artifact(cfg, hdr, cols, rows);

  os << "mbgf tda (cycles " << cfg.cycles << ")\n";
  os << "  input: " << pr.input_tag << "\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "]\n";
  print_root_summary(os, roots, sr, false, pr.ints.n_e, pr.ints.m);
  os << "  report orbital: " << q << " grid rows: " << rows.size() << "\n";
  print_scan_line(os, rep);
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

// ---- scgf2 ---------------------------------------------------------------

int run_scgf2(const run_config& cfg, std::ostream& os) {
  problem pr = load_problem(cfg);
  auto marks = sigma2_singularities(pr.ints);
  auto [lo, hi] = resolve_window(cfg, pr.ints, marks, 4.0);

  scgf2_options opt;
  opt.lo = lo;
  opt.hi = hi;
  opt.pole_cap = cfg.pole_cap;
  opt.scan.lo = lo;
  opt.scan.hi = hi;

  sc_pole_state state = scgf2_seed(pr.ints);
  os << "mbgf scgf2 (cycles " << cfg.cycles << ")\n";
  os << "  input: " << pr.input_tag << "\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "]\n";
  os << "  seed poles: " << state.total_poles() << "\n";

  std::vector<std::string> cols = {"cycle",        "poles",   "hole_poles", "min_omega",
                                   "max_omega",    "terms",   "projected",  "skipped_weight",
                                   "residue_excess"};
  std::vector<std::vector<std::string>> rows;
  for (int c = 0; c < cfg.cycles; ++c) {
    scgf2_cycle_result res = scgf2_cycle(pr.ints, state, opt);
    state = std::move(res.state);
    if (cfg.min_residue > 0.0) state = prune_poles(state, cfg.min_residue);
    long long holes = 0;
    double wmin = 0.0, wmax = 0.0;
    bool first = true;
    for (const auto& orb : state.orbitals)
      for (const auto& p : orb) {
        if (p.hole) ++holes;
        if (first || p.omega < wmin) wmin = p.omega;
        if (first || p.omega > wmax) wmax = p.omega;
        first = false;
      }
    rows.push_back({std::to_string(state.cycle), std::to_string(state.total_poles()),
                    std::to_string(holes), format_g12(wmin), format_g12(wmax),
                    std::to_string(res.term_count), std::to_string(res.projected_poles),
                    format_g12(res.skipped_weight), format_g12(res.max_orbital_residue_excess)});
    os << "  cycle " << state.cycle << ": poles " << state.total_poles() << " (holes " << holes
       << ") span [" << format_g12(wmin) << ", " << format_g12(wmax) << "] terms "
       << res.term_count << " skipped_weight " << format_g12(res.skipped_weight)
       << " residue_excess " << format_g12(res.max_orbital_residue_excess) << "\n";
  }
  artifact_header hdr{config_echo(cfg, lo, hi, cfg.omega_step), pr.input_tag};
  write_grid_artifact(cfg, hdr, cols, rows);
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

// ---- model ---------------------------------------------------------------

int run_model(const run_config& cfg, std::ostream& os) {
  model_poles mp = model_poles::defaults();
  double lo = cfg.have_window ? cfg.omega_min : -3.0;
  double hi = cfg.have_window ? cfg.omega_max : 3.0;
  double step = cfg.have_step ? cfg.omega_step : 0.05;
  std::vector<int> orders = cfg.model_orders;
  if (orders.empty()) orders = {0, 1, 2, 19};
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  int coeff_order = orders.back();
  int class_order = std::max(25, coeff_order);

  convergence_map_result map = convergence_map(mp, lo, hi, step, class_order);

  std::vector<std::string> cols = {"omega", "g_exact"};
  for (int n : orders) cols.push_back("s" + std::to_string(n));
  cols.push_back("class");
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : map.entries) {
    std::vector<double> c = taylor_coefficients(mp, e.omega, coeff_order);
    std::vector<std::string> row = {format_g12(e.omega), format_g12(e.exact_g)};
    for (int n : orders) row.push_back(format_g12(taylor_partial_sum(c, n, 1.0)));
    row.push_back(e.cls == series_class::convergent
                      ? "convergent"
                      : (e.cls == series_class::divergent ? "divergent" : "inconclusive"));
    rows.push_back(std::move(row));
  }
  run_config echo_cfg = cfg;
  echo_cfg.model_orders = orders;
  artifact_header hdr{config_echo(echo_cfg, lo, hi, step), "four-pole taylor model"};
  write_grid_artifact(cfg, hdr, cols, rows);

  int conv = 0, div = 0, inc = 0;
  for (const auto& e : map.entries) {
    if (e.cls == series_class::convergent) ++conv;
    else if (e.cls == series_class::divergent) ++div;
    else ++inc;
  }
  os << "mbgf model (orders " << join_ints(orders) << ")\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "] step " << format_g12(step)
     << "\n";
  os << "  points: " << map.entries.size() << " kept, " << map.skipped.size()
     << " skipped near poles\n";
  os << "  classes: convergent " << conv << ", divergent " << div << ", inconclusive " << inc
     << "\n";
  if (map.has_central)
    os << "  central convergent region: [" << format_g12(map.central_lo) << ", "
       << format_g12(map.central_hi) << "]\n";
  else
    os << "  central convergent region: none\n";
  os << "  terminal regions: low " << (map.terminal_low_convergent ? "convergent" : "mixed")
     << ", high " << (map.terminal_high_convergent ? "convergent" : "mixed") << "\n";
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

// ---- roots over approximate evaluators -----------------------------------

int run_roots_other(const run_config& cfg, std::ostream& os) {
  problem pr = load_problem(cfg);
  std::shared_ptr<lambda_scan> scan;  // keeps order-evaluator engines alive
  self_energy_evaluator ev;
  double lo = 0.0, hi = 0.0;
  std::string label;

  if (cfg.eval_kind == "order") {
    auto cat = denominator_catalogue(pr.ints, -1, cfg.order);
    std::tie(lo, hi) = resolve_window(cfg, pr.ints, cat, 2.0);
    scan = std::make_shared<lambda_scan>(pr.ints, lambda_stencil::make(cfg.order, cfg.stencil_h),
                                         cfg.max_sector_dim);
    ev = make_order_evaluator(scan, cfg.order, lo, hi);
    label = "order " + std::to_string(cfg.order);
  } else if (cfg.eval_kind == "tda") {
    auto marks = sigma2_singularities(pr.ints);
    std::tie(lo, hi) = resolve_window(cfg, pr.ints, marks, 2.0);
    ev = make_tda_evaluator(pr.ints, cfg.cycles, lo, hi);
    label = "tda cycles " + std::to_string(cfg.cycles);
  } else {
    auto marks = sigma2_singularities(pr.ints);
    std::tie(lo, hi) = resolve_window(cfg, pr.ints, marks, 4.0);
    scgf2_options opt;
    opt.lo = lo;
    opt.hi = hi;
    opt.pole_cap = cfg.pole_cap;
    opt.scan.lo = lo;
    opt.scan.hi = hi;
    sc_pole_state state = scgf2_seed(pr.ints);
    for (int c = 0; c < cfg.cycles; ++c) {
      scgf2_cycle_result res = scgf2_cycle(pr.ints, state, opt);
      state = std::move(res.state);
    }
    ev = make_scgf2_evaluator(pr.ints, state, opt);
    label = "scgf2 cycles " + std::to_string(cfg.cycles);
  }

  scan_options so;
  so.lo = lo;
  so.hi = hi;
  so.min_residue = cfg.min_residue;
  scan_report rep;
  std::vector<dyson_root> roots = solve_diagonal_all(ev, so, &rep);
  sum_rule_report sr = check_sum_rules_diagonal(roots, pr.ints.m);
  double gm = galitskii_migdal(roots, pr.ints);

  artifact_header hdr{config_echo(cfg, lo, hi, cfg.omega_step), pr.input_tag};
  write_root_artifact(cfg, hdr, roots, false);

  os << "mbgf roots (" << label << ")\n";
  os << "  input: " << pr.input_tag << "\n";
  os << "  window: [" << format_g12(lo) << ", " << format_g12(hi) << "]\n";
  print_root_summary(os, roots, sr, false, pr.ints.n_e, pr.ints.m);
  os << "  galitskii-migdal: " << format_g12(gm) << "\n";
  print_scan_line(os, rep);
  os << "  artifact: " << artifact_path(cfg) << "\n";
  return 0;
}

}  // namespace

void run_config::validate() const {
  static const std::vector<std::string> known = {"exact", "pt", "tda", "scgf2", "model", "roots"};
  if (std::find(known.begin(), known.end(), subcommand) == known.end())
    throw usage_error("unknown subcommand: " + subcommand);
  if (subcommand != "model") {
    if (fcidump_path.empty() && !use_hubbard)
      throw usage_error("an input source is required: --fcidump FILE or --hubbard t,U[,sites]");
    if (!fcidump_path.empty() && use_hubbard)
      throw usage_error("--fcidump and --hubbard are mutually exclusive");
  }
  if (use_hubbard) {
    if (hubbard_sites < 2) throw usage_error("--hubbard needs at least two sites");
    if (hubbard_t == 0.0) throw usage_error("--hubbard needs a nonzero hopping");
  }
  if (have_window && !(omega_min < omega_max))
    throw usage_error("--omega-min must lie below --omega-max");
  if (omega_step <= 0.0) throw usage_error("--omega-step must be positive");
  if (order < 2 || order > 9) throw usage_error("--order must lie in [2, 9]");
  if (cycles < 0) throw usage_error("--cycles must be nonnegative");
  if (orbital < -1) throw usage_error("--orbital must be nonnegative");
  if (min_residue < 0.0) throw usage_error("--min-residue must be nonnegative");
  if (format != "csv" && format != "json") throw usage_error("--format must be csv or json");
  if (max_sector_dim < 1) throw usage_error("--max-sector-dim must be positive");
  if (pole_cap < 1) throw usage_error("--pole-cap must be positive");
  if (stencil_h <= 0.0 || stencil_h > 0.5) throw usage_error("--h must lie in (0, 0.5]");
  for (int n : model_orders)
    if (n < 0 || n > 60) throw usage_error("--orders entries must lie in [0, 60]");
  if (subcommand == "roots" && eval_kind != "exact" && eval_kind != "order" &&
      eval_kind != "tda" && eval_kind != "scgf2")
    throw usage_error("--eval must be exact, order, tda, or scgf2");
  if (subcommand == "scgf2" && cycles < 1) throw usage_error("scgf2 needs --cycles >= 1");
}

parse_result parse_cli(const std::vector<std::string>& args) {
  parse_result pres;
  run_config& cfg = pres.cfg;

  CLI::App app{"finite-basis Green's function workbench", "mbgf"};
  app.require_subcommand(1);

  std::string hub;
  std::string orders_csv;
  bool flag_diagonal = false, flag_matrix = false;

  auto add_common = [&](CLI::App* s, bool with_source) {
    if (with_source) {
      s->add_option("--fcidump", cfg.fcidump_path, "FCIDUMP input file");
      s->add_option("--hubbard", hub, "Hubbard parameters t,U[,sites]");
    }
    auto* omin = s->add_option_function<double>(
        "--omega-min", [&cfg](double v) { cfg.omega_min = v; cfg.have_window = true; },
        "frequency window lower edge");
    auto* omax = s->add_option_function<double>(
        "--omega-max", [&cfg](double v) { cfg.omega_max = v; cfg.have_window = true; },
        "frequency window upper edge");
    omin->needs(omax);
    omax->needs(omin);
    s->add_option_function<double>(
        "--omega-step", [&cfg](double v) { cfg.omega_step = v; cfg.have_step = true; },
        "grid spacing for tables");
    s->add_option("--out", cfg.out_path, "artifact output path");
    s->add_option("--format", cfg.format, "artifact format: csv or json");
  };
  auto add_solver = [&](CLI::App* s) {
    s->add_flag("--diagonal", flag_diagonal, "diagonal Dyson mode");
    s->add_flag("--matrix", flag_matrix, "matrix Dyson mode");
    s->add_option("--min-residue", cfg.min_residue, "drop roots below this residue");
    s->add_option("--max-sector-dim", cfg.max_sector_dim, "largest Hamiltonian sector allowed");
    s->add_option("--orbital", cfg.orbital, "report orbital (default: highest occupied)");
  };

  CLI::App* s_exact = app.add_subcommand("exact", "exact self-energy roots and residues");
  add_common(s_exact, true);
  add_solver(s_exact);

  CLI::App* s_pt = app.add_subcommand("pt", "perturbation corrections by coupling differentiation");
  add_common(s_pt, true);
  add_solver(s_pt);
  s_pt->add_option("--order", cfg.order, "highest correction order");
  s_pt->add_option("--stencil-h", cfg.stencil_h, "coupling stencil spacing");

  CLI::App* s_tda = app.add_subcommand("tda", "ladder-resummed second-order self-energy");
  add_common(s_tda, true);
  add_solver(s_tda);
  s_tda->add_option("--cycles", cfg.cycles, "amplitude substitution cycles");

  CLI::App* s_sc = app.add_subcommand("scgf2", "self-consistent second-order propagator cycles");
  add_common(s_sc, true);
  add_solver(s_sc);
  s_sc->add_option("--cycles", cfg.cycles, "dyson update cycles");
  s_sc->add_option("--pole-cap", cfg.pole_cap, "projected pole guard");

  CLI::App* s_model = app.add_subcommand("model", "four-pole taylor convergence model");
  add_common(s_model, false);
  s_model->add_option("--orders", orders_csv, "partial-sum columns, comma separated");
  s_model->add_option("--orbital", cfg.orbital, "unused; accepted for uniformity");

  CLI::App* s_roots = app.add_subcommand("roots", "inverse Dyson roots for a chosen evaluator");
  add_common(s_roots, true);
  add_solver(s_roots);
  s_roots->add_option("--eval", cfg.eval_kind, "evaluator: exact, order, tda, scgf2");
  bool flag_exact = false;
  s_roots->add_flag("--exact", flag_exact, "shorthand for --eval exact");
  s_roots->add_option("--order", cfg.order, "correction order for --eval order");
  s_roots->add_option("--stencil-h", cfg.stencil_h, "coupling stencil spacing");
  s_roots->add_option("--cycles", cfg.cycles, "cycles for --eval tda/scgf2");
  s_roots->add_option("--pole-cap", cfg.pole_cap, "projected pole guard");

  std::vector<const char*> argv;
  argv.push_back("mbgf");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    pres.help = true;
    auto subs = app.get_subcommands();
    pres.help_text = subs.empty() ? app.help() : subs.front()->help();
    return pres;
  } catch (const CLI::CallForAllHelp&) {
    pres.help = true;
    pres.help_text = app.help("", CLI::AppFormatMode::All);
    return pres;
  } catch (const CLI::ParseError& e) {
    throw usage_error(std::string("argument error: ") + e.what());
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();

  if (!hub.empty()) {
    std::istringstream is(hub);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(is, tok, ',')) parts.push_back(tok);
    if (parts.size() < 2 || parts.size() > 3)
      throw usage_error("--hubbard expects t,U or t,U,sites");
    try {
      cfg.hubbard_t = std::stod(parts[0]);
      cfg.hubbard_u = std::stod(parts[1]);
      cfg.hubbard_sites = parts.size() == 3 ? std::stoi(parts[2]) : 2;
    } catch (const std::exception&) {
      throw usage_error("--hubbard expects numeric t,U[,sites]");
    }
    cfg.use_hubbard = true;
  }
  if (flag_diagonal && flag_matrix) throw usage_error("--diagonal and --matrix conflict");
  if (flag_diagonal) cfg.mode = 1;
  if (flag_matrix) cfg.mode = 2;
  if (flag_exact) cfg.eval_kind = "exact";
  wants_matrix(cfg);  // reject --matrix on evaluators without a matrix form before any work runs

  if (!orders_csv.empty()) {
    std::istringstream is(orders_csv);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        cfg.model_orders.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw usage_error("--orders expects integers");
      }
    }
  }

  cfg.validate();
  return pres;
}

int run(const run_config& cfg, std::ostream& summary) {
  cfg.validate();
  if (cfg.subcommand == "exact") return run_exact_kind(cfg, summary);
  if (cfg.subcommand == "pt") return run_pt(cfg, summary);
  if (cfg.subcommand == "tda") return run_tda(cfg, summary);
  if (cfg.subcommand == "scgf2") return run_scgf2(cfg, summary);
  if (cfg.subcommand == "model") return run_model(cfg, summary);
  if (cfg.eval_kind == "exact") return run_exact_kind(cfg, summary);
  return run_roots_other(cfg, summary);
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    parse_result pres = parse_cli(args);
    if (pres.help) {
      out << pres.help_text;
      return 0;
    }
    return run(pres.cfg, out);
  } catch (const mbgf_error& e) {
    err << "mbgf: error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    err << "mbgf: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mbgf
