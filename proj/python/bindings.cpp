#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "mbgf/dyson.hpp"
#include "mbgf/exact_sigma.hpp"
#include "mbgf/fcidump.hpp"
#include "mbgf/lehmann.hpp"
#include "mbgf/models.hpp"
#include "mbgf/perturbation.hpp"
#include "mbgf/resummation.hpp"
#include "mbgf/selfenergy.hpp"
#include "mbgf/taylor_model.hpp"
#include "mbgf/version.hpp"

namespace py = pybind11;
using namespace mbgf;

namespace {

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& a) {
  std::vector<std::vector<double>> out(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    out[i].resize(a.cols());
    for (int j = 0; j < a.cols(); ++j) out[i][j] = a(i, j);
  }
  return out;
}

py::dict root_dict(const dyson_root& r) {
  py::dict d;
  d["omega"] = r.omega;
  d["residue"] = r.residue;
  d["residue_error"] = r.residue_error;
  d["orbital"] = r.orbital;
  d["bracket"] = r.bracket;
  d["hole"] = r.hole;
  d["principal"] = r.principal;
  d["is_ip"] = r.is_ip();
  return d;
}

std::pair<double, double> default_window(const integral_set& ints,
                                         const std::vector<double>& marks, double pad) {
  double lo = ints.eps.minCoeff(), hi = ints.eps.maxCoeff();
  for (double s : marks) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo - pad, hi + pad};
}

py::dict solve_and_pack(const self_energy_evaluator& ev, const integral_set& ints, double lo,
                        double hi, bool matrix_mode, double min_residue) {
  scan_options so;
  so.lo = lo;
  so.hi = hi;
  so.min_residue = min_residue;
  scan_report rep;
  std::vector<dyson_root> roots =
      matrix_mode ? solve_matrix(ev, so, &rep) : solve_diagonal_all(ev, so, &rep);
  sum_rule_report sr = matrix_mode ? check_sum_rules_matrix(roots, ints.n_e)
                                   : check_sum_rules_diagonal(roots, ints.m);
  py::list rl;
  for (const auto& r : roots) rl.append(root_dict(r));
  py::dict out;
  out["roots"] = rl;
  out["gm_energy"] = galitskii_migdal(roots, ints);
  out["ip_residue_sum"] = sr.ip_residue_sum;
  out["ip_deviation"] = sr.ip_deviation;
  out["max_orbital_deviation"] = sr.max_orbital_deviation;
  out["window"] = py::make_tuple(lo, hi);
  return out;
}

}  // namespace

PYBIND11_MODULE(_mbgf, m) {
  m.doc() = "finite-basis Green's function workbench";
  m.attr("__version__") = version_string;

  py::class_<integral_set>(m, "IntegralSet")
      .def_readonly("m", &integral_set::m)
      .def_readonly("n_e", &integral_set::n_e)
      .def_readonly("e_nuc", &integral_set::e_nuc)
      .def_property_readonly("eps",
                             [](const integral_set& s) {
                               return std::vector<double>(s.eps.data(), s.eps.data() + s.eps.size());
                             })
      .def("vas", &integral_set::vas);

  m.def(
      "hubbard_dimer",
      [](double t, double u) {
        model_spec spec;
        spec.kind = model_kind::hubbard_dimer;
        spec.t = t;
        spec.u = u;
        spec.sites = 2;
        return generate_model(spec);
      },
      py::arg("t"), py::arg("u"));
  m.def(
      "hubbard_chain",
      [](double t, double u, int sites) {
        model_spec spec;
        spec.kind = model_kind::hubbard_chain;
        spec.t = t;
        spec.u = u;
        spec.sites = sites;
        return generate_model(spec);
      },
      py::arg("t"), py::arg("u"), py::arg("sites"));
  m.def("read_fcidump", [](const std::string& path) { return parse_fcidump_file(path); },
        py::arg("path"));

  m.def(
      "fci_ground_energy",
      [](const integral_set& ints, int max_dim) {
        return build_lehmann(ints, 1.0, max_dim).e0_total;
      },
      py::arg("ints"), py::arg("max_dim") = default_sector_cap);

  m.def(
      "lehmann_poles",
      [](const integral_set& ints, int max_dim) {
        lehmann_data ld = build_lehmann(ints, 1.0, max_dim);
        py::list out;
        for (const auto& p : ld.poles.poles)
          out.append(py::make_tuple(p.omega, p.weight.trace(), p.hole));
        return out;
      },
      py::arg("ints"), py::arg("max_dim") = default_sector_cap);

  m.def(
      "sigma2",
      [](const integral_set& ints, double omega) { return to_rows(sigma2_analytic(ints, omega)); },
      py::arg("ints"), py::arg("omega"));

  m.def(
      "exact_roots",
      [](const integral_set& ints, bool matrix, double min_residue, int max_dim) {
        lehmann_data ld = build_lehmann(ints, 1.0, max_dim);
        std::vector<double> marks;
        for (const auto& p : ld.poles.poles) marks.push_back(p.omega);
        auto [lo, hi] = default_window(ints, marks, 1.0);
        exact_self_energy engine(ints, ld);
        auto ev = make_exact_evaluator(engine, lo, hi);
        py::dict out = solve_and_pack(ev, ints, lo, hi, matrix, min_residue);
        out["fci_energy"] = ld.e0_total;
        return out;
      },
      py::arg("ints"), py::arg("matrix") = true, py::arg("min_residue") = 0.0,
      py::arg("max_dim") = default_sector_cap);

  m.def(
      "order_roots",
      [](const integral_set& ints, int order, double h, int max_dim) {
        auto cat = denominator_catalogue(ints, -1, order);
        auto [lo, hi] = default_window(ints, cat, 2.0);
        auto scan = std::make_shared<lambda_scan>(ints, lambda_stencil::make(order, h), max_dim);
        auto ev = make_order_evaluator(scan, order, lo, hi);
        return solve_and_pack(ev, ints, lo, hi, false, 0.0);
      },
      py::arg("ints"), py::arg("order"), py::arg("h") = 0.05,
      py::arg("max_dim") = default_sector_cap);

  m.def(
      "tda_roots",
      [](const integral_set& ints, int cycles) {
        auto marks = sigma2_singularities(ints);
        auto [lo, hi] = default_window(ints, marks, 2.0);
        auto ev = make_tda_evaluator(ints, cycles, lo, hi);
        return solve_and_pack(ev, ints, lo, hi, false, 0.0);
      },
      py::arg("ints"), py::arg("cycles"));

  m.def(
      "tda_sigma_diag",
      [](const integral_set& ints, int cycles, int orbital, double omega) {
        tda_amplitudes amps = tda2_iterate(ints, omega, cycles, orbital);
        return tda2_sigma_element(ints, amps, orbital, orbital);
      },
      py::arg("ints"), py::arg("cycles"), py::arg("orbital"), py::arg("omega"));

  m.def(
      "scgf2_pole_counts",
      [](const integral_set& ints, int cycles) {
        auto marks = sigma2_singularities(ints);
        auto [lo, hi] = default_window(ints, marks, 4.0);
        scgf2_options opt;
        opt.lo = lo;
        opt.hi = hi;
        opt.scan.lo = lo;
        opt.scan.hi = hi;
        sc_pole_state state = scgf2_seed(ints);
        std::vector<long long> counts{state.total_poles()};
        for (int c = 0; c < cycles; ++c) {
          scgf2_cycle_result res = scgf2_cycle(ints, state, opt);
          state = std::move(res.state);
          counts.push_back(state.total_poles());
        }
        return counts;
      },
      py::arg("ints"), py::arg("cycles"));

  m.def(
      "model_partial_sums",
      [](double omega, const std::vector<int>& orders) {
        model_poles mp = model_poles::defaults();
        int top = 0;
        for (int n : orders) top = std::max(top, n);
        std::vector<double> c = taylor_coefficients(mp, omega, top);
        std::vector<double> out;
        for (int n : orders) out.push_back(taylor_partial_sum(c, n, 1.0));
        return out;
      },
      py::arg("omega"), py::arg("orders"));

  m.def(
      "model_exact",
      [](double omega, double lam) { return model_g(model_poles::defaults(), omega, lam); },
      py::arg("omega"), py::arg("lam") = 1.0);

  m.def(
      "model_classify",
      [](double omega, int max_order) {
        switch (classify_series(model_poles::defaults(), omega, max_order)) {
          case series_class::convergent: return "convergent";
          case series_class::divergent: return "divergent";
          default: return "inconclusive";
        }
      },
      py::arg("omega"), py::arg("max_order") = 25);
}
