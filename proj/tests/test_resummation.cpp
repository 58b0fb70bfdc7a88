#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mbgf/errors.hpp"
#include "mbgf/models.hpp"
#include "mbgf/perturbation.hpp"
#include "mbgf/resummation.hpp"

using namespace mbgf;

namespace {

integral_set dimer(double t = 1.0, double u = 2.0) {
  model_spec spec;
  spec.kind = model_kind::hubbard_dimer;
  spec.t = t;
  spec.u = u;
  return generate_model(spec);
}

integral_set chain4(double u = 2.0) {
  model_spec spec;
  spec.kind = model_kind::hubbard_chain;
  spec.t = 1.0;
  spec.u = u;
  spec.sites = 4;
  return generate_model(spec);
}

// Dense reference for the 2p1h ladder amplitudes. Composite indices over
// (a, b, i) with the same Jacobi splitting, but assembled as explicit
// matrices and iterated with Eigen products.
struct dense_u {
  std::vector<int> occ, vir;
  int no, nv, dim;
  Eigen::VectorXd d;      // denominators
  Eigen::VectorXd rhs0;   // bare couplings
  Eigen::MatrixXd k;      // ring + ladder kernel acting on u

  int idx(int a, int b, int i) const { return (a * nv + b) * no + i; }

  dense_u(const integral_set& s, double w, int p) {
    occ = s.occupied();
    vir = s.virtuals();
    no = static_cast<int>(occ.size());
    nv = static_cast<int>(vir.size());
    dim = nv * nv * no;
    d.resize(dim);
    rhs0.resize(dim);
    k = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b)
        for (int i = 0; i < no; ++i) {
          int row = idx(a, b, i);
          d[row] = w + s.eps[occ[i]] - s.eps[vir[a]] - s.eps[vir[b]];
          rhs0[row] = s.vas(vir[a], vir[b], p, occ[i]);
          for (int c = 0; c < nv; ++c) {
            for (int kk = 0; kk < no; ++kk) {
              // -P(ab) sum_{ck} <ak||ci> u_{cb,k}
              k(row, idx(c, b, kk)) -= s.vas(vir[a], occ[kk], vir[c], occ[i]);
              k(row, idx(c, a, kk)) += s.vas(vir[b], occ[kk], vir[c], occ[i]);
            }
            for (int dd = 0; dd < nv; ++dd)
              k(row, idx(c, dd, i)) += 0.5 * s.vas(vir[a], vir[b], vir[c], vir[dd]);
          }
        }
  }

  // one bare substitution plus n extra cycles
  Eigen::VectorXd iterate(int cycles) const {
    Eigen::VectorXd u = rhs0.cwiseQuotient(d);
    for (int c = 0; c < cycles; ++c) u = (rhs0 + k * u).cwiseQuotient(d);
    return u;
  }
};

}  // namespace

TEST_CASE("seed assembly reproduces the second order matrix bitwise") {
  for (int which : {0, 1}) {
    integral_set s = which == 0 ? dimer() : chain4();
    for (double w : {-1.25, 0.6, 2.45}) {
      tda_amplitudes amps = tda2_iterate(s, w, 0);
      Eigen::MatrixXd tda = tda2_sigma(s, amps);
      Eigen::MatrixXd ref = sigma2_analytic(s, w);
      for (int p = 0; p < s.m; ++p)
        for (int q = 0; q < s.m; ++q) CHECK(tda(p, q) == ref(p, q));
    }
  }
}

TEST_CASE("amplitudes match a dense jacobi reference") {
  integral_set s = chain4(1.0);
  const double w = 0.37;
  for (int cycles : {0, 1, 3}) {
    tda_amplitudes amps = tda2_iterate(s, w, cycles);
    for (int p : {0, 3, 6}) {
      dense_u ref(s, w, p);
      Eigen::VectorXd u = ref.iterate(cycles);
      for (int a = 0; a < ref.nv; ++a)
        for (int b = 0; b < ref.nv; ++b)
          for (int i = 0; i < ref.no; ++i) {
            double got = amps.u_at(p, a, b, i);
            double want = u[ref.idx(a, b, i)];
            CHECK(got == doctest::Approx(want).epsilon(1e-11));
          }
    }
  }
}

TEST_CASE("amplitude antisymmetry survives iteration") {
  integral_set s = chain4();
  tda_amplitudes amps = tda2_iterate(s, 0.45, 4);
  for (int p = 0; p < s.m; ++p)
    for (int a = 0; a < amps.nv; ++a)
      for (int b = 0; b < amps.nv; ++b)
        for (int i = 0; i < amps.no; ++i) {
          double uab = amps.u_at(p, a, b, i);
          double uba = amps.u_at(p, b, a, i);
          CHECK(uab == doctest::Approx(-uba).epsilon(1e-12));
          if (a == b) CHECK(std::abs(uab) <= 1e-13);
        }
}

TEST_CASE("denominator collision raises") {
  integral_set s = dimer();
  // 2p1h denominator zero at w = eps_a + eps_b - eps_i = 4 with live coupling
  CHECK_THROWS_AS(tda2_iterate(s, 4.0, 1), numerical_error);
  CHECK_NOTHROW(tda2_iterate(s, 3.9, 1));
}

TEST_CASE("tda evaluator carries cycle independent singularities") {
  integral_set s = chain4();
  auto ev0 = make_tda_evaluator(s, 0, -6.0, 6.0);
  auto ev9 = make_tda_evaluator(s, 9, -6.0, 6.0);
  auto ref = sigma2_singularities(s);
  REQUIRE(ev0.singularities.size() == ref.size());
  REQUIRE(ev9.singularities.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(ev0.singularities[i] == ref[i]);
    CHECK(ev9.singularities[i] == ref[i]);
  }
  CHECK_FALSE(ev0.monotone_diagonal);
  CHECK(ev0.provenance == "tda2");
  CHECK_FALSE(static_cast<bool>(ev0.deriv));
  CHECK_FALSE(static_cast<bool>(ev0.diag_deriv));
  // diagonal fast path equals the full assembly
  for (double w : {-1.1, 0.63}) {
    tda_amplitudes amps = tda2_iterate(s, w, 3);
    Eigen::MatrixXd full = tda2_sigma(s, amps);
    auto ev3 = make_tda_evaluator(s, 3, -6.0, 6.0);
    for (int q = 0; q < s.m; ++q)
      CHECK(ev3.diag(q, w) == doctest::Approx(full(q, q)).epsilon(1e-13));
  }
}

TEST_CASE("scgf2 seed state") {
  integral_set s = dimer();
  sc_pole_state seed = scgf2_seed(s);
  CHECK(seed.cycle == -1);
  CHECK(seed.m == s.m);
  CHECK(seed.total_poles() == s.m);
  auto occ = s.occupied();
  for (int q = 0; q < s.m; ++q) {
    REQUIRE(seed.orbitals[q].size() == 1);
    CHECK(seed.orbitals[q][0].omega == s.eps[q]);
    CHECK(seed.orbitals[q][0].residue == 1.0);
    bool is_occ = std::find(occ.begin(), occ.end(), q) != occ.end();
    CHECK(seed.orbitals[q][0].hole == is_occ);
  }
  auto sums = seed.orbital_residue_sums();
  for (double x : sums) CHECK(x == 1.0);
}

TEST_CASE("seed evaluator is bitwise second order") {
  for (int which : {0, 1}) {
    integral_set s = which == 0 ? dimer() : chain4();
    sc_pole_state seed = scgf2_seed(s);
    scgf2_options opt;
    opt.lo = -8.0;
    opt.hi = 8.0;
    opt.scan.lo = -8.0;
    opt.scan.hi = 8.0;
    auto ev = make_scgf2_evaluator(s, seed, opt);
    CHECK(ev.monotone_diagonal);
    CHECK(ev.provenance == "scgf2");
    for (double w : {-1.35, 0.55, 2.7})
      for (int q = 0; q < s.m; ++q) CHECK(ev.diag(q, w) == sigma2_diag(s, q, w));
    // singularities match the coupling filtered second-order set
    auto ref = sigma2_singularities(s);
    REQUIRE(ev.singularities.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(ev.singularities[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("scgf2 derivative consistency") {
  integral_set s = dimer();
  sc_pole_state seed = scgf2_seed(s);
  scgf2_options opt;
  opt.lo = -8.0;
  opt.hi = 8.0;
  auto ev = make_scgf2_evaluator(s, seed, opt);
  for (double w : {-0.9, 0.8}) {
    double fd = (ev.diag(0, w + 1e-6) - ev.diag(0, w - 1e-6)) / 2e-6;
    CHECK(ev.diag_deriv(0, w) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(ev.diag_deriv(0, w) < 0.0);
  }
}

TEST_CASE("first cycle on the dimer") {
  integral_set s = dimer();
  scgf2_options opt;
  opt.lo = -6.0;
  opt.hi = 8.0;
  opt.scan.lo = -6.0;
  opt.scan.hi = 8.0;
  sc_pole_state seed = scgf2_seed(s);
  scgf2_cycle_result r0 = scgf2_cycle(s, seed, opt);
  CHECK(r0.state.cycle == 0);
  // one singularity per orbital splits each line into two poles
  CHECK(r0.state.total_poles() == 2 * s.m);
  for (int q = 0; q < s.m; ++q) {
    REQUIRE(r0.state.orbitals[q].size() == 2);
    CHECK(r0.state.orbitals[q][0].hole);
    CHECK_FALSE(r0.state.orbitals[q][1].hole);
  }
  CHECK(r0.max_orbital_residue_excess <= 1e-6);
  auto sums = r0.state.orbital_residue_sums();
  for (double x : sums) CHECK(x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r0.term_count > 0);
  CHECK(r0.skipped_weight >= 0.0);

  scgf2_cycle_result r1 = scgf2_cycle(s, r0.state, opt);
  CHECK(r1.state.cycle == 1);
  CHECK(r1.state.total_poles() >= r0.state.total_poles());
  for (auto x : r1.state.orbital_residue_sums()) CHECK(x == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("guards") {
  integral_set s = chain4();
  sc_pole_state seed = scgf2_seed(s);
  scgf2_options opt;
  opt.lo = -8.0;
  opt.hi = 8.0;
  opt.scan.lo = -8.0;
  opt.scan.hi = 8.0;
  scgf2_options tight = opt;
  tight.pole_cap = 2;
  CHECK_THROWS_AS(scgf2_cycle(s, seed, tight), numerical_error);
  scgf2_options tiny = opt;
  tiny.term_cap = 1;
  CHECK_THROWS_AS(scgf2_cycle(s, seed, tiny), numerical_error);
}

TEST_CASE("pruning") {
  integral_set s = dimer();
  scgf2_options opt;
  opt.lo = -6.0;
  opt.hi = 8.0;
  opt.scan.lo = -6.0;
  opt.scan.hi = 8.0;
  sc_pole_state state = scgf2_cycle(s, scgf2_seed(s), opt).state;
  sc_pole_state same = prune_poles(state, 0.0);
  CHECK(same.total_poles() == state.total_poles());
  CHECK(same.cycle == state.cycle);
  sc_pole_state top = prune_poles(state, 1.0);
  CHECK(top.total_poles() == s.m);  // only the largest residue per orbital
  for (int q = 0; q < s.m; ++q) {
    double best = 0.0;
    for (const auto& p : state.orbitals[q]) best = std::max(best, p.residue);
    REQUIRE(top.orbitals[q].size() == 1);
    CHECK(top.orbitals[q][0].residue == best);
  }
}
