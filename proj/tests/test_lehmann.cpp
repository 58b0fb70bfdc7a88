#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mbgf/errors.hpp"
#include "mbgf/exact_sigma.hpp"
#include "mbgf/lehmann.hpp"
#include "mbgf/models.hpp"

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

}  // namespace

TEST_CASE("dimer spectrum and poles") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 1.0);
  const double r5 = std::sqrt(5.0);
  CHECK(ld.e0 == doctest::Approx(1.0 - r5).epsilon(1e-12));
  CHECK(ld.e0_total == doctest::Approx(1.0 - r5).epsilon(1e-12));
  CHECK(ld.n_e == 2);
  CHECK_FALSE(ld.ground_degenerate);

  // bonding orbitals see {2 - r5, 2 + r5}; antibonding see {-r5, r5}
  auto bonding = ld.poles.orbital_poles(0);
  REQUIRE(bonding.size() == 2);
  CHECK(ld.poles.poles[bonding[0]].omega == doctest::Approx(2.0 - r5).epsilon(1e-10));
  CHECK(ld.poles.poles[bonding[1]].omega == doctest::Approx(2.0 + r5).epsilon(1e-10));
  CHECK(ld.poles.poles[bonding[0]].hole);
  CHECK_FALSE(ld.poles.poles[bonding[1]].hole);

  auto anti = ld.poles.orbital_poles(2);
  REQUIRE(anti.size() == 2);
  CHECK(ld.poles.poles[anti[0]].omega == doctest::Approx(-r5).epsilon(1e-10));
  CHECK(ld.poles.poles[anti[1]].omega == doctest::Approx(r5).epsilon(1e-10));
  CHECK(ld.poles.poles[anti[0]].hole);
  CHECK_FALSE(ld.poles.poles[anti[1]].hole);

  for (std::size_t k = 1; k < ld.poles.poles.size(); ++k)
    CHECK(ld.poles.poles[k - 1].omega <= ld.poles.poles[k].omega);
}

TEST_CASE("completeness") {
  for (int which : {0, 1}) {
    integral_set s = which == 0 ? dimer() : chain4();
    lehmann_data ld = build_lehmann(s, 1.0);
    CHECK(ld.poles.trace_sum() == doctest::Approx(s.m).epsilon(1e-9));
    // per-orbital weights close to 1
    for (int q = 0; q < s.m; ++q) {
      double wq = 0.0;
      for (const auto& p : ld.poles.poles) wq += p.weight(q, q);
      CHECK(wq == doctest::Approx(1.0).epsilon(1e-9));
    }
    // weights are symmetric PSD
    for (const auto& p : ld.poles.poles) {
      CHECK((p.weight - p.weight.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.weight);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("interpolated propagator at zero coupling") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 0.0);
  // lambda = 0 poles sit at the orbital energies with unit weight
  for (int q = 0; q < s.m; ++q) {
    auto idx = ld.poles.orbital_poles(q);
    REQUIRE(idx.size() == 1);
    CHECK(ld.poles.poles[idx[0]].omega == doctest::Approx(s.eps[q]).epsilon(1e-10));
    CHECK(ld.poles.poles[idx[0]].weight(q, q) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("green evaluation and derivative") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 1.0);
  const double w = 0.7;
  Eigen::MatrixXd g = lehmann_green(ld.poles, w);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(s.m, s.m);
  for (const auto& p : ld.poles.poles) ref += p.weight / (w - p.omega);
  CHECK((g - ref).cwiseAbs().maxCoeff() <= 1e-13);

  const double h = 1e-6;
  Eigen::MatrixXd fd =
      (lehmann_green(ld.poles, w + h) - lehmann_green(ld.poles, w - h)) / (2.0 * h);
  Eigen::MatrixXd an = lehmann_green_derivative(ld.poles, w);
  CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-5);

  CHECK_THROWS_AS(lehmann_green(ld.poles, ld.poles.poles[0].omega + 1e-14), numerical_error);
}

TEST_CASE("self energy inverts the propagator") {
  integral_set s = chain4();
  lehmann_data ld = build_lehmann(s, 1.0);
  exact_self_energy se(s, ld);
  for (double w : {-1.3, 0.4, 1.9, 3.3}) {
    Eigen::MatrixXd sig = se.sigma(w);
    CHECK((sig - sig.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    Eigen::MatrixXd inv_g =
        (w * Eigen::MatrixXd::Identity(s.m, s.m) - Eigen::MatrixXd(s.eps.asDiagonal()) - sig);
    Eigen::MatrixXd g = lehmann_green(ld.poles, w);
    Eigen::MatrixXd id = inv_g * g;
    CHECK((id - Eigen::MatrixXd::Identity(s.m, s.m)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("dimer self energy singularities") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 1.0);
  exact_self_energy se(s, ld);
  auto sb = se.singularities_diagonal(0, -8.0, 8.0);
  REQUIRE(sb.size() == 1);
  CHECK(sb[0] == doctest::Approx(4.0).epsilon(1e-8));
  auto sa = se.singularities_diagonal(2, -8.0, 8.0);
  REQUIRE(sa.size() == 1);
  CHECK(sa[0] == doctest::Approx(-2.0).epsilon(1e-8));
  auto sm = se.singularities_matrix(-8.0, 8.0);
  REQUIRE(sm.size() == 2);
  CHECK(sm[0] == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(sm[1] == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("self energy derivative") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 1.0);
  exact_self_energy se(s, ld);
  const double w = 0.9, h = 1e-6;
  Eigen::MatrixXd fd = (se.sigma(w + h) - se.sigma(w - h)) / (2.0 * h);
  Eigen::MatrixXd an = se.sigma_derivative(w);
  CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("condition cap near a propagator zero") {
  integral_set s = dimer();
  lehmann_data ld = build_lehmann(s, 1.0);
  exact_self_energy se(s, ld);
  CHECK_THROWS_AS(se.sigma(4.0 + 1e-14), numerical_error);
}
