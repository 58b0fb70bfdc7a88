#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mbgf/errors.hpp"
#include "mbgf/taylor_model.hpp"

using namespace mbgf;

TEST_CASE("default poles and validation") {
  model_poles mp = model_poles::defaults();
  REQUIRE(mp.poles.size() == 4);
  CHECK(mp.poles[0].at(0.0) == doctest::Approx(1.9));
  CHECK(mp.poles[0].at(1.0) == doctest::Approx(2.3));
  CHECK(mp.poles[1].at(1.0) == doctest::Approx(0.95));
  CHECK(mp.poles[2].at(1.0) == doctest::Approx(-1.3));
  CHECK(mp.poles[3].at(1.0) == doctest::Approx(-2.5));
  CHECK_NOTHROW(mp.validate());
  model_poles bad = mp;
  bad.poles[1] = bad.poles[0];
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("exact evaluation") {
  model_poles mp = model_poles::defaults();
  // hand summed at the uncoupled point
  double ref0 = -1.0 / 1.9 - 1.0 / 0.75 + 1.0 / 1.1 + 1.0 / 2.2;
  CHECK(model_g(mp, 0.0, 0.0) == doctest::Approx(ref0).epsilon(1e-14));
  CHECK(model_g(mp, 0.0, 0.0) == doctest::Approx(-0.4960127592).epsilon(1e-9));
  double ref1 = -1.0 / 2.3 - 1.0 / 0.95 + 1.0 / 1.3 + 1.0 / 2.5;
  CHECK(model_g(mp, 0.0, 1.0) == doctest::Approx(ref1).epsilon(1e-14));
  CHECK_THROWS_AS(model_g(mp, 2.3, 1.0), numerical_error);
}

TEST_CASE("series coefficients by finite differences") {
  model_poles mp = model_poles::defaults();
  for (double w : {0.0, 0.3, -0.6}) {
    std::vector<double> c = taylor_coefficients(mp, w, 6);
    REQUIRE(c.size() == 7);
    CHECK(c[0] == doctest::Approx(model_g(mp, w, 0.0)).epsilon(1e-13));
    const double h = 1e-3;
    auto g = [&](double lam) { return model_g(mp, w, lam); };
    double d1 = (g(h) - g(-h)) / (2 * h);
    double d2 = (g(h) - 2 * g(0) + g(-h)) / (h * h);
    double d3 = (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h);
    double d4 = (g(2 * h) - 4 * g(h) + 6 * g(0) - 4 * g(-h) + g(-2 * h)) / (h * h * h * h);
    CHECK(c[1] == doctest::Approx(d1).epsilon(1e-6));
    CHECK(c[2] == doctest::Approx(d2 / 2.0).epsilon(1e-6));
    CHECK(c[3] == doctest::Approx(d3 / 6.0).epsilon(1e-4));
    CHECK(c[4] == doctest::Approx(d4 / 24.0).epsilon(1e-3));
  }
}

TEST_CASE("single linear pole gives a geometric series") {
  model_poles mp;
  mp.poles.push_back({1.7, 0.4, 0.0});
  const double w = 0.2;
  std::vector<double> c = taylor_coefficients(mp, w, 12);
  const double d0 = w - 1.7;
  for (int n = 0; n <= 12; ++n) {
    double ref = std::pow(0.4 / d0, n) / d0;
    CHECK(c[n] == doctest::Approx(ref).epsilon(1e-12));
  }
  // partial sums approach the closed form inside the radius
  double exact = model_g(mp, w, 1.0);
  double s12 = taylor_partial_sum(c, 12, 1.0);
  CHECK(std::abs(s12 - exact) <= std::abs(std::pow(0.4 / d0, 13) / d0) / (1.0 - 0.4 / 1.5) + 1e-15);
}

TEST_CASE("partial sums accumulate in ascending order") {
  model_poles mp = model_poles::defaults();
  std::vector<double> c = taylor_coefficients(mp, 0.1, 8);
  double acc = 0.0, pw = 1.0;
  const double lam = 0.77;
  for (int n = 0; n <= 8; ++n) {
    acc += c[n] * pw;
    pw *= lam;
    CHECK(taylor_partial_sum(c, n, lam) == doctest::Approx(acc).epsilon(1e-15));
  }
}

TEST_CASE("classification at landmark frequencies") {
  model_poles mp = model_poles::defaults();
  CHECK(classify_series(mp, 0.0, 25) == series_class::convergent);
  CHECK(classify_series(mp, 0.85, 25) == series_class::divergent);
  // terminal regions beyond the coupled pole span converge
  CHECK(classify_series(mp, -2.6, 25) == series_class::convergent);
  CHECK(classify_series(mp, -3.0, 25) == series_class::convergent);
  CHECK(classify_series(mp, 2.4, 25) == series_class::convergent);
  CHECK(classify_series(mp, 3.0, 25) == series_class::convergent);
  CHECK_THROWS_AS(classify_series(mp, 0.0, 5), validation_error);
}

TEST_CASE("order nineteen behavior") {
  model_poles mp = model_poles::defaults();
  std::vector<double> c19 = taylor_coefficients(mp, 0.0, 19);
  double exact = model_g(mp, 0.0, 1.0);
  CHECK(std::abs(taylor_partial_sum(c19, 19, 1.0) - exact) <= 1e-6);
  std::vector<double> cd = taylor_coefficients(mp, 0.85, 19);
  double exd = model_g(mp, 0.85, 1.0);
  double err19 = std::abs(taylor_partial_sum(cd, 19, 1.0) - exd);
  double err11 = std::abs(taylor_partial_sum(cd, 11, 1.0) - exd);
  CHECK(err19 > err11);
}

TEST_CASE("grid construction") {
  auto g = make_model_grid(-3.0, 3.0, 0.05);
  REQUIRE(g.size() == 121);
  CHECK(g.front() == doctest::Approx(-3.0));
  CHECK(g.back() == doctest::Approx(3.0));
  CHECK(g[60] == doctest::Approx(0.0));
}

TEST_CASE("convergence map") {
  model_poles mp = model_poles::defaults();
  convergence_map_result map = convergence_map(mp, -3.0, 3.0, 0.05, 25);
  CHECK(map.entries.size() + map.skipped.size() == 121);
  // grid points that land on a pole position are skipped
  bool skipped_075 = false;
  for (double x : map.skipped) skipped_075 = skipped_075 || std::abs(x - 0.75) < 1e-9;
  CHECK(skipped_075);
  CHECK(map.terminal_low_convergent);
  CHECK(map.terminal_high_convergent);
  REQUIRE(map.has_central);
  // analysis of the complex root pairs puts the central region near
  // (-1.0, 0.65); the grid measurement must stay within one cell of that
  CHECK(map.central_lo == doctest::Approx(-0.95).epsilon(1e-9));
  CHECK(map.central_hi == doctest::Approx(0.6).epsilon(1e-9));
  // entries carry exact values for kept points
  for (const auto& e : map.entries)
    if (std::abs(e.omega) < 1e-12) CHECK(e.exact_g == doctest::Approx(model_g(mp, 0.0, 1.0)));
}
