#include "mbgf/exact_sigma.hpp"

#include <cmath>

#include "mbgf/errors.hpp"

namespace mbgf {

exact_self_energy::exact_self_energy(integral_set ints, lehmann_data data)
    : ints_(std::move(ints)), data_(std::move(data)) {}

Eigen::MatrixXd exact_self_energy::green(double w) const {
  return lehmann_green(data_.poles, w);
}

static Eigen::MatrixXd invert_guarded(const Eigen::MatrixXd& g, double cap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const auto& ev = es.eigenvalues();
  double lo = ev.cwiseAbs().minCoeff(), hi = ev.cwiseAbs().maxCoeff();
  if (lo == 0.0 || hi / lo > cap)
    throw numerical_error("propagator is numerically singular (condition " +
                          std::to_string(lo == 0.0 ? 0.0 : hi / lo) + ")");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd exact_self_energy::sigma(double w) const {
  Eigen::MatrixXd ginv = invert_guarded(green(w), condition_cap);
  Eigen::MatrixXd s = -ginv;
  s += w * Eigen::MatrixXd::Identity(m(), m());
  s -= ints_.eps.asDiagonal();
  return s;
}

Eigen::MatrixXd exact_self_energy::sigma_derivative(double w) const {
  Eigen::MatrixXd ginv = invert_guarded(green(w), condition_cap);
  Eigen::MatrixXd gp = lehmann_green_derivative(data_.poles, w);
  return Eigen::MatrixXd::Identity(m(), m()) + ginv * gp * ginv;
}

Eigen::MatrixXd exact_self_energy::sigma_derivative_averaged(double w, double off) const {
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      return 0.5 * (sigma_derivative(w + off) + sigma_derivative(w - off));
    } catch (const numerical_error&) {
      off *= 10.0;  // sitting on a pole or a zero of G; widen
    }
  }
  return 0.5 * (sigma_derivative(w + off) + sigma_derivative(w - off));
}

namespace {

// Bisection for a continuous monotone-decreasing scalar on [a, b] with
// f(a) > 0 > f(b).
template <typename F>
double bisect_decreasing(F f, double a, double b) {
  double fa = f(a);
  double fb = f(b);
  if (!(fa > 0.0 && fb < 0.0)) return 0.5 * (a + b);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    double mid = 0.5 * (a + b);
    double fm = f(mid);
    if (fm > 0.0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> exact_self_energy::singularities_matrix(double lo, double hi) const {
  const auto& poles = data_.poles.poles;
  std::vector<double> out;
  auto sorted_eigs = [&](double w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(green(w));
    return Eigen::VectorXd(es.eigenvalues());
  };
  for (std::size_t k = 0; k + 1 < poles.size(); ++k) {
    double a = poles[k].omega, b = poles[k + 1].omega;
    if (b < lo || a > hi) continue;
    double gap = b - a;
    if (gap < 1e-9) continue;
    double da = a + std::max(1e-10, gap * 1e-6);
    double db = b - std::max(1e-10, gap * 1e-6);
    Eigen::VectorXd ea = sorted_eigs(da), eb = sorted_eigs(db);
    for (int j = 0; j < ea.size(); ++j) {
      if (!(ea[j] > 0.0 && eb[j] < 0.0)) continue;
      double z = bisect_decreasing([&](double w) { return sorted_eigs(w)[j]; }, da, db);
      if (z >= lo && z <= hi) out.push_back(z);
    }
  }
  std::sort(out.begin(), out.end());
  // A degenerate zero of several eigenvalues is one singular frequency.
  std::vector<double> dedup;
  for (double s : out)
    if (dedup.empty() || s - dedup.back() > 1e-10) dedup.push_back(s);
  return dedup;
}

std::vector<double> exact_self_energy::singularities_diagonal(int q, double lo, double hi,
                                                              double weight_floor) const {
  const auto& poles = data_.poles.poles;
  std::vector<int> idx = data_.poles.orbital_poles(q, weight_floor);
  auto gqq = [&](double w) {
    double g = 0.0;
    for (const auto& p : poles) g += p.weight(q, q) / (w - p.omega);
    return g;
  };
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    double a = poles[idx[k]].omega, b = poles[idx[k + 1]].omega;
    if (b < lo || a > hi) continue;
    double gap = b - a;
    if (gap < 1e-9) continue;
    double da = a + std::max(1e-10, gap * 1e-6);
    double db = b - std::max(1e-10, gap * 1e-6);
    if (!(gqq(da) > 0.0 && gqq(db) < 0.0)) continue;
    double z = bisect_decreasing(gqq, da, db);
    if (z >= lo && z <= hi) out.push_back(z);
  }
  return out;
}

}  // namespace mbgf
