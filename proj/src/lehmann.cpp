#include "mbgf/lehmann.hpp"

#include <algorithm>
#include <cmath>

#include "mbgf/errors.hpp"

namespace mbgf {

double pole_set::trace_sum() const {
  double s = 0.0;
  for (const auto& p : poles) s += p.weight.trace();
  return s;
}

std::vector<int> pole_set::orbital_poles(int q, double floor) const {
  std::vector<int> idx;
  for (std::size_t k = 0; k < poles.size(); ++k)
    if (poles[k].weight(q, q) > floor) idx.push_back(static_cast<int>(k));
  return idx;
}

namespace {

int find_det(const std::vector<determinant>& dets, std::uint64_t mask) {
  auto it = std::lower_bound(dets.begin(), dets.end(), mask,
                             [](const determinant& d, std::uint64_t m) { return d.mask < m; });
  if (it == dets.end() || it->mask != mask) return -1;
  return static_cast<int>(it - dets.begin());
}

// Transition amplitudes <Psi_K | op_p | Psi0> for every eigenstate K of one
// target-sector block; op is a_p (removal) or a_p^dag (attachment).
Eigen::MatrixXd amplitudes(const integral_set& ints, const sector_spectrum& ground, int ground_col,
                           const sector_spectrum& target, bool removal) {
  const int m = ints.m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<int>(target.dets.size()), m);
  for (std::size_t d = 0; d < ground.dets.size(); ++d) {
    double c = ground.vectors(static_cast<int>(d), ground_col);
    if (c == 0.0) continue;
    std::uint64_t mask = ground.dets[d].mask;
    for (int p = 0; p < m; ++p) {
      bool occ = (mask >> p) & 1u;
      if (removal != occ) continue;
      std::uint64_t image = removal ? (mask & ~(1ull << p)) : (mask | (1ull << p));
      int row = find_det(target.dets, image);
      if (row < 0) continue;
      a(row, p) += fermi_sign(mask, p) * c;
    }
  }
  return target.vectors.transpose() * a;
}

void collect_poles(std::vector<spectral_pole>& out, const sector_spectrum& target,
                   const Eigen::MatrixXd& t, double e0, bool hole, double weight_floor) {
  for (int k = 0; k < target.energies.size(); ++k) {
    Eigen::VectorXd amp = t.row(k);
    double tr = amp.squaredNorm();
    if (tr < weight_floor) continue;  // no one-particle coupling: not a pole of G
    spectral_pole p;
    p.omega = hole ? (e0 - target.energies[k]) : (target.energies[k] - e0);
    p.weight = amp * amp.transpose();
    p.hole = hole;
    out.push_back(std::move(p));
  }
}

std::vector<spectral_pole> merge_poles(std::vector<spectral_pole> poles, double merge_tol) {
  std::stable_sort(poles.begin(), poles.end(), [](const spectral_pole& a, const spectral_pole& b) {
    if (a.omega != b.omega) return a.omega < b.omega;
    return a.hole && !b.hole;
  });
  std::vector<spectral_pole> merged;
  for (auto& p : poles) {
    if (!merged.empty() && merged.back().hole == p.hole &&
        p.omega - merged.back().omega <= merge_tol) {
      merged.back().weight += p.weight;
    } else {
      merged.push_back(std::move(p));
    }
  }
  return merged;
}

}  // namespace

lehmann_data build_lehmann(const integral_set& ints, double lambda, int max_dim, double merge_tol,
                           double weight_floor) {
  ints.validate();
  const int ms2 = ints.spatial.norb > 0 ? ints.spatial.ms2 : 0;

  auto ground_dets = enumerate_sector(ints.m, ints.n_e, ms2);
  if (ground_dets.empty()) throw validation_error("empty ground sector");
  sector_spectrum ground = diagonalize_sector(ints, std::move(ground_dets), lambda, max_dim);

  lehmann_data out;
  out.lambda = lambda;
  out.n_e = ints.n_e;
  out.e0 = ground.energies[0];
  out.e0_total = out.e0 + ints.e_nuc;
  out.ground_degenerate =
      ground.energies.size() > 1 && ground.energies[1] - ground.energies[0] < 1e-8;

  std::vector<spectral_pole> poles;
  for (int dsz : {-1, +1}) {
    auto dets = enumerate_sector(ints.m, ints.n_e - 1, ms2 + dsz);
    if (dets.empty()) continue;
    sector_spectrum target = diagonalize_sector(ints, std::move(dets), lambda, max_dim);
    Eigen::MatrixXd t = amplitudes(ints, ground, 0, target, true);
    collect_poles(poles, target, t, out.e0, true, weight_floor);
  }
  for (int dsz : {-1, +1}) {
    if (ints.n_e + 1 > ints.m) break;
    auto dets = enumerate_sector(ints.m, ints.n_e + 1, ms2 + dsz);
    if (dets.empty()) continue;
    sector_spectrum target = diagonalize_sector(ints, std::move(dets), lambda, max_dim);
    Eigen::MatrixXd t = amplitudes(ints, ground, 0, target, false);
    collect_poles(poles, target, t, out.e0, false, weight_floor);
  }

  out.poles.m = ints.m;
  out.poles.poles = merge_poles(std::move(poles), merge_tol);
  return out;
}

Eigen::MatrixXd lehmann_green(const pole_set& ps, double omega) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ps.m, ps.m);
  for (const auto& p : ps.poles) {
    double d = omega - p.omega;
    if (std::abs(d) < 1e-13)
      throw numerical_error("frequency collides with a pole at " + std::to_string(p.omega));
    g += p.weight / d;
  }
  return g;
}

Eigen::MatrixXd lehmann_green_derivative(const pole_set& ps, double omega) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ps.m, ps.m);
  for (const auto& p : ps.poles) {
    double d = omega - p.omega;
    if (std::abs(d) < 1e-13)
      throw numerical_error("frequency collides with a pole at " + std::to_string(p.omega));
    g -= p.weight / (d * d);
  }
  return g;
}

}  // namespace mbgf
