#include "mbgf/fci.hpp"

#include <bit>

#include "mbgf/errors.hpp"

namespace mbgf {

namespace {

// Occupied orbital list of a mask, ascending.
inline void occ_list(std::uint64_t mask, int* out, int& n) {
  n = 0;
  while (mask) {
    out[n++] = std::countr_zero(mask);
    mask &= mask - 1;
  }
}

double slater_condon(const integral_set& ints, const determinant& a, const determinant& b) {
  std::uint64_t diff = a.mask ^ b.mask;
  int degree = std::popcount(diff) / 2;
  if (degree > 2) return 0.0;

  int occ[64], nocc;
  if (degree == 0) {
    occ_list(a.mask, occ, nocc);
    double e = 0.0;
    for (int x = 0; x < nocc; ++x) e += ints.hcore(occ[x], occ[x]);
    for (int x = 0; x < nocc; ++x)
      for (int y = x + 1; y < nocc; ++y) e += ints.vas(occ[x], occ[y], occ[x], occ[y]);
    return e;
  }
  if (degree == 1) {
    int p = std::countr_zero(a.mask & diff);
    int r = std::countr_zero(b.mask & diff);
    double e = ints.hcore(p, r);
    std::uint64_t common = a.mask & b.mask;
    occ_list(common, occ, nocc);
    for (int x = 0; x < nocc; ++x) e += ints.vas(p, occ[x], r, occ[x]);
    return fermi_sign(a.mask, p) * fermi_sign(b.mask, r) * e;
  }
  // Double excitation p<q -> r<s.
  std::uint64_t ad = a.mask & diff, bd = b.mask & diff;
  int p = std::countr_zero(ad);
  int q = std::countr_zero(ad & (ad - 1));
  int r = std::countr_zero(bd);
  int s = std::countr_zero(bd & (bd - 1));
  int sign = fermi_sign(a.mask, p) * fermi_sign(a.mask & ~(1ull << p), q) *
             fermi_sign(b.mask, r) * fermi_sign(b.mask & ~(1ull << r), s);
  return sign * ints.vas(p, q, r, s);
}

double h0_energy(const integral_set& ints, std::uint64_t mask) {
  double e = 0.0;
  while (mask) {
    e += ints.eps[std::countr_zero(mask)];
    mask &= mask - 1;
  }
  return e;
}

}  // namespace

double hamiltonian_element(const integral_set& ints, const determinant& a, const determinant& b,
                           double lambda) {
  double e = lambda * slater_condon(ints, a, b);
  if (a.mask == b.mask) e += (1.0 - lambda) * h0_energy(ints, a.mask);
  return e;
}

Eigen::MatrixXd build_hamiltonian(const integral_set& ints, const std::vector<determinant>& dets,
                                  double lambda, int max_dim) {
  const int n = static_cast<int>(dets.size());
  if (n > max_dim)
    throw numerical_error("sector dimension " + std::to_string(n) + " exceeds the cap " +
                          std::to_string(max_dim));
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double e = hamiltonian_element(ints, dets[i], dets[j], lambda);
      h(i, j) = e;
      h(j, i) = e;
    }
  return h;
}

sector_spectrum diagonalize_sector(const integral_set& ints, std::vector<determinant> dets,
                                   double lambda, int max_dim) {
  sector_spectrum out;
  out.lambda = lambda;
  out.dets = std::move(dets);
  if (out.dets.empty()) {
    out.energies = Eigen::VectorXd::Zero(0);
    out.vectors = Eigen::MatrixXd::Zero(0, 0);
    return out;
  }
  Eigen::MatrixXd h = build_hamiltonian(ints, out.dets, lambda, max_dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw numerical_error("sector diagonalization failed");
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

}  // namespace mbgf
