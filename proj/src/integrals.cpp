#include "mbgf/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbgf/errors.hpp"

namespace mbgf {

void spatial_integrals::allocate() {
  hcore = Eigen::MatrixXd::Zero(norb, norb);
  eri.assign(static_cast<std::size_t>(norb) * norb * norb * norb, 0.0);
}

void spatial_integrals::eri_set(int i, int j, int k, int l, double v) {
  eri[eri_index(i, j, k, l)] = v;
  eri[eri_index(j, i, k, l)] = v;
  eri[eri_index(i, j, l, k)] = v;
  eri[eri_index(j, i, l, k)] = v;
  eri[eri_index(k, l, i, j)] = v;
  eri[eri_index(l, k, i, j)] = v;
  eri[eri_index(k, l, j, i)] = v;
  eri[eri_index(l, k, j, i)] = v;
}

std::vector<int> integral_set::occupied() const {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return eps[a] < eps[b]; });
  idx.resize(n_e);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<int> integral_set::virtuals() const {
  std::vector<int> occ = occupied();
  std::vector<bool> is_occ(m, false);
  for (int p : occ) is_occ[p] = true;
  std::vector<int> vir;
  for (int p = 0; p < m; ++p)
    if (!is_occ[p]) vir.push_back(p);
  return vir;
}

double integral_set::fermi_level() const {
  std::vector<double> e(eps.data(), eps.data() + m);
  std::sort(e.begin(), e.end());
  return 0.5 * (e[n_e - 1] + e[n_e]);
}

void integral_set::validate() const {
  if (m <= 0 || m > 64) throw validation_error("spin-orbital count out of range");
  if (n_e <= 0 || n_e >= m) throw validation_error("electron count out of range");
  if (eps.size() != m || hcore.rows() != m || hcore.cols() != m)
    throw validation_error("inconsistent integral dimensions");
  if (v.size() != static_cast<std::size_t>(m) * m * m * m)
    throw validation_error("two-electron array has wrong size");
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q)
      if (std::abs(hcore(p, q) - hcore(q, p)) > 1e-12)
        throw validation_error("one-electron matrix not symmetric");
}

integral_set expand_to_spin(const spatial_integrals& sp) {
  if (sp.norb <= 0) throw validation_error("empty spatial integral set");
  integral_set out;
  out.m = 2 * sp.norb;
  out.n_e = sp.nelec;
  out.e_nuc = sp.e_nuc;
  out.spatial = sp;

  out.labels.resize(out.m);
  for (int p = 0; p < out.m; ++p) out.labels[p] = {p / 2, p % 2};

  out.hcore = Eigen::MatrixXd::Zero(out.m, out.m);
  for (int p = 0; p < out.m; ++p)
    for (int q = 0; q < out.m; ++q)
      if (p % 2 == q % 2) out.hcore(p, q) = sp.hcore(p / 2, q / 2);

  const int m = out.m;
  out.v.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
  auto at = [&](int p, int q, int r, int s) -> double& {
    return out.v[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s];
  };
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          double coul = (p % 2 == r % 2 && q % 2 == s % 2)
                            ? sp.eri_get(p / 2, r / 2, q / 2, s / 2)
                            : 0.0;
          double exch = (p % 2 == s % 2 && q % 2 == r % 2)
                            ? sp.eri_get(p / 2, s / 2, q / 2, r / 2)
                            : 0.0;
          at(p, q, r, s) = coul - exch;
        }

  out.eps = Eigen::VectorXd::Zero(m);
  if (!sp.orbital_energies.empty()) {
    if (static_cast<int>(sp.orbital_energies.size()) != sp.norb)
      throw validation_error("orbital energy list has wrong length");
    for (int p = 0; p < m; ++p) out.eps[p] = sp.orbital_energies[p / 2];
  } else {
    // Fock diagonal with the first n_e spin orbitals occupied.
    for (int p = 0; p < m; ++p) {
      double e = out.hcore(p, p);
      for (int i = 0; i < out.n_e; ++i) e += out.vas(p, i, p, i);
      out.eps[p] = e;
    }
  }

  out.validate();
  return out;
}

}  // namespace mbgf
