#include "mbgf/models.hpp"

#include <cmath>

#include "mbgf/errors.hpp"
#include "mbgf/fcidump.hpp"
#include "mbgf/util.hpp"

namespace mbgf {

static spatial_integrals hubbard_chain_spatial(int sites, double t, double u) {
  if (sites < 2 || sites > 32) throw validation_error("site count out of range");
  if (sites % 2 != 0) throw validation_error("half filling needs an even site count");
  const int L = sites;
  spatial_integrals sp;
  sp.norb = L;
  sp.nelec = L;
  sp.ms2 = 0;
  sp.e_nuc = 0.0;
  sp.allocate();

  // Open-chain eigenbasis of the hopping matrix.
  Eigen::MatrixXd phi(L, L);  // phi(j, k): site j, orbital k
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < L; ++k) {
    double norm = std::sqrt(2.0 / (L + 1));
    for (int j = 0; j < L; ++j)
      phi(j, k) = norm * std::sin((j + 1) * (k + 1) * pi / (L + 1));
  }
  for (int k = 0; k < L; ++k) sp.hcore(k, k) = -2.0 * t * std::cos((k + 1) * pi / (L + 1));

  // On-site interaction transformed to the orbital basis.
  for (int i = 0; i < L; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < L; ++k)
        for (int l = 0; l <= k; ++l) {
          double val = 0.0;
          for (int s = 0; s < L; ++s) val += phi(s, i) * phi(s, j) * phi(s, k) * phi(s, l);
          sp.eri_set(i, j, k, l, u * val);
        }
  return sp;
}

integral_set generate_model(const model_spec& spec) {
  switch (spec.kind) {
    case model_kind::hubbard_dimer:
      return expand_to_spin(hubbard_chain_spatial(2, spec.t, spec.u));
    case model_kind::hubbard_chain:
      return expand_to_spin(hubbard_chain_spatial(spec.sites, spec.t, spec.u));
    case model_kind::fcidump_file:
      return parse_fcidump_file(spec.path);
  }
  throw usage_error("unknown model kind");
}

std::string model_signature(const model_spec& spec) {
  switch (spec.kind) {
    case model_kind::hubbard_dimer:
    case model_kind::hubbard_chain: {
      int sites = spec.kind == model_kind::hubbard_dimer ? 2 : spec.sites;
      return "hubbard t=" + format_full(spec.t) + " U=" + format_full(spec.u) +
             " sites=" + std::to_string(sites);
    }
    case model_kind::fcidump_file:
      return "fcidump " + spec.path;
  }
  return "unknown";
}

}  // namespace mbgf
