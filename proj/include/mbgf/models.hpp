#pragma once

#include <string>

#include "mbgf/integrals.hpp"

namespace mbgf {

enum class model_kind { hubbard_dimer, hubbard_chain, fcidump_file };

struct model_spec {
  model_kind kind = model_kind::hubbard_dimer;
  double t = 1.0;
  double u = 0.0;
  int sites = 2;
  std::string path;  // fcidump_file only
};

// Half-filled open Hubbard chains in the mean-field orbital basis.
// phi_k(j) = sqrt(2/(L+1)) sin(j k pi/(L+1)) diagonalizes both the hopping matrix
// and the mean-field operator (uniform site density at bipartite half filling), so
// the basis is canonical and the Fock matrix is diagonal.
integral_set generate_model(const model_spec& spec);

// Canonical one-line description used for config echos and input checksums.
std::string model_signature(const model_spec& spec);

}  // namespace mbgf
