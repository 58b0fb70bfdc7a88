#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace mbgf {

// Spin-orbital occupation mask; bit p set means orbital p occupied.
// Orbital p has alpha spin for even p, beta for odd p.
struct determinant {
  std::uint64_t mask = 0;
  int popcount() const;
  bool occ(int p) const { return (mask >> p) & 1u; }
  bool operator==(const determinant& o) const { return mask == o.mask; }
};

// n_alpha - n_beta for the interleaved spin convention.
int twice_sz_of(std::uint64_t mask);

// All n_e-electron determinants over m spin orbitals in ascending mask order,
// optionally restricted to one spin projection.
std::vector<determinant> enumerate_sector(int m, int n_e, std::optional<int> twice_sz);

// Parity of the number of occupied orbitals below p.
int fermi_sign(std::uint64_t mask, int p);

}  // namespace mbgf
