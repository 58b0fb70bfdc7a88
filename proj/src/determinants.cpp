#include "mbgf/determinants.hpp"

#include <bit>

namespace mbgf {

int determinant::popcount() const { return std::popcount(mask); }

int twice_sz_of(std::uint64_t mask) {
  int sz2 = 0;
  while (mask) {
    int p = std::countr_zero(mask);
    sz2 += (p % 2 == 0) ? 1 : -1;
    mask &= mask - 1;
  }
  return sz2;
}

std::vector<determinant> enumerate_sector(int m, int n_e, std::optional<int> twice_sz) {
  std::vector<determinant> out;
  if (n_e < 0 || n_e > m) return out;
  if (n_e == 0) {
    if (!twice_sz || *twice_sz == 0) out.push_back({0});
    return out;
  }
  // Lowest mask with n_e bits, stepped upward in colex order; output is ascending.
  std::uint64_t v = (n_e == 64) ? ~0ull : ((1ull << n_e) - 1);
  const std::uint64_t limit = (m == 64) ? ~0ull : ((1ull << m) - 1);
  while (v <= limit) {
    if (!twice_sz || twice_sz_of(v) == *twice_sz) out.push_back({v});
    std::uint64_t t = v | (v - 1);
    std::uint64_t next = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    if (next < v) break;  // overflow
    v = next;
  }
  return out;
}

int fermi_sign(std::uint64_t mask, int p) {
  std::uint64_t below = (p == 0) ? 0 : (mask & ((1ull << p) - 1));
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

}  // namespace mbgf
