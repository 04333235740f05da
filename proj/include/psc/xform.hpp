#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace psc::xform {

using BitVec = std::vector<std::uint8_t>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("length must be a power of two");
  int m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  return m;
}

// Bit-reversal permutation of [0, n): index i maps to the reversal of its
// m-bit binary expansion. An involution.
inline std::vector<std::uint32_t> bit_reversal(std::size_t n) {
  int m = log2_exact(n);
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < m; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (m - 1 - b);
    perm[i] = static_cast<std::uint32_t>(r);
  }
  return perm;
}

// In-place x <- x * G_n over GF(2), where G_n = B_n F^{x m} with
// F = [[1,0],[1,1]] and B_n the bit-reversal permutation. Row-vector
// convention throughout; G_n is its own inverse. O(n log n).
inline void polar_transform_inplace(BitVec& x) {
  std::size_t n = x.size();
  int m = log2_exact(n);
  // v = x * B_n, done by swapping bit-reversed index pairs.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < m; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (m - 1 - b);
    if (r > i) std::swap(x[i], x[r]);
  }
  // v * F^{x m}: butterfly stages; stage order is immaterial for this network.
  for (std::size_t half = 1; half < n; half <<= 1)
    for (std::size_t block = 0; block < n; block += 2 * half)
      for (std::size_t j = block; j < block + half; ++j) x[j] ^= x[j + half];
}

inline BitVec polar_transform(BitVec x) {
  polar_transform_inplace(x);
  return x;
}

}  // namespace psc::xform
