#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace blockgroup {

/// Division chain of a pair (n, t) with 1 <= t <= n:
///
///   n       = q_1 t       + r_1
///   t       = q_2 r_1     + r_2
///   r_1     = q_3 r_2     + r_3
///   ...
///   r_{k-2} = q_k r_{k-1}           (r_k = 0)
///
/// together with the conventions r_0 = t and r_k = 0, and the prefix sums
///
///   n_m = q_1 r_0 + q_3 r_2 + ... + q_{2m-1} r_{2m-2}
///   t_m = q_2 r_1 + q_4 r_3 + ... + q_{2m}   r_{2m-1}
///
/// which delimit the intervals on which the subgroup generators live.
/// n_m is defined for 2m-1 <= k and t_m for 2m <= k; both sequences are
/// materialized in full so that out-of-range access is impossible to miss.
/// The identities n = n_m + r_{2m-1} and t = t_m + r_{2m} hold wherever
/// both sides are defined.
struct EuclidDecomposition {
  std::int64_t n = 0;
  std::int64_t t = 0;
  int k = 0;  ///< number of division steps

  std::vector<std::int64_t> quotients;   ///< q_1 .. q_k
  std::vector<std::int64_t> remainders;  ///< r_0 .. r_k, r_0 = t, r_k = 0
  std::vector<std::int64_t> partial_n;   ///< n_0 .. n_{(k+1)/2}
  std::vector<std::int64_t> partial_t;   ///< t_0 .. t_{k/2}

  /// q_i, 1-based as in the chain above.
  std::int64_t quotient(int i) const { return quotients.at(static_cast<std::size_t>(i) - 1); }
  /// r_i, 0-based; remainder(0) == t and remainder(k) == 0.
  std::int64_t remainder(int i) const { return remainders.at(static_cast<std::size_t>(i)); }
  std::int64_t partial_n_at(int m) const { return partial_n.at(static_cast<std::size_t>(m)); }
  std::int64_t partial_t_at(int m) const { return partial_t.at(static_cast<std::size_t>(m)); }
};

/// Least strictly positive residue of y modulo z: the unique value in [1, z]
/// congruent to y.  Multiples of z map to z, never to 0.
inline std::int64_t least_positive_residue(std::int64_t y, std::int64_t z) {
  if (z < 1) {
    throw std::domain_error("least_positive_residue: modulus must be positive");
  }
  std::int64_t r = y % z;
  if (r < 0) r += z;
  return r == 0 ? z : r;
}

/// Runs the division chain on (n, t) and materializes quotients, remainders
/// and both prefix-sum sequences.  Requires 1 <= t <= n.
inline EuclidDecomposition euclid_decompose(std::int64_t n, std::int64_t t) {
  if (n < 1 || t < 1 || t > n) {
    throw std::domain_error("euclid_decompose: need 1 <= t <= n");
  }
  EuclidDecomposition dec;
  dec.n = n;
  dec.t = t;
  dec.remainders.push_back(t);  // r_0
  std::int64_t a = n;
  std::int64_t b = t;
  while (true) {
    dec.quotients.push_back(a / b);
    const std::int64_t r = a % b;
    dec.remainders.push_back(r);
    if (r == 0) break;
    a = b;
    b = r;
  }
  dec.k = static_cast<int>(dec.quotients.size());

  dec.partial_n.push_back(0);
  for (int m = 1; 2 * m - 1 <= dec.k; ++m) {
    dec.partial_n.push_back(dec.partial_n.back() +
                            dec.quotients[static_cast<std::size_t>(2 * m - 2)] *
                                dec.remainders[static_cast<std::size_t>(2 * m - 2)]);
  }
  dec.partial_t.push_back(0);
  for (int m = 1; 2 * m <= dec.k; ++m) {
    dec.partial_t.push_back(dec.partial_t.back() +
                            dec.quotients[static_cast<std::size_t>(2 * m - 1)] *
                                dec.remainders[static_cast<std::size_t>(2 * m - 1)]);
  }
  return dec;
}

}  // namespace blockgroup
