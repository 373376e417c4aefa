#ifndef DOSHAP_COMBINATORICS_HPP
#define DOSHAP_COMBINATORICS_HPP

#include <cstdint>

#include "doshap/coalition.hpp"

namespace doshap::combin {

// Binomial coefficient as a double from a precomputed Pascal row table,
// n <= 64. Returns 0 outside 0 <= k <= n.
double binom(int n, int k);

// Exact binomial coefficient, n <= 64 (C(64,32) still fits in 64 bits).
std::uint64_t binom_exact(int n, int k);

// The k-subset of `pool` with the given lexicographic rank (members compared
// by ascending player index). rank must be < C(|pool|, k).
Coalition unrank_combination(std::uint64_t rank, Coalition pool, int k);

// Bernoulli number B_k for k <= 64, B_1 = -1/2 convention. The values are
// exact rationals rounded once to double.
double bernoulli(int k);

}  // namespace doshap::combin

#endif
