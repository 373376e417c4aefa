#include "doshap/combinatorics.hpp"

#include <array>
#include <vector>

#include "doshap/error.hpp"

namespace doshap::combin {

namespace {

constexpr int kMaxN = Coalition::kMaxPlayers;

struct PascalTables {
  // Row-major triangle, row n has n+1 entries.
  std::vector<double> as_double;
  std::vector<std::uint64_t> as_u64;
  std::array<std::size_t, kMaxN + 2> row_offset{};

  PascalTables() {
    std::size_t total = 0;
    for (int n = 0; n <= kMaxN; ++n) {
      row_offset[n] = total;
      total += static_cast<std::size_t>(n) + 1;
    }
    row_offset[kMaxN + 1] = total;
    as_double.assign(total, 0.0);
    as_u64.assign(total, 0);
    for (int n = 0; n <= kMaxN; ++n) {
      auto* dn = &as_double[row_offset[n]];
      auto* un = &as_u64[row_offset[n]];
      dn[0] = dn[n] = 1.0;
      un[0] = un[n] = 1;
      for (int k = 1; k < n; ++k) {
        const auto* up = &as_u64[row_offset[n - 1]];
        un[k] = up[k - 1] + up[k];
        dn[k] = static_cast<double>(un[k]);
      }
    }
  }
};

const PascalTables& tables() {
  static const PascalTables t;
  return t;
}

// B_0..B_64, exact rationals rounded to double; odd entries beyond B_1 are 0.
constexpr double kBernoulli[] = {
    1.0, -0.5,
    0.16666666666666666, 0.0,
    -0.03333333333333333, 0.0,
    0.023809523809523808, 0.0,
    -0.03333333333333333, 0.0,
    0.07575757575757576, 0.0,
    -0.2531135531135531, 0.0,
    1.1666666666666667, 0.0,
    -7.092156862745098, 0.0,
    54.971177944862156, 0.0,
    -529.1242424242424, 0.0,
    6192.123188405797, 0.0,
    -86580.25311355312, 0.0,
    1425517.1666666667, 0.0,
    -27298231.067816094, 0.0,
    601580873.9006424, 0.0,
    -15116315767.092157, 0.0,
    429614643061.1667, 0.0,
    -13711655205088.332, 0.0,
    488332318973593.2, 0.0,
    -1.9296579341940068e+16, 0.0,
    8.416930475736826e+17, 0.0,
    -4.0338071854059454e+19, 0.0,
    2.1150748638081993e+21, 0.0,
    -1.2086626522296526e+23, 0.0,
    7.500866746076964e+24, 0.0,
    -5.038778101481069e+26, 0.0,
    3.6528776484818122e+28, 0.0,
    -2.849876930245088e+30, 0.0,
    2.3865427499683627e+32, 0.0,
    -2.1399949257225335e+34, 0.0,
    2.0500975723478097e+36, 0.0,
    -2.093800591134638e+38,
};

}  // namespace

double binom(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (n > kMaxN) fail(ErrorKind::invalid_argument, "binom: n exceeds 64");
  return tables().as_double[tables().row_offset[n] + k];
}

std::uint64_t binom_exact(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  if (n > kMaxN) fail(ErrorKind::invalid_argument, "binom_exact: n exceeds 64");
  return tables().as_u64[tables().row_offset[n] + k];
}

Coalition unrank_combination(std::uint64_t rank, Coalition pool, int k) {
  const int n = pool.size();
  if (k < 0 || k > n) fail(ErrorKind::invalid_argument, "unrank_combination: bad k");
  if (rank >= binom_exact(n, k)) {
    fail(ErrorKind::invalid_argument, "unrank_combination: rank out of range");
  }
  // Lexicographic combinadic over the pool members in ascending order.
  std::array<int, Coalition::kMaxPlayers> members{};
  int count = 0;
  pool.for_each([&](int p) { members[count++] = p; });

  Coalition out;
  int pos = 0;
  for (int slot = 0; slot < k; ++slot) {
    const int remaining = k - slot - 1;
    while (true) {
      const std::uint64_t block = binom_exact(n - pos - 1, remaining);
      if (rank < block) break;
      rank -= block;
      ++pos;
    }
    out = out.with(members[pos]);
    ++pos;
  }
  return out;
}

double bernoulli(int k) {
  if (k < 0 || k > kMaxN) fail(ErrorKind::invalid_argument, "bernoulli: index out of range");
  return kBernoulli[k];
}

}  // namespace doshap::combin
