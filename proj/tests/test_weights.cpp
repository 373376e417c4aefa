#include <doctest.h>

#include <cmath>
#include <random>

#include "doshap/combinatorics.hpp"
#include "doshap/error.hpp"
#include "doshap/lattice.hpp"
#include "doshap/weights.hpp"
#include "oracles.hpp"

using namespace doshap;
using namespace doshap::testing;

namespace {

// Interval-enumeration reference for w_i(c): the inner sum of the class
// decomposition evaluated term by term over every T in [basis, closure].
double class_weight_by_enumeration(const WeightScheme& scheme, const CoalitionClass& cls,
                                   int player) {
  double total = 0.0;
  const std::uint64_t base = cls.basis.bits();
  const std::uint64_t free = cls.closure.bits() & ~base;
  std::uint64_t sub = free;
  while (true) {
    const Coalition t(base | sub);
    if (t.contains(player)) {
      total += scheme.size_weight(t.size() - 1);
    } else {
      total -= scheme.size_weight(t.size());
    }
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
  return total;
}

}  // namespace

TEST_CASE("Shapley weights normalize") {
  for (int d = 1; d <= 12; ++d) {
    const WeightScheme scheme = WeightScheme::shapley(d);
    double total = 0.0;
    for (int ell = 0; ell < d; ++ell) {
      CHECK(scheme.size_weight(ell) >= 0.0);
      total += scheme.size_weight(ell) * combin::binom(d - 1, ell);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("frozen d=3 Shapley class weights") {
  const WeightScheme scheme = WeightScheme::shapley(3);
  CHECK(scheme.size_weight(0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(scheme.size_weight(1) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(scheme.size_weight(2) == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const CoalitionClass mid{Coalition({1}), Coalition({0, 1})};  // ({2},{1,2}) in names
  CHECK(scheme.class_weight(mid, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(scheme.class_weight(mid, 2) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(scheme.class_weight(mid, 0) == 0.0);

  const CoalitionClass single{Coalition({0}), Coalition({0})};
  CHECK(scheme.class_weight(single, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));

  CHECK(scheme.mean_abs_weight(mid) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(scheme.mean_abs_weight({Coalition(), Coalition()}) ==
        doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(scheme.mean_abs_weight({Coalition({0, 1, 2}), Coalition({0, 1, 2})}) ==
        doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("class weights equal interval enumeration on random graphs") {
  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 9);  // up to 10
    const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
    for (const WeightScheme& scheme :
         {WeightScheme::shapley(d), WeightScheme::banzhaf(d), WeightScheme::beta_shapley(d, 2.0, 1.5)}) {
      for (const CoalitionClass& cls : all_classes(g)) {
        for (int i = 0; i < d; ++i) {
          const double expected = class_weight_by_enumeration(scheme, cls, i);
          CHECK(scheme.class_weight(cls, i) == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("weight-level efficiency: class sums recover nu([d]) - nu({})") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);  // up to 8
    const CausalGraph g = build_graph(random_dag_spec(d, 0.45, rng));
    const auto table = random_table(g, rng);
    const RawTable nu{&g, &table};
    const WeightScheme scheme = WeightScheme::shapley(d);
    double total = 0.0;
    for (const CoalitionClass& cls : all_classes(g)) {
      for (int i = 0; i < d; ++i) {
        total += scheme.class_weight(cls, i) * nu(cls.basis);
      }
    }
    const double expected = nu(g.all_players()) - nu(Coalition());
    CHECK(total == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("mean_abs_weight matches the per-player average") {
  std::mt19937_64 rng(808);
  const int d = 6;
  const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
  const WeightScheme scheme = WeightScheme::shapley(d);
  for (const CoalitionClass& cls : all_classes(g)) {
    double avg = 0.0;
    for (int i = 0; i < d; ++i) avg += std::abs(scheme.class_weight(cls, i));
    avg /= d;
    CHECK(scheme.mean_abs_weight(cls) == doctest::Approx(avg).epsilon(1e-12));
  }
}

TEST_CASE("beta(1,1) reduces to Shapley") {
  for (int d = 1; d <= 10; ++d) {
    const WeightScheme beta = WeightScheme::beta_shapley(d, 1.0, 1.0);
    const WeightScheme shap = WeightScheme::shapley(d);
    for (int ell = 0; ell < d; ++ell) {
      CHECK(beta.size_weight(ell) == doctest::Approx(shap.size_weight(ell)).epsilon(1e-12));
    }
  }
}

TEST_CASE("scheme parsing") {
  CHECK(WeightScheme::parse("shapley", 4).name() == "shapley");
  CHECK(WeightScheme::parse("banzhaf", 4).name() == "banzhaf");
  CHECK(WeightScheme::parse("beta:2,1.5", 4).name() == "beta:2,1.5");
  CHECK_THROWS_AS(WeightScheme::parse("kernel", 4), Error);
  CHECK_THROWS_AS(WeightScheme::parse("beta:2", 4), Error);
  CHECK_THROWS_AS(WeightScheme::parse("beta:-1,1", 4), Error);
}

TEST_CASE("class_weight rejects out-of-range players") {
  const WeightScheme scheme = WeightScheme::shapley(3);
  const CoalitionClass cls{Coalition({0}), Coalition({0})};
  CHECK_THROWS_AS(scheme.class_weight(cls, 3), Error);
  CHECK_THROWS_AS(scheme.class_weight(cls, -1), Error);
}

TEST_CASE("banzhaf weights are flat") {
  const WeightScheme scheme = WeightScheme::banzhaf(5);
  for (int ell = 0; ell < 5; ++ell) {
    CHECK(scheme.size_weight(ell) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  }
}
