#include <doctest.h>

#include <random>
#include <set>
#include <unordered_map>

#include "doshap/lattice.hpp"
#include "oracles.hpp"

using namespace doshap;
using namespace doshap::testing;

namespace {

GraphSpec chain_spec(int d) {
  GraphSpec spec;
  spec.target = "Y";
  for (int i = 0; i < d; ++i) spec.nodes.push_back(std::to_string(i + 1));
  spec.nodes.push_back("Y");
  for (int i = 0; i + 1 < d; ++i) spec.edges.emplace_back(spec.nodes[i], spec.nodes[i + 1]);
  spec.edges.emplace_back(spec.nodes[d - 1], "Y");
  return spec;
}

GraphSpec star_spec(int d) {
  GraphSpec spec;
  spec.target = "Y";
  for (int i = 0; i < d; ++i) spec.nodes.push_back(std::to_string(i + 1));
  spec.nodes.push_back("Y");
  for (int i = 0; i < d; ++i) spec.edges.emplace_back(spec.nodes[i], "Y");
  return spec;
}

}  // namespace

TEST_CASE("all_classes on CHAIN3 matches the hand enumeration") {
  const CausalGraph g = build_graph(chain_spec(3));
  const ClassInventory inv = all_classes(g);
  REQUIRE(inv.count() == 4);
  // Canonical order: closure size descending.
  CHECK(inv[0] == CoalitionClass{Coalition({2}), Coalition({0, 1, 2})});
  CHECK(inv[1] == CoalitionClass{Coalition({1}), Coalition({0, 1})});
  CHECK(inv[2] == CoalitionClass{Coalition({0}), Coalition({0})});
  CHECK(inv[3] == CoalitionClass{Coalition(), Coalition()});
}

TEST_CASE("all_classes on STAR3 yields every subset as a simple class") {
  const CausalGraph g = build_graph(star_spec(3));
  AllClassesStats stats;
  const ClassInventory inv = all_classes(g, &stats);
  REQUIRE(inv.count() == 8);
  for (const CoalitionClass& cls : inv) CHECK(cls.simple());
  CHECK(stats.find_class_calls <= inv.count());
}

TEST_CASE("all_classes on a single player") {
  GraphSpec spec;
  spec.nodes = {"1", "Y"};
  spec.target = "Y";
  spec.edges = {{"1", "Y"}};
  const ClassInventory inv = all_classes(build_graph(spec));
  REQUIRE(inv.count() == 2);
  CHECK(inv[0] == CoalitionClass{Coalition({0}), Coalition({0})});
  CHECK(inv[1] == CoalitionClass{Coalition(), Coalition()});
}

TEST_CASE("chain and star class counts") {
  for (int d = 3; d <= 10; ++d) {
    CHECK(all_classes(build_graph(chain_spec(d))).count() == d + 1);
  }
  for (int d = 3; d <= 10; ++d) {
    CHECK(all_classes(build_graph(star_spec(d))).count() == std::int64_t{1} << d);
  }
}

TEST_CASE("all_classes equals the brute-force closure set on random DAGs") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 9);  // up to 10
    const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
    std::set<std::uint64_t> expected;
    const std::uint64_t limit = std::uint64_t{1} << d;
    for (std::uint64_t bits = 0; bits < limit; ++bits) {
      expected.insert(closure_by_paths(g, Coalition(bits)).bits());
    }
    AllClassesStats stats;
    const ClassInventory inv = all_classes(g, &stats);
    std::set<std::uint64_t> produced;
    for (const CoalitionClass& cls : inv) {
      CHECK(produced.insert(cls.closure.bits()).second);  // no duplicate closures
      CHECK(cls.basis == basis_by_paths(g, cls.closure));
    }
    CHECK(produced == expected);
    CHECK(stats.find_class_calls <= inv.count());
  }
}

TEST_CASE("class count stays between d + 1 and 2^d") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 10);  // 1..10
    const CausalGraph g = build_graph(random_dag_spec(d, 0.5, rng));
    const std::int64_t r = all_classes(g).count();
    CHECK(r >= d + 1);
    CHECK(r <= std::int64_t{1} << d);
  }
}

TEST_CASE("class intervals tile the powerset exactly once") {
  std::mt19937_64 rng(456);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 9);
    const CausalGraph g = build_graph(random_dag_spec(d, 0.35, rng));
    const ClassInventory inv = all_classes(g);
    std::vector<int> hits(std::size_t{1} << d, 0);
    for (const CoalitionClass& cls : inv) {
      const std::uint64_t base = cls.basis.bits();
      const std::uint64_t free = cls.closure.bits() & ~base;
      std::uint64_t sub = free;
      while (true) {
        ++hits[base | sub];
        if (sub == 0) break;
        sub = (sub - 1) & free;
      }
    }
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("Lemma 1 on the closed sets of random DAGs") {
  std::mt19937_64 rng(789);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);  // up to 8
    const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
    const ClassInventory inv = all_classes(g);
    for (const CoalitionClass& cls : inv) {
      // Part 1: removing any basis member from the closure stays closed.
      cls.basis.for_each([&](int j) {
        const Coalition child = cls.closure.without(j);
        CHECK(g.find_class(child).closure == child);
      });
      // Part 2: some superset is closed with the new element in its basis.
      if (cls.closure != g.all_players()) {
        bool found = false;
        (g.all_players() - cls.closure).for_each([&](int j) {
          if (found) return;
          const CoalitionClass up = g.find_class(cls.closure.with(j));
          if (up.closure == cls.closure.with(j) && up.basis.contains(j)) found = true;
        });
        CHECK(found);
      }
    }
  }
}

TEST_CASE("lattice_neighbors fixtures") {
  const CausalGraph chain = build_graph(chain_spec(3));
  SUBCASE("interior class") {
    const CoalitionClass cls = chain.find_class(Coalition({0, 1}));
    const LatticeNeighbors n = lattice_neighbors(cls, chain);
    REQUIRE(n.lower.size() == 1);
    CHECK(n.lower[0] == Coalition({0}));
    REQUIRE(n.upper.size() == 1);
    CHECK(n.upper[0] == Coalition({0, 1, 2}));
  }
  SUBCASE("empty class has only upper neighbors") {
    const LatticeNeighbors n = lattice_neighbors(chain.find_class(Coalition()), chain);
    CHECK(n.lower.empty());
    REQUIRE(n.upper.size() == 3);
  }
  const CausalGraph star = build_graph(star_spec(3));
  SUBCASE("full simple class has only lower neighbors") {
    const LatticeNeighbors n = lattice_neighbors(star.find_class(Coalition({0, 1, 2})), star);
    REQUIRE(n.lower.size() == 3);
    CHECK(n.upper.empty());
    CHECK(n.lower[0] == Coalition({1, 2}));
    CHECK(n.lower[1] == Coalition({0, 2}));
    CHECK(n.lower[2] == Coalition({0, 1}));
  }
}

TEST_CASE("neighbor counts match the class shape") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const CausalGraph g = build_graph(random_dag_spec(d, 0.5, rng));
    for (const CoalitionClass& cls : all_classes(g)) {
      const LatticeNeighbors n = lattice_neighbors(cls, g);
      CHECK(static_cast<int>(n.lower.size()) == cls.basis.size());
      CHECK(static_cast<int>(n.upper.size()) == d - cls.closure.size());
    }
  }
}
