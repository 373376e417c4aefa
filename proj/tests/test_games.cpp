#include <doctest.h>

#include <random>

#include "doshap/error.hpp"
#include "doshap/games.hpp"
#include "doshap/lattice.hpp"
#include "oracles.hpp"

using namespace doshap;
using namespace doshap::testing;

namespace {

GraphSpec chain3_spec() {
  GraphSpec spec;
  spec.nodes = {"1", "2", "3", "Y"};
  spec.target = "Y";
  spec.edges = {{"1", "2"}, {"2", "3"}, {"3", "Y"}};
  return spec;
}

// Table {∅:0, {1}:1, {2}:2, {3}:3} on the chain, keyed by basis bits.
std::map<std::uint64_t, double> chain3_table() {
  return {{0, 0.0}, {1, 1.0}, {2, 2.0}, {4, 3.0}};
}

LinearScmSpec unit_chain_scm(double x1, double x2, double x3) {
  LinearScmSpec spec;
  spec.coeff = {{}, {{0, 1.0}}, {{1, 1.0}}, {{2, 1.0}}};  // 1->2->3->Y
  spec.intercept = {0.0, 0.0, 0.0, 0.0};
  spec.x = {x1, x2, x3};
  spec.noise_var = {1.0, 1.0, 1.0, 1.0};
  return spec;
}

}  // namespace

TEST_CASE("table game routes queries through the basis") {
  const CausalGraph g = build_graph(chain3_spec());
  TableGame game(g, chain3_table());
  // basis({1,2}) = {2}, so the value is the {2} entry.
  CHECK(game.evaluate(Coalition({0, 1})) == 2.0);
  CHECK(game.evaluate(Coalition({1})) == 2.0);
  CHECK(game.query_count() == 1);  // one basis, one miss
}

TEST_CASE("repeated evaluation is deterministic and cached") {
  const CausalGraph g = build_graph(chain3_spec());
  TableGame game(g, chain3_table());
  const double first = game.evaluate(Coalition());
  const double second = game.evaluate(Coalition());
  CHECK(first == second);
  CHECK(game.query_count() == 1);
}

TEST_CASE("missing table entry raises an oracle error") {
  const CausalGraph g = build_graph(chain3_spec());
  TableGame game(g, {{0, 0.0}});
  CHECK_THROWS_AS(game.evaluate(Coalition({2})), Error);
}

TEST_CASE("linear SCM mean propagation on the chain") {
  const CausalGraph g = build_graph(chain3_spec());
  LinearScm game(g, unit_chain_scm(1.0, 1.0, 1.0));
  CHECK(game.mean(Coalition()) == 0.0);
  CHECK(game.mean(Coalition({0})) == 1.0);  // do(X1=1) propagates down the chain
  CHECK(game.evaluate(Coalition({2})) == 1.0);
}

TEST_CASE("later interventions screen earlier ones") {
  const CausalGraph g = build_graph(chain3_spec());
  LinearScm game(g, unit_chain_scm(1.0, 1.0, 5.0));
  // basis({1,3}) = {3}; X3 screens X1.
  CHECK(game.evaluate(Coalition({0, 2})) == 5.0);
}

TEST_CASE("cache soundness: cached and fresh oracles agree on random queries") {
  std::mt19937_64 rng(1111);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
    const auto table = random_table(g, rng);
    TableGame cached(g, table);
    const RawTable raw{&g, &table};
    for (int q = 0; q < 100; ++q) {
      const Coalition s(rng() & ((std::uint64_t{1} << d) - 1));
      CHECK(cached.evaluate(s) == raw(s));
    }
  }
}

TEST_CASE("query counter over a full inventory is exactly r") {
  std::mt19937_64 rng(2222);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const CausalGraph g = build_graph(random_dag_spec(d, 0.4, rng));
    const ClassInventory inv = all_classes(g);
    TableGame game(g, random_table(g, rng));
    // Sweep every subset; only class representatives should miss.
    const std::uint64_t limit = std::uint64_t{1} << d;
    for (std::uint64_t bits = 0; bits < limit; ++bits) game.evaluate(Coalition(bits));
    CHECK(game.query_count() == static_cast<std::uint64_t>(inv.count()));
  }
}

TEST_CASE("linear SCM honors the third rule of do-calculus") {
  std::mt19937_64 rng(3333);
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);  // up to 8
    const CausalGraph g = build_graph(random_dag_spec(d, 0.45, rng));
    LinearScmSpec spec;
    spec.coeff.resize(static_cast<std::size_t>(d) + 1);
    for (int child = 0; child < d; ++child) {
      g.parents(child).for_each([&](int p) { spec.coeff[child].emplace_back(p, coeff(rng)); });
    }
    g.parents_of_target().for_each([&](int p) { spec.coeff[d].emplace_back(p, coeff(rng)); });
    for (int v = 0; v <= d; ++v) spec.intercept.push_back(coeff(rng));
    for (int v = 0; v < d; ++v) spec.x.push_back(coeff(rng));
    spec.noise_var.assign(static_cast<std::size_t>(d) + 1, 1.0);

    LinearScm game(g, spec);
    const std::uint64_t limit = std::uint64_t{1} << d;
    for (std::uint64_t bits = 0; bits < limit; ++bits) {
      const Coalition s(bits);
      const Coalition closure = closure_by_paths(g, s);
      CHECK(game.mean(s) == doctest::Approx(game.mean(closure)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Monte Carlo SCM is deterministic and approaches the exact mean") {
  const CausalGraph g = build_graph(chain3_spec());
  SimulatedScm first(g, unit_chain_scm(1.0, 2.0, 3.0), 42, 20000);
  SimulatedScm second(g, unit_chain_scm(1.0, 2.0, 3.0), 42, 20000);
  const double a = first.evaluate(Coalition({1}));
  const double b = second.evaluate(Coalition({1}));
  CHECK(a == b);  // bit-identical across instances with the same seed

  LinearScm exact(g, unit_chain_scm(1.0, 2.0, 3.0));
  CHECK(a == doctest::Approx(exact.evaluate(Coalition({1}))).epsilon(0.05));
}

TEST_CASE("SCM spec validation rejects coefficients off the graph") {
  const CausalGraph g = build_graph(chain3_spec());
  LinearScmSpec spec = unit_chain_scm(1.0, 1.0, 1.0);
  spec.coeff[2].emplace_back(0, 0.5);  // 1 -> 3 is not an edge
  CHECK_THROWS_AS(LinearScm(g, spec), Error);
}
