// Independent reference implementations used only by tests. These avoid the
// library's edge-masking reachability: set relations are derived from
// explicit path existence checks, and attribution sums are written directly
// from their defining formulas.
#ifndef DOSHAP_TESTS_ORACLES_HPP
#define DOSHAP_TESTS_ORACLES_HPP

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doshap/coalition.hpp"
#include "doshap/graph.hpp"

namespace doshap::testing {

// Can `from` reach Y by a directed path whose nodes after `from` all avoid
// `forbidden`? Plain recursive DFS over adjacency.
inline bool reaches_target_avoiding(const CausalGraph& g, int from, Coalition forbidden) {
  if (g.has_edge_to_target(from)) return true;
  bool found = false;
  g.children(from).for_each([&](int c) {
    if (found || forbidden.contains(c)) return;
    if (reaches_target_avoiding(g, c, forbidden)) found = true;
  });
  return found;
}

// basis(S) = members of S with a path to Y meeting S only at the start.
inline Coalition basis_by_paths(const CausalGraph& g, Coalition s) {
  Coalition out;
  s.for_each([&](int j) {
    if (reaches_target_avoiding(g, j, s)) out = out.with(j);
  });
  return out;
}

// closure(S) = S plus every player all of whose paths to Y meet S.
inline Coalition closure_by_paths(const CausalGraph& g, Coalition s) {
  Coalition out = s;
  g.all_players().for_each([&](int j) {
    if (s.contains(j)) return;
    if (!reaches_target_avoiding(g, j, s)) out = out.with(j);
  });
  return out;
}

// Random DAG in which every player keeps a directed path to Y, so the
// pruning constructor drops nothing. Node names are "1".."d", target "Y".
inline GraphSpec random_dag_spec(int d, double edge_prob, std::mt19937_64& rng) {
  GraphSpec spec;
  spec.target = "Y";
  for (int i = 0; i < d; ++i) spec.nodes.push_back(std::to_string(i + 1));
  spec.nodes.push_back("Y");
  std::bernoulli_distribution coin(edge_prob);
  for (int i = 0; i < d; ++i) {
    bool has_out = false;
    for (int j = i + 1; j < d; ++j) {
      if (coin(rng)) {
        spec.edges.emplace_back(spec.nodes[i], spec.nodes[j]);
        has_out = true;
      }
    }
    if (coin(rng) || !has_out) {
      spec.edges.emplace_back(spec.nodes[i], "Y");
    }
  }
  return spec;
}

// Uniform random values keyed by basis bits, one per equivalence class.
inline std::map<std::uint64_t, double> random_table(const CausalGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  std::map<std::uint64_t, double> table;
  const std::uint64_t limit = std::uint64_t{1} << g.player_count();
  for (std::uint64_t bits = 0; bits < limit; ++bits) {
    const Coalition basis = basis_by_paths(g, Coalition(bits));
    if (!table.contains(basis.bits())) table[basis.bits()] = value(rng);
  }
  return table;
}

// nu read straight from a basis-keyed table via the path oracle.
struct RawTable {
  const CausalGraph* graph;
  const std::map<std::uint64_t, double>* values;

  double operator()(Coalition s) const {
    return values->at(basis_by_paths(*graph, s).bits());
  }
};

// Direct semivalue sum: phi_i = sum_{S                not containing i} q_{|S|} (nu(S+i) - nu(S)).
template <typename Nu>
std::vector<double> semivalue_by_definition(int d, const std::vector<double>& size_weights, Nu nu) {
  std::vector<double> phi(static_cast<std::size_t>(d), 0.0);
  const std::uint64_t limit = std::uint64_t{1} << d;
  for (int i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t s = 0; s < limit; ++s) {
      if ((s & bit) != 0) continue;
      phi[i] += size_weights[std::popcount(s)] *
                (nu(Coalition(s | bit)) - nu(Coalition(s)));
    }
  }
  return phi;
}

inline std::vector<double> shapley_size_weights(int d) {
  std::vector<double> p(static_cast<std::size_t>(d));
  for (int ell = 0; ell < d; ++ell) {
    double c = 1.0;
    for (int t = 0; t < ell; ++t) c = c * (d - 1 - t) / (t + 1);
    p[ell] = 1.0 / (d * c);
  }
  return p;
}

inline std::vector<double> banzhaf_size_weights(int d) {
  return std::vector<double>(static_cast<std::size_t>(d), std::ldexp(1.0, -(d - 1)));
}

// Discrete derivative of U at S: sum over L <= U of (-1)^{|U|-|L|} nu(S | L).
template <typename Nu>
double discrete_derivative(Coalition u, Coalition s, Nu nu) {
  double total = 0.0;
  const int u_size = u.size();
  std::uint64_t sub = u.bits();
  while (true) {
    const int l_size = std::popcount(sub);
    const double sign = ((u_size - l_size) % 2 == 0) ? 1.0 : -1.0;
    total += sign * nu(Coalition(s.bits() | sub));
    if (sub == 0) break;
    sub = (sub - 1) & u.bits();
  }
  return total;
}

// Shapley interaction index by definition with p^u_s = 1/((d-u+1) C(d-u, s)).
template <typename Nu>
double interaction_by_definition(int d, Coalition u, Nu nu) {
  const int u_size = u.size();
  double total = 0.0;
  const std::uint64_t all = (std::uint64_t{1} << d) - 1;
  const std::uint64_t rest = all & ~u.bits();
  std::uint64_t sub = rest;
  while (true) {
    const int s_size = std::popcount(sub);
    double c = 1.0;
    for (int t = 0; t < s_size; ++t) c = c * (d - u_size - t) / (t + 1);
    total += discrete_derivative(u, Coalition(sub), nu) / ((d - u_size + 1) * c);
    if (sub == 0) break;
    sub = (sub - 1) & rest;
  }
  return total;
}

// Moebius coefficient m(T) = sum_{S <= T} (-1)^{|T|-|S|} nu(S).
template <typename Nu>
double moebius_by_definition(Coalition t, Nu nu) {
  double total = 0.0;
  const int t_size = t.size();
  std::uint64_t sub = t.bits();
  while (true) {
    const int s_size = std::popcount(sub);
    const double sign = ((t_size - s_size) % 2 == 0) ? 1.0 : -1.0;
    total += sign * nu(Coalition(sub));
    if (sub == 0) break;
    sub = (sub - 1) & t.bits();
  }
  return total;
}

}  // namespace doshap::testing

#endif
