#ifndef DOSHAP_EXACT_HPP
#define DOSHAP_EXACT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doshap/games.hpp"
#include "doshap/lattice.hpp"
#include "doshap/weights.hpp"

namespace doshap {

struct Attribution {
  std::vector<double> values;  // phi_1..phi_d by player index
  std::string scheme;
  bool exact = false;
};

// phi_i = sum_j nu(c_j) w_i(c_j); exactly r oracle evaluations.
Attribution exact_values(const ClassInventory& inventory, ValueOracle& oracle,
                         const WeightScheme& scheme);

// Direct marginal-contribution sum over all 2^d subsets; the reference every
// equivalence test is measured against. Guarded to d <= 20.
Attribution brute_force_values(ValueOracle& oracle, const WeightScheme& scheme);

// Shapley interaction index of U via the class decomposition; each class
// contributes nu(c) * (-1)^{|U \ closure|} * omega(a, b) when
// U <= basis | (players \ closure), and 0 otherwise.
double interaction_index(const ClassInventory& inventory, ValueOracle& oracle, Coalition u);

// All indices phi_U for 1 <= |U| <= order, keyed by coalition bits.
std::map<std::uint64_t, double> interaction_indices(const ClassInventory& inventory,
                                                    ValueOracle& oracle, int order);

struct InteractionAttribution {
  int order = 0;
  // Phi^n_U keyed by coalition bits; includes the empty set pinned to nu({}).
  std::map<std::uint64_t, double> values;
};

// Order-n explanation from the interaction indices via the Bernoulli-number
// recursion; at n = d this is the Moebius transform. `interactions` must
// contain phi_U for every 1 <= |U| <= order.
InteractionAttribution n_shapley(const std::map<std::uint64_t, double>& interactions, int order,
                                 int d, double nu_empty);

// omega_{a,b} = 1 / ((a + b + 1) * C(a + b, a)); the single-class interaction weight.
double interaction_omega(int a, int b);

}  // namespace doshap

#endif
