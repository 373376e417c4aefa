#include "doshap/exact.hpp"

#include "doshap/combinatorics.hpp"
#include "doshap/error.hpp"

namespace doshap {

namespace {

// Compensated accumulator; deterministic and independent of worker count.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

Attribution exact_values(const ClassInventory& inventory, ValueOracle& oracle,
                         const WeightScheme& scheme) {
  const int d = oracle.graph().player_count();
  std::vector<KahanSum> acc(static_cast<std::size_t>(d));
  for (const CoalitionClass& cls : inventory) {
    const double value = oracle.evaluate_class(cls);
    cls.basis.for_each([&](int i) { acc[i].add(value * scheme.class_weight(cls, i)); });
    (oracle.graph().all_players() - cls.closure).for_each([&](int i) {
      acc[i].add(value * scheme.class_weight(cls, i));
    });
  }
  Attribution out;
  out.values.reserve(static_cast<std::size_t>(d));
  for (const auto& a : acc) out.values.push_back(a.sum);
  out.scheme = scheme.name();
  out.exact = true;
  return out;
}

Attribution brute_force_values(ValueOracle& oracle, const WeightScheme& scheme) {
  const int d = oracle.graph().player_count();
  if (d > 20) fail(ErrorKind::invalid_argument, "brute_force_values is limited to d <= 20");
  std::vector<KahanSum> acc(static_cast<std::size_t>(d));
  const std::uint64_t limit = std::uint64_t{1} << d;
  for (int i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t s = 0; s < limit; ++s) {
      if ((s & bit) != 0) continue;
      const double without = oracle.evaluate(Coalition(s));
      const double with = oracle.evaluate(Coalition(s | bit));
      acc[i].add(scheme.size_weight(std::popcount(s)) * (with - without));
    }
  }
  Attribution out;
  out.values.reserve(static_cast<std::size_t>(d));
  for (const auto& a : acc) out.values.push_back(a.sum);
  out.scheme = scheme.name();
  out.exact = true;
  return out;
}

double interaction_omega(int a, int b) {
  return 1.0 / ((a + b + 1) * combin::binom(a + b, a));
}

namespace {

double class_interaction_term(const CoalitionClass& cls, Coalition u, Coalition players) {
  const Coalition outside = players - cls.closure;
  if (!u.subset_of(cls.basis | outside)) return 0.0;
  const int sign_pow = (u & outside).size();
  const int a = cls.basis.size() - (cls.closure & u).size();
  const int b = (players - (cls.closure | u)).size();
  const double w = interaction_omega(a, b);
  return (sign_pow % 2 == 0) ? w : -w;
}

}  // namespace

double interaction_index(const ClassInventory& inventory, ValueOracle& oracle, Coalition u) {
  const Coalition players = oracle.graph().all_players();
  if (!u.subset_of(players)) {
    fail(ErrorKind::invalid_argument, "interaction set contains unknown players");
  }
  KahanSum acc;
  for (const CoalitionClass& cls : inventory) {
    const double term = class_interaction_term(cls, u, players);
    if (term != 0.0) acc.add(oracle.evaluate_class(cls) * term);
  }
  return acc.sum;
}

std::map<std::uint64_t, double> interaction_indices(const ClassInventory& inventory,
                                                    ValueOracle& oracle, int order) {
  const int d = oracle.graph().player_count();
  if (order < 1 || order > d) {
    fail(ErrorKind::invalid_argument, "interaction order must be in 1..d");
  }
  // Values first, so each class is queried once regardless of how many U it feeds.
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(inventory.count()));
  for (const CoalitionClass& cls : inventory) values.push_back(oracle.evaluate_class(cls));

  std::map<std::uint64_t, double> out;
  const Coalition players = oracle.graph().all_players();
  for (int size = 1; size <= order; ++size) {
    const std::uint64_t total = combin::binom_exact(d, size);
    for (std::uint64_t rank = 0; rank < total; ++rank) {
      const Coalition u = combin::unrank_combination(rank, players, size);
      KahanSum acc;
      for (std::int64_t j = 0; j < inventory.count(); ++j) {
        const double term = class_interaction_term(inventory[j], u, players);
        if (term != 0.0) acc.add(values[j] * term);
      }
      out.emplace(u.bits(), acc.sum);
    }
  }
  return out;
}

InteractionAttribution n_shapley(const std::map<std::uint64_t, double>& interactions, int order,
                                 int d, double nu_empty) {
  if (order < 1 || order > d) {
    fail(ErrorKind::invalid_argument, "n-Shapley order must be in 1..d");
  }
  for (int size = 1; size <= order; ++size) {
    const std::uint64_t total = combin::binom_exact(d, size);
    for (std::uint64_t rank = 0; rank < total; ++rank) {
      const Coalition u = combin::unrank_combination(rank, Coalition::full(d), size);
      if (!interactions.contains(u.bits())) {
        fail(ErrorKind::invalid_argument, "n-Shapley needs every interaction up to the order");
      }
    }
  }

  InteractionAttribution out;
  out.order = order;
  // Phi^n_U = sum over supersets W of U (|W| <= n) of B_{|W|-|U|} phi_W,
  // accumulated by scattering each phi_W onto its subsets.
  for (const auto& [w_bits, phi] : interactions) {
    const Coalition w(w_bits);
    if (w.size() > order) continue;
    // Enumerate subsets of w, including w itself, excluding the empty set.
    std::uint64_t sub = w_bits;
    while (true) {
      if (sub != 0) {
        out.values[sub] += combin::bernoulli(w.size() - Coalition(sub).size()) * phi;
      }
      if (sub == 0) break;
      sub = (sub - 1) & w_bits;
    }
  }
  out.values[0] = nu_empty;  // generalized-efficiency convention for the empty set
  return out;
}

}  // namespace doshap
