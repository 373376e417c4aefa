#include "doshap/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "doshap/combinatorics.hpp"
#include "doshap/error.hpp"
#include "doshap/lattice.hpp"

namespace doshap {

namespace {

constexpr double kQueueEpsilon = 1e-12;

struct QueueEntry {
  CoalitionClass cls;
  double priority;
};

}  // namespace

BoundaryResult boundary_sampler(std::int64_t m, const CausalGraph& graph,
                                const WeightScheme& scheme, std::uint64_t seed) {
  if (m < 1) fail(ErrorKind::invalid_argument, "boundary_sampler: budget must be >= 1");
  const int d = graph.player_count();
  SplitRng rng(seed);

  std::vector<QueueEntry> queue;
  std::unordered_set<std::uint64_t> seen;
  BoundaryResult out;

  auto enqueue = [&](Coalition s) {
    const CoalitionClass cls = graph.find_class(s);
    if (!seen.insert(cls.closure.bits()).second) return;
    queue.push_back({cls, scheme.mean_abs_weight(cls) + kQueueEpsilon});
  };

  // Phase 1: one uniformly random set per size. Size d is the full set, so
  // the descending closure chains below it can reach every class.
  for (int ell = 1; ell <= d; ++ell) {
    const std::uint64_t rank = rng.next_below(combin::binom_exact(d, ell));
    enqueue(combin::unrank_combination(rank, graph.all_players(), ell));
  }
  if (d == 0) enqueue(Coalition());

  // Phase 2: weighted traversal.
  std::vector<double> priorities;
  while (static_cast<std::int64_t>(out.classes.size()) < m && !queue.empty()) {
    priorities.clear();
    double total = 0.0;
    for (const QueueEntry& e : queue) {
      priorities.push_back(e.priority);
      total += e.priority;
    }
    const std::size_t pick = rng.next_weighted(priorities, total);
    const CoalitionClass cls = queue[pick].cls;
    queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(pick));
    out.classes.push_back(cls);

    const LatticeNeighbors neighbors = lattice_neighbors(cls, graph);
    for (Coalition s : neighbors.lower) enqueue(s);
    for (Coalition s : neighbors.upper) enqueue(s);
  }

  out.all_sampled = queue.empty();
  return out;
}

std::vector<double> shapley_size_kernel(int d) {
  std::vector<double> w(static_cast<std::size_t>(d) + 1, 1.0);
  for (int s = 1; s < d; ++s) {
    w[s] = (d - 1) / (combin::binom(d, s) * s * (d - s));
  }
  return w;
}

namespace {

double inclusion_probability(int s, int d, double gamma, std::span<const double> weights) {
  if (s == 0 || s == d) return 1.0;  // endpoint sizes are always kept
  return std::min(gamma * weights[s] / combin::binom(d, s), 1.0);
}

// Draws `want` distinct ranks from [0, pool) in ascending order.
std::vector<std::uint64_t> draw_distinct_ranks(std::uint64_t pool, std::uint64_t want,
                                               SplitRng& rng) {
  std::vector<std::uint64_t> ranks;
  if (want == 0) return ranks;
  if (want >= pool) {
    ranks.resize(pool);
    for (std::uint64_t i = 0; i < pool; ++i) ranks[i] = i;
    return ranks;
  }
  if (pool <= std::max<std::uint64_t>(1024, 4 * want)) {
    // Partial Fisher-Yates over the explicit range.
    std::vector<std::uint64_t> all(pool);
    for (std::uint64_t i = 0; i < pool; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < want; ++i) {
      const std::uint64_t j = i + rng.next_below(pool - i);
      std::swap(all[i], all[j]);
    }
    ranks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want));
  } else {
    std::unordered_set<std::uint64_t> picked;
    while (picked.size() < want) picked.insert(rng.next_below(pool));
    ranks.assign(picked.begin(), picked.end());
  }
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

}  // namespace

SampleBatch simulated_sampler(std::span<const CoalitionClass> classes,
                              std::span<const double> values, std::int64_t b_sim,
                              std::span<const double> size_weights, int d, std::uint64_t seed) {
  if (classes.empty()) fail(ErrorKind::invalid_argument, "simulated_sampler: no classes");
  if (values.size() != classes.size()) {
    fail(ErrorKind::invalid_argument, "simulated_sampler: classes/values size mismatch");
  }
  if (b_sim < 1) fail(ErrorKind::invalid_argument, "simulated_sampler: budget must be >= 1");
  if (size_weights.size() != static_cast<std::size_t>(d) + 1) {
    fail(ErrorKind::invalid_argument, "simulated_sampler: need one weight per size");
  }

  // Step 1: available coalitions per size across the class intervals.
  std::vector<double> avail(static_cast<std::size_t>(d) + 1, 0.0);
  for (const CoalitionClass& cls : classes) {
    const int base = cls.basis.size();
    const int free_count = cls.closure.size() - base;
    for (int j = 0; j <= free_count; ++j) {
      avail[base + j] += combin::binom(free_count, j);
    }
  }

  // Step 2: calibrate gamma so the expected row count meets the budget.
  const auto expected_rows = [&](double gamma) {
    double total = 0.0;
    for (int s = 0; s <= d; ++s) {
      if (avail[s] > 0.0) total += avail[s] * inclusion_probability(s, d, gamma, size_weights);
    }
    return total;
  };
  double hi = 1.0;
  for (int s = 1; s < d; ++s) {
    if (size_weights[s] > 0.0) hi = std::max(hi, combin::binom(d, s) / size_weights[s]);
  }
  const double target = static_cast<double>(b_sim);
  double gamma = hi;
  if (expected_rows(hi) > target) {
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      gamma = 0.5 * (lo + hi);
      const double got = expected_rows(gamma);
      if (std::abs(got - target) <= 1e-6 * target) break;
      (got < target ? lo : hi) = gamma;
    }
  }  // otherwise every available coalition saturates at p = 1

  // Step 3: constructive sampling, class by class, ascending size, ranks in
  // ascending order; fully deterministic for a fixed seed.
  SplitRng rng(seed);
  SampleBatch batch;
  batch.d = d;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const CoalitionClass& cls = classes[ci];
    const Coalition free_pool = cls.closure - cls.basis;
    const int free_count = free_pool.size();
    for (int j = 0; j <= free_count; ++j) {
      const int s = cls.basis.size() + j;
      const double p = inclusion_probability(s, d, gamma, size_weights);
      if (p <= 0.0) continue;
      const std::uint64_t pool = combin::binom_exact(free_count, j);
      const double mu = static_cast<double>(pool) * p;
      std::uint64_t draws = static_cast<std::uint64_t>(std::floor(mu));
      const double frac = mu - std::floor(mu);
      if (frac > 0.0 && rng.next_bernoulli(frac)) ++draws;
      draws = std::min(draws, pool);
      if (draws == 0) continue;
      for (std::uint64_t rank : draw_distinct_ranks(pool, draws, rng)) {
        batch.rows.push_back(SampleRow{
            .coalition = cls.basis | combin::unrank_combination(rank, free_pool, j),
            .value = values[ci],
            .probability = p,
            .class_index = static_cast<int>(ci),
        });
      }
    }
  }
  return batch;
}

namespace {

double shapley_kernel_weight(int s, int d) {
  if (s == 0 || s == d) return 0.0;  // pinned by the constraints instead
  return (d - 1) / (combin::binom(d, s) * s * (d - s));
}

// Gaussian elimination with partial pivoting; a near-zero pivot means the
// batch does not determine the coefficients.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  const double tiny = std::max(scale, 1.0) * 1e-12;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < tiny) {
      fail(ErrorKind::validation,
           "under-determined sample batch: regression system is singular");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

struct EndpointValues {
  double nu_empty = 0.0;
  double nu_full = 0.0;
};

EndpointValues endpoint_values(const SampleBatch& batch) {
  bool have_empty = false;
  bool have_full = false;
  EndpointValues out;
  for (const SampleRow& row : batch.rows) {
    if (row.coalition.empty() && !have_empty) {
      out.nu_empty = row.value;
      have_empty = true;
    } else if (row.coalition == Coalition::full(batch.d) && !have_full) {
      out.nu_full = row.value;
      have_full = true;
    }
  }
  if (!have_empty || !have_full) {
    fail(ErrorKind::validation,
         "under-determined sample batch: missing the empty or full coalition");
  }
  return out;
}

}  // namespace

Attribution base_regression(const SampleBatch& batch) {
  const int d = batch.d;
  Attribution out;
  out.scheme = "shapley";
  if (d == 0) return out;
  const EndpointValues ends = endpoint_values(batch);

  // Normal equations of the weighted least squares plus one Lagrange row for
  // the efficiency constraint.
  const std::size_t n = static_cast<std::size_t>(d) + 1;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (const SampleRow& row : batch.rows) {
    const double weight = shapley_kernel_weight(row.coalition.size(), d) / row.probability;
    if (weight <= 0.0) continue;
    const double y = row.value - ends.nu_empty;
    row.coalition.for_each([&](int i) {
      row.coalition.for_each([&](int j) { a[i][j] += weight; });
      b[i] += weight * y;
    });
  }
  for (int i = 0; i < d; ++i) {
    a[i][n - 1] = 1.0;
    a[n - 1][i] = 1.0;
  }
  b[n - 1] = ends.nu_full - ends.nu_empty;

  std::vector<double> solution = solve_dense(std::move(a), std::move(b));
  solution.resize(static_cast<std::size_t>(d));
  out.values = std::move(solution);
  return out;
}

Attribution base_mc_msr(const SampleBatch& batch, const WeightScheme& scheme) {
  const int d = batch.d;
  Attribution out;
  out.scheme = scheme.name();
  out.values.assign(static_cast<std::size_t>(d), 0.0);
  if (d == 0) return out;

  // Self-normalized importance estimates of E[nu(S)] under the "member" and
  // "non-member" size distributions of the scheme.
  std::vector<double> pos_num(d, 0.0), pos_den(d, 0.0);
  std::vector<double> neg_num(d, 0.0), neg_den(d, 0.0);
  double all_num = 0.0;
  double all_den = 0.0;
  bool have_empty = false;
  bool have_full = false;
  double nu_empty = 0.0;
  double nu_full = 0.0;
  for (const SampleRow& row : batch.rows) {
    const int s = row.coalition.size();
    const double inv_p = 1.0 / row.probability;
    all_num += inv_p * row.value;
    all_den += inv_p;
    if (s == 0 && !have_empty) {
      have_empty = true;
      nu_empty = row.value;
    }
    if (s == d && !have_full) {
      have_full = true;
      nu_full = row.value;
    }
    const double w_in = (s >= 1) ? scheme.size_weight(s - 1) * inv_p : 0.0;
    const double w_out = (s <= d - 1) ? scheme.size_weight(s) * inv_p : 0.0;
    for (int i = 0; i < d; ++i) {
      if (row.coalition.contains(i)) {
        pos_num[i] += w_in * row.value;
        pos_den[i] += w_in;
      } else {
        neg_num[i] += w_out * row.value;
        neg_den[i] += w_out;
      }
    }
  }
  const double fallback = (all_den > 0.0) ? all_num / all_den : 0.0;
  for (int i = 0; i < d; ++i) {
    const double above = (pos_den[i] > 0.0) ? pos_num[i] / pos_den[i] : fallback;
    const double below = (neg_den[i] > 0.0) ? neg_num[i] / neg_den[i] : fallback;
    out.values[i] = above - below;
  }
  // Efficiency projection, valid for the Shapley weights only.
  if (scheme.name() == "shapley" && have_empty && have_full) {
    double sum = 0.0;
    for (double v : out.values) sum += v;
    const double shift = (nu_full - nu_empty - sum) / d;
    for (double& v : out.values) v += shift;
  }
  return out;
}

namespace {

void force_endpoint_classes(std::vector<CoalitionClass>& classes, const CausalGraph& graph,
                            std::int64_t budget) {
  const CoalitionClass empty_cls = graph.find_class(Coalition());
  const CoalitionClass full_cls = graph.find_class(graph.all_players());
  for (const CoalitionClass& forced : {empty_cls, full_cls}) {
    const auto match = [&](const CoalitionClass& c) { return c.closure == forced.closure; };
    if (std::any_of(classes.begin(), classes.end(), match)) continue;
    if (static_cast<std::int64_t>(classes.size()) >= budget) {
      // Evict the most recent sample that is not itself an endpoint class.
      const auto victim = std::find_if(classes.rbegin(), classes.rend(), [&](const CoalitionClass& c) {
        return c.closure != empty_cls.closure && c.closure != full_cls.closure;
      });
      if (victim == classes.rend()) continue;  // budget too small to host both
      classes.erase(std::next(victim).base());
    }
    classes.push_back(forced);
  }
}

}  // namespace

EstimateResult do_estimator(std::int64_t m, ValueOracle& oracle, const CausalGraph& graph,
                            BaseEstimator base, int multiplier, const WeightScheme& scheme,
                            std::uint64_t seed) {
  if (m < 1) fail(ErrorKind::invalid_argument, "do_estimator: budget must be >= 1");
  if (multiplier < 1) fail(ErrorKind::invalid_argument, "do_estimator: multiplier must be >= 1");
  const std::uint64_t queries_before = oracle.query_count();

  BoundaryResult sampled = boundary_sampler(m, graph, scheme, seed);

  EstimateResult out;
  out.all_sampled = sampled.all_sampled;

  if (sampled.all_sampled) {
    // Step 2A: the inventory is complete; the class sum is exact.
    out.classes_sampled = static_cast<std::int64_t>(sampled.classes.size());
    out.attribution = exact_values(ClassInventory(std::move(sampled.classes)), oracle, scheme);
    out.queries = oracle.query_count() - queries_before;
    return out;
  }

  // Step 2B: query each sampled class once, then estimate from simulation.
  force_endpoint_classes(sampled.classes, graph, m);
  std::vector<double> values;
  values.reserve(sampled.classes.size());
  for (const CoalitionClass& cls : sampled.classes) values.push_back(oracle.evaluate_class(cls));

  const std::uint64_t sim_seed = SplitRng(seed).split(0x5157).next_u64();
  const std::vector<double> kernel = shapley_size_kernel(graph.player_count());
  const SampleBatch batch =
      simulated_sampler(sampled.classes, values, m * static_cast<std::int64_t>(multiplier),
                        kernel, graph.player_count(), sim_seed);

  out.attribution =
      (base == BaseEstimator::regression) ? base_regression(batch) : base_mc_msr(batch, scheme);
  out.classes_sampled = static_cast<std::int64_t>(sampled.classes.size());
  out.queries = oracle.query_count() - queries_before;
  return out;
}

// ---- Stratified reference sampler ----------------------------------------

CountSeenResult count_seen(int ell, Coalition current, Coalition remaining,
                           std::span<const CoalitionClass> seen) {
  CountSeenResult out;
  for (const CoalitionClass& cls : seen) {
    if (!cls.basis.subset_of(current | remaining)) continue;
    if (!current.subset_of(cls.closure)) continue;
    out.applicable.push_back(cls);
    const int options = (remaining & (cls.closure - cls.basis)).size();
    const int spaces = ell - current.size() - (remaining & cls.basis).size();
    if (spaces >= 0 && spaces <= options) {
      out.count += combin::binom_exact(options, spaces);
    }
  }
  return out;
}

Coalition sample_unseen_by_size(int ell, Coalition start, std::span<const CoalitionClass> seen,
                                int d, SplitRng& rng) {
  Coalition current = start;
  Coalition remaining = Coalition::full(d) - start;
  // Classes whose size range can host a set of size ell.
  std::vector<CoalitionClass> relevant;
  for (const CoalitionClass& cls : seen) {
    if (cls.basis.size() <= ell && ell <= cls.closure.size()) relevant.push_back(cls);
  }
  while (current.size() < ell) {
    std::array<int, Coalition::kMaxPlayers> pool{};
    int pool_size = 0;
    remaining.for_each([&](int p) { pool[pool_size++] = p; });
    const int j = pool[rng.next_below(static_cast<std::uint64_t>(pool_size))];
    const Coalition rest = remaining.without(j);

    CountSeenResult with_j = count_seen(ell, current.with(j), rest, relevant);
    CountSeenResult without_j = count_seen(ell, current, rest, relevant);
    const std::uint64_t slots = static_cast<std::uint64_t>(ell - current.size());
    const std::uint64_t u_in =
        combin::binom_exact(rest.size(), static_cast<int>(slots) - 1) - with_j.count;
    const std::uint64_t u_out =
        combin::binom_exact(rest.size(), static_cast<int>(slots)) - without_j.count;
    if (u_in + u_out == 0) {
      fail(ErrorKind::internal, "sample_unseen_by_size: no unseen completion exists");
    }
    const bool include =
        rng.next_bernoulli(static_cast<double>(u_in) / static_cast<double>(u_in + u_out));
    if (include) {
      current = current.with(j);
      relevant = std::move(with_j.applicable);
    } else {
      relevant = std::move(without_j.applicable);
    }
    remaining = rest;
  }
  return current;
}

std::vector<CoalitionClass> class_sampler(std::int64_t m, const CausalGraph& graph,
                                          const WeightScheme& scheme, std::uint64_t seed) {
  if (m < 1) fail(ErrorKind::invalid_argument, "class_sampler: budget must be >= 1");
  const int d = graph.player_count();
  SplitRng rng(seed);

  std::vector<CoalitionClass> classes;
  if (d == 0) {
    classes.push_back(graph.find_class(Coalition()));
    return classes;
  }

  // Residual masses: mu_pos[l][i] covers unseen size-l sets containing i,
  // mu_neg[l][i] the unseen size-l sets excluding i.
  std::vector<std::vector<double>> mu_pos(static_cast<std::size_t>(d) + 1,
                                          std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> mu_neg(static_cast<std::size_t>(d) + 1,
                                          std::vector<double>(d, 0.0));
  for (int ell = 1; ell <= d; ++ell) {
    const double mass = scheme.size_weight(ell - 1) * combin::binom(d - 1, ell - 1);
    for (int i = 0; i < d; ++i) mu_pos[ell][i] = mass;
  }
  for (int ell = 0; ell <= d - 1; ++ell) {
    const double mass = scheme.size_weight(ell) * combin::binom(d - 1, ell);
    for (int i = 0; i < d; ++i) mu_neg[ell][i] = mass;
  }
  double unseen_sets = std::ldexp(1.0, d);

  std::vector<double> size_mass(static_cast<std::size_t>(d) + 1, 0.0);
  for (std::int64_t step = 0; step < m; ++step) {
    if (unseen_sets < 0.5) break;  // every class discovered

    const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d)));
    double sum_pos = 0.0;
    double sum_neg = 0.0;
    for (int ell = 1; ell <= d; ++ell) sum_pos += mu_pos[ell][i];
    for (int ell = 0; ell <= d - 1; ++ell) sum_neg += mu_neg[ell][i];
    const bool include = rng.next_bernoulli(sum_pos / (sum_pos + sum_neg));

    const auto& mu = include ? mu_pos : mu_neg;
    double total = 0.0;
    for (int ell = 0; ell <= d; ++ell) {
      size_mass[ell] = mu[ell][i];
      total += size_mass[ell];
    }
    const int ell = static_cast<int>(rng.next_weighted(size_mass, total));

    const Coalition start = include ? Coalition({i}) : Coalition();
    const Coalition s = sample_unseen_by_size(ell, start, classes, d, rng);
    const CoalitionClass cls = graph.find_class(s);
    classes.push_back(cls);

    // Retire the whole interval [basis, closure] from the masses.
    const int base = cls.basis.size();
    const int free_count = cls.closure.size() - base;
    unseen_sets -= std::ldexp(1.0, free_count);
    for (int size = base; size <= base + free_count; ++size) {
      const int picks = size - base;
      for (int p = 0; p < d; ++p) {
        double in_count = 0.0;
        double out_count = 0.0;
        if (cls.basis.contains(p)) {
          in_count = combin::binom(free_count, picks);
        } else if (cls.closure.contains(p)) {
          in_count = combin::binom(free_count - 1, picks - 1);
          out_count = combin::binom(free_count - 1, picks);
        } else {
          out_count = combin::binom(free_count, picks);
        }
        if (size >= 1 && in_count > 0.0) {
          mu_pos[size][p] = std::max(0.0, mu_pos[size][p] - scheme.size_weight(size - 1) * in_count);
        }
        if (size <= d - 1 && out_count > 0.0) {
          mu_neg[size][p] = std::max(0.0, mu_neg[size][p] - scheme.size_weight(size) * out_count);
        }
      }
    }
  }
  return classes;
}

}  // namespace doshap
