#include "doshap/identify.hpp"

#include <bit>

#include "doshap/error.hpp"

namespace doshap {

namespace {

// Node set over up to 128 measured nodes (64 players plus Y needs 65 bits).
struct Mask128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  static Mask128 single(int v) {
    Mask128 m;
    m.set(v);
    return m;
  }

  void set(int v) { (v < 64 ? lo : hi) |= std::uint64_t{1} << (v & 63); }
  bool test(int v) const { return (((v < 64) ? lo : hi) >> (v & 63)) & 1; }
  bool none() const { return lo == 0 && hi == 0; }
  bool any() const { return !none(); }
  int count() const { return std::popcount(lo) + std::popcount(hi); }

  friend Mask128 operator|(Mask128 a, Mask128 b) { return {a.lo | b.lo, a.hi | b.hi}; }
  friend Mask128 operator&(Mask128 a, Mask128 b) { return {a.lo & b.lo, a.hi & b.hi}; }
  friend Mask128 operator-(Mask128 a, Mask128 b) { return {a.lo & ~b.lo, a.hi & ~b.hi}; }
  friend bool operator==(Mask128 a, Mask128 b) { return a.lo == b.lo && a.hi == b.hi; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t rest = lo; rest != 0; rest &= rest - 1) fn(std::countr_zero(rest));
    for (std::uint64_t rest = hi; rest != 0; rest &= rest - 1) fn(64 + std::countr_zero(rest));
  }
};

struct IdContext {
  int n = 0;                     // measured node count (players + Y)
  std::vector<Mask128> parents;  // directed parents per node
  std::vector<Mask128> bidir;    // bidirected adjacency per node

  explicit IdContext(const Admg& admg) {
    const int d = admg.graph.player_count();
    n = d + 1;
    parents.assign(n, Mask128{});
    bidir.assign(n, Mask128{});
    for (int v = 0; v < d; ++v) {
      admg.graph.parents(v).for_each([&](int p) { parents[v].set(p); });
    }
    admg.graph.parents_of_target().for_each([&](int p) { parents[d].set(p); });
    for (auto [a, b] : admg.bidirected) {
      bidir[a].set(b);
      bidir[b].set(a);
    }
  }

  Mask128 all() const {
    Mask128 m;
    for (int v = 0; v < n; ++v) m.set(v);
    return m;
  }

  // An_{G[universe]_{bar(cut)}}(t): ancestors of t (t included) within the
  // induced subgraph, after deleting every edge into a cut node.
  Mask128 ancestors(Mask128 universe, Mask128 t, Mask128 cut) const {
    Mask128 reached = t & universe;
    Mask128 frontier = reached - cut;
    while (frontier.any()) {
      Mask128 next;
      frontier.for_each([&](int v) {
        const Mask128 fresh = (parents[v] & universe) - reached;
        reached = reached | fresh;
        next = next | fresh;
      });
      frontier = next - cut;
    }
    return reached;
  }

  // Maximal bidirected-connected components within the universe, ordered by
  // smallest member.
  std::vector<Mask128> components(Mask128 universe) const {
    std::vector<Mask128> out;
    Mask128 unvisited = universe;
    for (int v = 0; v < n; ++v) {
      if (!unvisited.test(v)) continue;
      Mask128 comp = Mask128::single(v);
      Mask128 frontier = comp;
      while (frontier.any()) {
        Mask128 next;
        frontier.for_each([&](int u) {
          const Mask128 fresh = (bidir[u] & universe) - comp;
          comp = comp | fresh;
          next = next | fresh;
        });
        frontier = next;
      }
      unvisited = unvisited - comp;
      out.push_back(comp);
    }
    return out;
  }
};

struct DepthTracker {
  int limit = 0;
  int deepest = 0;
};

bool id_recurse(const IdContext& ctx, Mask128 universe, Mask128 t, Mask128 s, int depth,
                DepthTracker& tracker) {
  tracker.deepest = std::max(tracker.deepest, depth);
  if (depth > tracker.limit) {
    fail(ErrorKind::internal, "ID recursion exceeded its depth bound");
  }

  // Line 1: nothing intervened.
  if (s.none()) return true;

  // Line 2: restrict to the ancestors of T.
  const Mask128 anc = ctx.ancestors(universe, t, Mask128{});
  if (!(anc == universe)) {
    return id_recurse(ctx, anc, t, s & anc, depth + 1, tracker);
  }

  // Line 3: absorb nodes cut off from T by the intervention.
  const Mask128 w = (universe - s) - ctx.ancestors(universe, t, s);
  if (w.any()) {
    return id_recurse(ctx, universe, t, s | w, depth + 1, tracker);
  }

  // Line 4: factor over the C-components of G[V \ S].
  const std::vector<Mask128> factors = ctx.components(universe - s);
  if (factors.size() > 1) {
    for (const Mask128& piece : factors) {
      if (!id_recurse(ctx, universe, piece, universe - piece, depth + 1, tracker)) {
        return false;
      }
    }
    return true;
  }

  const std::vector<Mask128> whole = ctx.components(universe);
  // Line 5: the whole graph is one C-component.
  if (whole.size() == 1) return false;

  // Lines 6 and 7: V \ S sits inside exactly one maximal C-component.
  const Mask128 rest = universe - s;
  for (const Mask128& comp : whole) {
    if ((rest - comp).none()) {
      if (comp == rest) return true;                                     // line 6
      return id_recurse(ctx, comp, t, s & comp, depth + 1, tracker);     // line 7
    }
  }
  fail(ErrorKind::internal, "ID: V \\ S not contained in any C-component");
}

Mask128 to_mask(const std::vector<int>& nodes, int n, const char* what) {
  Mask128 m;
  for (int v : nodes) {
    if (v < 0 || v >= n) {
      fail(ErrorKind::invalid_argument, std::string(what) + " references an unknown node");
    }
    m.set(v);
  }
  return m;
}

}  // namespace

std::vector<std::vector<int>> c_components(const Admg& admg) {
  const IdContext ctx(admg);
  std::vector<std::vector<int>> out;
  for (const Mask128& comp : ctx.components(ctx.all())) {
    std::vector<int> members;
    comp.for_each([&](int v) { members.push_back(v); });
    out.push_back(std::move(members));
  }
  return out;
}

bool id_identifiable(const std::vector<int>& effect, const std::vector<int>& intervention,
                     const Admg& admg, int* max_depth) {
  const IdContext ctx(admg);
  const Mask128 t = to_mask(effect, ctx.n, "effect set");
  const Mask128 s = to_mask(intervention, ctx.n, "intervention set");
  if ((t & s).any()) {
    fail(ErrorKind::invalid_argument, "effect and intervention sets overlap");
  }
  DepthTracker tracker{.limit = 3 * ctx.n + 3, .deepest = 0};
  const bool ok = id_recurse(ctx, ctx.all(), t, s, 0, tracker);
  if (max_depth != nullptr) *max_depth = tracker.deepest;
  return ok;
}

IdentifyResult do_shapley_identifiable(const Admg& admg) {
  IdentifyResult out;
  const std::vector<int> effect{admg.y_index()};
  for (int j = 0; j < admg.graph.player_count(); ++j) {
    if (!id_identifiable(effect, {j}, admg)) {
      out.failing_singletons.push_back(j);
    }
  }
  out.identifiable = out.failing_singletons.empty();
  return out;
}

}  // namespace doshap
