#include "doshap/lattice.hpp"

#include <algorithm>
#include <unordered_set>

#include "doshap/error.hpp"

namespace doshap {

ClassInventory::ClassInventory(std::vector<CoalitionClass> classes)
    : classes_(std::move(classes)) {
  std::sort(classes_.begin(), classes_.end(), [](const CoalitionClass& a, const CoalitionClass& b) {
    if (a.closure.size() != b.closure.size()) return a.closure.size() > b.closure.size();
    return a.closure.bits() < b.closure.bits();
  });
}

ClassInventory all_classes(const CausalGraph& graph, AllClassesStats* stats) {
  const int d = graph.player_count();
  std::vector<CoalitionClass> found;
  std::unordered_set<std::uint64_t> seen;
  std::int64_t calls = 0;

  // Work queue bucketed by closure size; memory stays proportional to the
  // widest populated level. The bool marks sets already known to be simple.
  std::vector<std::vector<std::pair<Coalition, bool>>> level(static_cast<std::size_t>(d) + 1);
  const Coalition full = graph.all_players();
  level[d].emplace_back(full, false);
  seen.insert(full.bits());

  for (int ell = d; ell >= 0; --ell) {
    for (auto& [closed, known_simple] : level[ell]) {
      Coalition basis;
      if (known_simple) {
        basis = closed;
      } else {
        ++calls;
        const CoalitionClass cls = graph.find_class(closed);
        basis = cls.basis;
      }
      found.push_back(CoalitionClass{basis, closed});
      const bool child_simple = (basis == closed);
      basis.for_each([&](int j) {
        const Coalition child = closed.without(j);
        if (seen.insert(child.bits()).second) {
          level[ell - 1].emplace_back(child, child_simple);
        }
      });
    }
    level[ell].clear();
    level[ell].shrink_to_fit();
  }

  if (stats != nullptr) stats->find_class_calls = calls;
  return ClassInventory(std::move(found));
}

LatticeNeighbors lattice_neighbors(const CoalitionClass& cls, const CausalGraph& graph) {
  LatticeNeighbors out;
  out.lower.reserve(cls.basis.size());
  cls.basis.for_each([&](int j) { out.lower.push_back(cls.closure.without(j)); });
  const Coalition outside = graph.all_players() - cls.closure;
  out.upper.reserve(outside.size());
  outside.for_each([&](int j) { out.upper.push_back(cls.closure.with(j)); });
  return out;
}

}  // namespace doshap
