#ifndef DOSHAP_LATTICE_HPP
#define DOSHAP_LATTICE_HPP

#include <cstdint>
#include <vector>

#include "doshap/graph.hpp"

namespace doshap {

// Every equivalence class of the intervention lattice, in canonical order:
// closure size descending, then closure bits ascending. Immutable.
class ClassInventory {
 public:
  explicit ClassInventory(std::vector<CoalitionClass> classes);

  const std::vector<CoalitionClass>& classes() const { return classes_; }
  std::int64_t count() const { return static_cast<std::int64_t>(classes_.size()); }

  auto begin() const { return classes_.begin(); }
  auto end() const { return classes_.end(); }
  const CoalitionClass& operator[](std::size_t i) const { return classes_[i]; }

 private:
  std::vector<CoalitionClass> classes_;
};

struct AllClassesStats {
  std::int64_t find_class_calls = 0;
};

// Enumerates all closed sets by descending from the full set, generating
// closure \ {j} for each basis member j. Once a class is simple, its subsets
// are emitted without further FindClass calls, so the total number of
// FindClass invocations is at most r.
ClassInventory all_classes(const CausalGraph& graph, AllClassesStats* stats = nullptr);

struct LatticeNeighbors {
  std::vector<Coalition> lower;  // closure minus each basis member
  std::vector<Coalition> upper;  // closure plus each non-member
};

LatticeNeighbors lattice_neighbors(const CoalitionClass& cls, const CausalGraph& graph);

}  // namespace doshap

#endif
