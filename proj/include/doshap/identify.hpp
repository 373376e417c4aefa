#ifndef DOSHAP_IDENTIFY_HPP
#define DOSHAP_IDENTIFY_HPP

#include <vector>

#include "doshap/graph.hpp"

namespace doshap {

// Maximal bidirected-connected node sets of the ADMG's measured nodes
// (players 0..d-1 plus Y at index d). A partition, ordered by smallest
// member; members ascending.
std::vector<std::vector<int>> c_components(const Admg& admg);

// Whether P_S(T) is identifiable from the graph, by the seven-line ID
// recursion. T and S must be disjoint sets of measured node indices.
// `max_depth` (optional) receives the deepest recursion level reached.
bool id_identifiable(const std::vector<int>& effect, const std::vector<int>& intervention,
                     const Admg& admg, int* max_depth = nullptr);

struct IdentifyResult {
  bool identifiable = true;
  std::vector<int> failing_singletons;  // players whose nu({j}) is not identifiable
};

// Singleton sufficiency check: the full do-Shapley explanation is
// identifiable iff every nu({j}) is, so d ID calls decide it.
IdentifyResult do_shapley_identifiable(const Admg& admg);

}  // namespace doshap

#endif
