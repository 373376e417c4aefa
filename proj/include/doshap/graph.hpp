#ifndef DOSHAP_GRAPH_HPP
#define DOSHAP_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "doshap/coalition.hpp"

namespace doshap {

// One equivalence class of the intervention lattice: every coalition T with
// basis <= T <= closure intervenes identically.
struct CoalitionClass {
  Coalition basis;
  Coalition closure;

  bool simple() const { return basis == closure; }
  bool operator==(const CoalitionClass&) const = default;
};

// Raw graph description, as read from a file. Nodes may include latent
// variables; bidirected pairs may be given directly.
struct GraphSpec {
  std::vector<std::string> nodes;
  std::string target;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::pair<std::string, std::string>> bidirected;
  std::vector<std::string> latent;
};

// Directed causal graph over players 0..d-1 plus the target Y. Construction
// prunes players with no directed path to Y, so every retained player is an
// ancestor of the target. Immutable after construction; all operations are
// pure and safe for concurrent readers.
class CausalGraph {
 public:
  // Builds from measured nodes only (latents must be projected out first).
  // Node indices refer to positions in `player_names`; `to_target` lists
  // players with a direct edge to Y. Prunes non-ancestors of Y.
  CausalGraph(std::vector<std::string> player_names, std::string target_name,
              const std::vector<std::pair<int, int>>& edges,
              const std::vector<int>& to_target);

  int player_count() const { return d_; }
  int edge_count() const { return edge_count_; }
  Coalition all_players() const { return Coalition::full(d_); }

  const std::string& player_name(int player) const { return names_[player]; }
  const std::vector<std::string>& player_names() const { return names_; }
  const std::string& target_name() const { return target_name_; }
  // Players dropped by the pruning constructor; their attribution is 0.
  const std::vector<std::string>& pruned_names() const { return pruned_; }

  // -1 when the name is unknown.
  int player_index(const std::string& name) const;

  Coalition parents(int player) const { return Coalition(parent_mask_[player]); }
  Coalition children(int player) const { return Coalition(child_mask_[player]); }
  Coalition parents_of_target() const { return Coalition(to_y_); }
  bool has_edge(int from, int to) const { return Coalition(child_mask_[from]).contains(to); }
  bool has_edge_to_target(int from) const { return Coalition(to_y_).contains(from); }

  // Players in ascending topological order (parents before children).
  const std::vector<int>& topological_order() const { return topo_; }

  // All players with a directed path to Y once every incoming edge to
  // `removed_incoming` is deleted. Y itself is excluded by convention.
  Coalition ancestors_of_target(Coalition removed_incoming) const;

  // Basis and closure of S (FindClass). O(d + e).
  CoalitionClass find_class(Coalition s) const;

 private:
  int d_ = 0;
  int edge_count_ = 0;
  std::vector<std::uint64_t> child_mask_;
  std::vector<std::uint64_t> parent_mask_;
  std::uint64_t to_y_ = 0;
  std::vector<int> topo_;
  std::vector<std::string> names_;
  std::string target_name_;
  std::vector<std::string> pruned_;
};

// Acyclic directed mixed graph: a pruned CausalGraph plus bidirected edges
// encoding latent confounding. Node index d (== player_count) denotes Y.
struct Admg {
  CausalGraph graph;
  // Unordered pairs over {0..d-1, d}; both endpoints distinct and measured.
  std::vector<std::pair<int, int>> bidirected;

  int y_index() const { return graph.player_count(); }
  int measured_count() const { return graph.player_count() + 1; }
};

// Latent projection followed by pruning to the ancestors of the target.
// Directed edges survive when all intermediate hops are latent; a bidirected
// edge joins every measured pair confounded through a latent fork. Explicit
// bidirected pairs in the spec are kept as given. Rejects cyclic input.
Admg build_admg(const GraphSpec& spec);

// Directed part only.
CausalGraph build_graph(const GraphSpec& spec);

}  // namespace doshap

#endif
