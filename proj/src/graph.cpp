#include "doshap/graph.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "doshap/error.hpp"

namespace doshap {

namespace {

// Kahn's algorithm with smallest-index tie-break; empty result on a cycle.
std::vector<int> topo_sort(int n, const std::vector<std::vector<int>>& children,
                           const std::vector<int>& indegree_in) {
  std::vector<int> indegree = indegree_in;
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> emitted(n, 0);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if (!emitted[v] && indegree[v] == 0) {
        pick = v;
        break;
      }
    }
    if (pick < 0) return {};  // cycle
    emitted[pick] = 1;
    order.push_back(pick);
    for (int c : children[pick]) --indegree[c];
  }
  return order;
}

}  // namespace

CausalGraph::CausalGraph(std::vector<std::string> player_names, std::string target_name,
                         const std::vector<std::pair<int, int>>& edges,
                         const std::vector<int>& to_target) {
  const int n = static_cast<int>(player_names.size());
  std::vector<std::vector<int>> children(n), parents(n);
  std::vector<int> indegree(n, 0);
  std::vector<char> direct_to_y(n, 0);
  std::unordered_set<std::uint64_t> seen_edges;

  auto check_index = [&](int v) {
    if (v < 0 || v >= n) fail(ErrorKind::invalid_argument, "edge references unknown player index");
  };
  for (auto [from, to] : edges) {
    check_index(from);
    check_index(to);
    if (from == to) fail(ErrorKind::validation, "self-loop on '" + player_names[from] + "'");
    const std::uint64_t key = (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint32_t>(to);
    if (!seen_edges.insert(key).second) continue;
    children[from].push_back(to);
    parents[to].push_back(from);
    ++indegree[to];
  }
  for (int p : to_target) {
    check_index(p);
    direct_to_y[p] = 1;
  }

  if (topo_sort(n, children, indegree).empty() && n > 0) {
    fail(ErrorKind::validation, "graph is cyclic");
  }

  // Keep only ancestors of Y.
  std::vector<char> keep(n, 0);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (direct_to_y[v] && !keep[v]) {
      keep[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int p : parents[v]) {
      if (!keep[p]) {
        keep[p] = 1;
        stack.push_back(p);
      }
    }
  }

  std::vector<int> remap(n, -1);
  for (int v = 0; v < n; ++v) {
    if (keep[v]) {
      remap[v] = d_++;
      names_.push_back(player_names[v]);
    } else {
      pruned_.push_back(player_names[v]);
    }
  }
  if (d_ > Coalition::kMaxPlayers) {
    fail(ErrorKind::validation,
         "graph has " + std::to_string(d_) + " players after pruning; at most 64 are supported");
  }

  target_name_ = std::move(target_name);
  child_mask_.assign(d_, 0);
  parent_mask_.assign(d_, 0);
  std::vector<std::vector<int>> kept_children(d_);
  std::vector<int> kept_indegree(d_, 0);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const int nv = remap[v];
    if (direct_to_y[v]) {
      to_y_ |= std::uint64_t{1} << nv;
      ++edge_count_;
    }
    for (int c : children[v]) {
      if (!keep[c]) continue;
      const int nc = remap[c];
      child_mask_[nv] |= std::uint64_t{1} << nc;
      parent_mask_[nc] |= std::uint64_t{1} << nv;
      kept_children[nv].push_back(nc);
      ++kept_indegree[nc];
      ++edge_count_;
    }
  }
  topo_ = topo_sort(d_, kept_children, kept_indegree);
}

int CausalGraph::player_index(const std::string& name) const {
  for (int i = 0; i < d_; ++i) {
    if (names_[i] == name) return i;
  }
  return -1;
}

Coalition CausalGraph::ancestors_of_target(Coalition removed_incoming) const {
  const std::uint64_t removed = removed_incoming.bits();
  std::uint64_t reached = to_y_;
  std::uint64_t frontier = to_y_ & ~removed;
  while (frontier != 0) {
    const int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const std::uint64_t fresh = parent_mask_[v] & ~reached;
    reached |= fresh;
    frontier |= fresh & ~removed;
  }
  return Coalition(reached);
}

CoalitionClass CausalGraph::find_class(Coalition s) const {
  const Coalition reaching = ancestors_of_target(s);
  return CoalitionClass{
      .basis = s & reaching,
      .closure = s | (all_players() - reaching),
  };
}

namespace {

struct SpecIndex {
  std::unordered_map<std::string, int> by_name;
  int target = -1;
  std::vector<char> latent;

  explicit SpecIndex(const GraphSpec& spec) {
    const int n = static_cast<int>(spec.nodes.size());
    if (n == 0) fail(ErrorKind::validation, "graph has no nodes");
    latent.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      if (!by_name.emplace(spec.nodes[i], i).second) {
        fail(ErrorKind::validation, "duplicate node name '" + spec.nodes[i] + "'");
      }
    }
    const auto it = by_name.find(spec.target);
    if (it == by_name.end()) fail(ErrorKind::validation, "target '" + spec.target + "' is not a node");
    target = it->second;
    for (const auto& name : spec.latent) {
      const auto lit = by_name.find(name);
      if (lit == by_name.end()) fail(ErrorKind::validation, "latent node '" + name + "' is not a node");
      latent[lit->second] = 1;
    }
    if (latent[target]) fail(ErrorKind::validation, "target must be a measured node");
  }

  int resolve(const std::string& name) const {
    const auto it = by_name.find(name);
    if (it == by_name.end()) fail(ErrorKind::validation, "edge references unknown node '" + name + "'");
    return it->second;
  }
};

}  // namespace

Admg build_admg(const GraphSpec& spec) {
  const SpecIndex index(spec);
  const int n = static_cast<int>(spec.nodes.size());

  std::vector<std::vector<int>> children(n);
  std::vector<int> indegree(n, 0);
  std::unordered_set<std::uint64_t> seen_edges;
  for (const auto& [from_name, to_name] : spec.edges) {
    const int from = index.resolve(from_name);
    const int to = index.resolve(to_name);
    if (from == to) fail(ErrorKind::validation, "self-loop on '" + from_name + "'");
    const std::uint64_t key = (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint32_t>(to);
    if (!seen_edges.insert(key).second) continue;
    children[from].push_back(to);
    ++indegree[to];
  }

  const std::vector<int> order = topo_sort(n, children, indegree);
  if (order.empty()) fail(ErrorKind::validation, "graph is cyclic");

  // Measured nodes reachable from each latent through latent-only hops.
  // Latents are processed in reverse topological order so children are done
  // before their parents.
  std::vector<std::vector<int>> latent_down(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    if (!index.latent[u]) continue;
    std::unordered_set<int> down;
    for (int c : children[u]) {
      if (index.latent[c]) {
        down.insert(latent_down[c].begin(), latent_down[c].end());
      } else {
        down.insert(c);
      }
    }
    latent_down[u].assign(down.begin(), down.end());
    std::sort(latent_down[u].begin(), latent_down[u].end());
  }

  // Projected directed edges between measured nodes.
  std::vector<std::pair<int, int>> measured_edges;
  for (int v = 0; v < n; ++v) {
    if (index.latent[v]) continue;
    std::unordered_set<int> targets;
    for (int c : children[v]) {
      if (index.latent[c]) {
        targets.insert(latent_down[c].begin(), latent_down[c].end());
      } else {
        targets.insert(c);
      }
    }
    for (int t : targets) measured_edges.emplace_back(v, t);
  }

  // Bidirected pairs from latent forks plus any given explicitly.
  std::unordered_set<std::uint64_t> pair_keys;
  std::vector<std::pair<int, int>> measured_pairs;
  auto add_pair = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    if (pair_keys.insert(key).second) measured_pairs.emplace_back(a, b);
  };
  for (int u = 0; u < n; ++u) {
    if (!index.latent[u]) continue;
    const auto& down = latent_down[u];
    for (std::size_t i = 0; i < down.size(); ++i) {
      for (std::size_t j = i + 1; j < down.size(); ++j) add_pair(down[i], down[j]);
    }
  }
  for (const auto& [a_name, b_name] : spec.bidirected) {
    const int a = index.resolve(a_name);
    const int b = index.resolve(b_name);
    if (index.latent[a] || index.latent[b]) {
      fail(ErrorKind::validation, "bidirected edge touches a latent node");
    }
    if (a == b) fail(ErrorKind::validation, "bidirected self-pair on '" + a_name + "'");
    add_pair(a, b);
  }

  // Reindex measured non-target nodes as candidate players.
  std::vector<int> player_of(n, -1);
  std::vector<std::string> player_names;
  for (int v = 0; v < n; ++v) {
    if (index.latent[v] || v == index.target) continue;
    player_of[v] = static_cast<int>(player_names.size());
    player_names.push_back(spec.nodes[v]);
  }
  std::vector<std::pair<int, int>> player_edges;
  std::vector<int> to_target;
  for (auto [from, to] : measured_edges) {
    if (from == index.target) continue;  // descendants of Y get pruned anyway
    if (to == index.target) {
      to_target.push_back(player_of[from]);
    } else {
      player_edges.emplace_back(player_of[from], player_of[to]);
    }
  }

  Admg admg{
      .graph = CausalGraph(std::move(player_names), spec.target, player_edges, to_target),
      .bidirected = {},
  };

  // Remap bidirected pairs onto the pruned player indices; pairs touching a
  // pruned node vanish with it.
  const int y = admg.y_index();
  for (auto [a, b] : measured_pairs) {
    const int ra = (a == index.target) ? y : admg.graph.player_index(spec.nodes[a]);
    const int rb = (b == index.target) ? y : admg.graph.player_index(spec.nodes[b]);
    if (ra < 0 || rb < 0) continue;
    admg.bidirected.emplace_back(std::min(ra, rb), std::max(ra, rb));
  }
  std::sort(admg.bidirected.begin(), admg.bidirected.end());
  return admg;
}

CausalGraph build_graph(const GraphSpec& spec) { return build_admg(spec).graph; }

}  // namespace doshap
