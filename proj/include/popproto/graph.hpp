#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace popproto {

using Node = std::uint32_t;
using EdgeId = std::uint32_t;

/// Unordered edge stored with u < v.
struct Edge {
  Node u = 0;
  Node v = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

struct Incidence {
  Node neighbour;
  EdgeId edge;
};

/// Immutable undirected simple graph on nodes 0..n-1 with CSR adjacency.
///
/// Metrics (maximum degree, diameter, tree-ness) are computed once at
/// construction, so a Graph can be shared freely between threads.
/// `degree_cap` is the degree bound of the graph class the graph was drawn
/// from; protocols size their palettes from it rather than from the realised
/// maximum degree.
class Graph {
 public:
  Graph() = default;

  /// Validates ids, self-loops and duplicates; throws InvalidParameter.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::optional<std::size_t> degree_cap = std::nullopt);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const Incidence> incident(Node v) const noexcept {
    return {incidences_.data() + offsets_[v], incidences_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Node v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::optional<EdgeId> find_edge(Node a, Node b) const noexcept;

  bool is_connected() const noexcept { return diameter_.has_value(); }
  bool is_tree() const noexcept { return is_connected() && edges_.size() + 1 == n_; }
  std::size_t max_degree() const noexcept { return max_degree_; }
  std::size_t degree_cap() const noexcept { return degree_cap_; }

  /// Exact diameter; throws InvalidParameter on a disconnected graph.
  std::size_t diameter() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidences_;
  std::size_t max_degree_ = 0;
  std::size_t degree_cap_ = 0;
  std::optional<std::size_t> diameter_;
};

inline constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

/// Hop distances from `source`; unreachable nodes get kUnreachable. When
/// `removed` is set, that edge is treated as absent.
std::vector<std::size_t> bfs_distances(const Graph& g, Node source,
                                       std::optional<EdgeId> removed = std::nullopt);

/// Largest finite BFS distance from `source` (optionally in G minus `removed`).
std::size_t eccentricity(const Graph& g, Node source,
                         std::optional<EdgeId> removed = std::nullopt);

std::size_t diameter(const Graph& g);
std::size_t max_degree(const Graph& g);

// Generators. All return trees and throw InvalidParameter on bad input.
Graph generate_path(std::size_t n);
Graph generate_star(std::size_t n);
Graph generate_balanced_binary_tree(std::size_t n);
Graph generate_random_bounded_degree_tree(std::size_t n, std::size_t delta_cap,
                                          std::uint64_t seed);
/// Path v_0..v_{8k-1} with breadth-first balanced binary trees of
/// floor((n-8k)/2) and ceil((n-8k)/2) nodes hung off v_0 and v_{8k-1}.
/// Requires ceil(log2 n) <= k <= n/8.
Graph generate_lower_bound_tree(std::size_t n, std::size_t k);

/// Colours are indexed by node; any integer labels are accepted.
bool is_valid_two_hop_colouring(const Graph& g, std::span<const std::uint32_t> colours);

// Plain edge-list file format: "n m" then m lines "u v" (0-based, LF).
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

enum class GraphFamily { Path, Star, BalancedBinary, RandomBoundedDegree, LowerBoundTnk, FromFile };

/// Fully determines a graph. `seed` only matters for the random family; when
/// it is absent the caller substitutes the run seed (see resolve()).
struct GraphDescriptor {
  GraphFamily family = GraphFamily::Path;
  std::size_t n = 0;
  std::size_t delta_cap = 0;
  std::size_t k = 0;
  std::optional<std::uint64_t> seed;
  std::string path;

  bool operator==(const GraphDescriptor&) const = default;

  /// Copy with a concrete seed for random families.
  GraphDescriptor resolve(std::uint64_t run_seed) const;
};

Graph build_graph(const GraphDescriptor& d);

std::string family_name(GraphFamily f);
GraphFamily parse_family(const std::string& name);

nlohmann::ordered_json to_json(const GraphDescriptor& d);
GraphDescriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace popproto
