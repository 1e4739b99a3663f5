#include "popproto/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "popproto/errors.hpp"
#include "popproto/rng.hpp"

namespace popproto {

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges,
                        std::optional<std::size_t> degree_cap) {
  Graph g;
  g.n_ = n;
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) throw InvalidParameter("edge endpoint out of range");
    if (e.u == e.v) throw InvalidParameter("self-loop at node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  {
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidParameter("duplicate edge");
  }
  g.edges_ = std::move(edges);

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : g.edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.incidences_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const auto& e = g.edges_[id];
    g.incidences_[fill[e.u]++] = {e.v, id};
    g.incidences_[fill[e.v]++] = {e.u, id};
  }
  g.max_degree_ = n == 0 ? 0 : *std::max_element(degree.begin(), degree.end());
  g.degree_cap_ = degree_cap.value_or(g.max_degree_);
  if (g.degree_cap_ < g.max_degree_) throw InvalidParameter("degree cap below realised maximum degree");

  if (n > 0) {
    auto dist = bfs_distances(g, 0);
    bool connected = std::none_of(dist.begin(), dist.end(),
                                  [](std::size_t d) { return d == kUnreachable; });
    if (connected) {
      if (g.edges_.size() + 1 == n) {
        // Double sweep is exact on trees.
        Node far = static_cast<Node>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        g.diameter_ = eccentricity(g, far);
      } else {
        std::size_t best = 0;
        for (Node v = 0; v < n; ++v) best = std::max(best, eccentricity(g, v));
        g.diameter_ = best;
      }
    }
  }
  return g;
}

std::optional<EdgeId> Graph::find_edge(Node a, Node b) const noexcept {
  if (a >= n_ || b >= n_) return std::nullopt;
  for (const auto& inc : incident(a))
    if (inc.neighbour == b) return inc.edge;
  return std::nullopt;
}

std::size_t Graph::diameter() const {
  if (!diameter_) throw InvalidParameter("diameter of a disconnected graph");
  return *diameter_;
}

std::vector<std::size_t> bfs_distances(const Graph& g, Node source, std::optional<EdgeId> removed) {
  std::vector<std::size_t> dist(g.node_count(), kUnreachable);
  std::vector<Node> queue;
  queue.reserve(g.node_count());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Node x = queue[head];
    for (const auto& inc : g.incident(x)) {
      if (removed && inc.edge == *removed) continue;
      if (dist[inc.neighbour] == kUnreachable) {
        dist[inc.neighbour] = dist[x] + 1;
        queue.push_back(inc.neighbour);
      }
    }
  }
  return dist;
}

std::size_t eccentricity(const Graph& g, Node source, std::optional<EdgeId> removed) {
  std::size_t best = 0;
  for (auto d : bfs_distances(g, source, removed))
    if (d != kUnreachable) best = std::max(best, d);
  return best;
}

std::size_t diameter(const Graph& g) { return g.diameter(); }
std::size_t max_degree(const Graph& g) { return g.max_degree(); }

Graph generate_path(std::size_t n) {
  if (n == 0) throw InvalidParameter("path needs n >= 1");
  std::vector<Edge> edges;
  for (Node i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_edges(n, std::move(edges), std::size_t{2});
}

Graph generate_star(std::size_t n) {
  if (n == 0) throw InvalidParameter("star needs n >= 1");
  std::vector<Edge> edges;
  for (Node i = 1; i < n; ++i) edges.push_back({0, i});
  return Graph::from_edges(n, std::move(edges), std::max<std::size_t>(n - 1, 1));
}

namespace {

// Breadth-first binary tree on nodes offset..offset+size-1 (node offset+i has
// children offset+2i+1 and offset+2i+2).
void append_binary_tree(std::vector<Edge>& edges, Node offset, std::size_t size) {
  for (std::size_t i = 1; i < size; ++i)
    edges.push_back({offset + static_cast<Node>((i - 1) / 2), offset + static_cast<Node>(i)});
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

Graph generate_balanced_binary_tree(std::size_t n) {
  if (n == 0) throw InvalidParameter("binary tree needs n >= 1");
  std::vector<Edge> edges;
  append_binary_tree(edges, 0, n);
  return Graph::from_edges(n, std::move(edges), std::size_t{3});
}

Graph generate_random_bounded_degree_tree(std::size_t n, std::size_t delta_cap, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("random tree needs n >= 1");
  if (n >= 3 && delta_cap < 2) throw InvalidParameter("delta_cap must be >= 2 for n >= 3");
  if (n == 2 && delta_cap < 1) throw InvalidParameter("delta_cap must be >= 1 for n = 2");
  SplitMix64 rng(mix64(seed));
  std::vector<Edge> edges;
  std::vector<std::size_t> degree(n, 0);
  // Nodes with spare capacity, kept as a swap-remove pool.
  std::vector<Node> open{0};
  for (Node v = 1; v < n; ++v) {
    auto idx = static_cast<std::size_t>(rng.below(open.size()));
    Node parent = open[idx];
    edges.push_back({parent, v});
    ++degree[parent];
    ++degree[v];
    if (degree[parent] >= delta_cap) {
      open[idx] = open.back();
      open.pop_back();
    }
    if (degree[v] < delta_cap) open.push_back(v);
  }
  return Graph::from_edges(n, std::move(edges), std::max<std::size_t>(delta_cap, 1));
}

Graph generate_lower_bound_tree(std::size_t n, std::size_t k) {
  if (n == 0) throw InvalidParameter("lower-bound tree needs n >= 1");
  if (k < ceil_log2(n) || 8 * k > n)
    throw InvalidParameter("lower-bound tree needs ceil(log2 n) <= k <= n/8");
  const std::size_t path_nodes = 8 * k;
  const std::size_t rest = n - path_nodes;
  const std::size_t left = rest / 2;
  const std::size_t right = rest - left;
  std::vector<Edge> edges;
  for (Node i = 0; i + 1 < path_nodes; ++i) edges.push_back({i, i + 1});
  const auto left_root = static_cast<Node>(path_nodes);
  const auto right_root = static_cast<Node>(path_nodes + left);
  if (left > 0) {
    append_binary_tree(edges, left_root, left);
    edges.push_back({0, left_root});
  }
  if (right > 0) {
    append_binary_tree(edges, right_root, right);
    edges.push_back({static_cast<Node>(path_nodes - 1), right_root});
  }
  return Graph::from_edges(n, std::move(edges), std::size_t{3});
}

bool is_valid_two_hop_colouring(const Graph& g, std::span<const std::uint32_t> colours) {
  if (colours.size() != g.node_count()) throw InvalidParameter("colouring size mismatch");
  std::vector<std::uint32_t> seen;
  for (Node v = 0; v < g.node_count(); ++v) {
    seen.clear();
    for (const auto& inc : g.incident(v)) seen.push_back(colours[inc.neighbour]);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  }
  return true;
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw InvalidParameter("edge list: missing header 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw InvalidParameter("edge list: expected " + std::to_string(m) + " edges");
    if (u < 0 || v < 0) throw InvalidParameter("edge list: negative node id");
    edges.push_back({static_cast<Node>(u), static_cast<Node>(v)});
  }
  return Graph::from_edges(n, std::move(edges));
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

GraphDescriptor GraphDescriptor::resolve(std::uint64_t run_seed) const {
  GraphDescriptor d = *this;
  if (family == GraphFamily::RandomBoundedDegree && !d.seed) d.seed = run_seed;
  return d;
}

Graph build_graph(const GraphDescriptor& d) {
  switch (d.family) {
    case GraphFamily::Path: return generate_path(d.n);
    case GraphFamily::Star: return generate_star(d.n);
    case GraphFamily::BalancedBinary: return generate_balanced_binary_tree(d.n);
    case GraphFamily::RandomBoundedDegree:
      return generate_random_bounded_degree_tree(d.n, d.delta_cap, d.seed.value_or(0));
    case GraphFamily::LowerBoundTnk: return generate_lower_bound_tree(d.n, d.k);
    case GraphFamily::FromFile: {
      std::ifstream in(d.path);
      if (!in) throw InvalidParameter("cannot open graph file " + d.path);
      return read_edge_list(in);
    }
  }
  throw InvalidParameter("unknown graph family");
}

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Path: return "path";
    case GraphFamily::Star: return "star";
    case GraphFamily::BalancedBinary: return "balanced_binary";
    case GraphFamily::RandomBoundedDegree: return "random_bounded_degree";
    case GraphFamily::LowerBoundTnk: return "lower_bound";
    case GraphFamily::FromFile: return "file";
  }
  return "?";
}

GraphFamily parse_family(const std::string& name) {
  for (auto f : {GraphFamily::Path, GraphFamily::Star, GraphFamily::BalancedBinary,
                 GraphFamily::RandomBoundedDegree, GraphFamily::LowerBoundTnk, GraphFamily::FromFile})
    if (family_name(f) == name) return f;
  if (name == "binary") return GraphFamily::BalancedBinary;
  if (name == "random") return GraphFamily::RandomBoundedDegree;
  if (name == "tnk") return GraphFamily::LowerBoundTnk;
  throw InvalidParameter("unknown graph family '" + name + "'");
}

nlohmann::ordered_json to_json(const GraphDescriptor& d) {
  nlohmann::ordered_json j;
  j["family"] = family_name(d.family);
  if (d.family == GraphFamily::FromFile) {
    j["path"] = d.path;
    return j;
  }
  j["n"] = d.n;
  if (d.family == GraphFamily::RandomBoundedDegree) j["delta_cap"] = d.delta_cap;
  if (d.family == GraphFamily::LowerBoundTnk) j["k"] = d.k;
  if (d.seed) j["seed"] = *d.seed;
  return j;
}

GraphDescriptor descriptor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) throw InvalidParameter("graph descriptor needs a 'family'");
  GraphDescriptor d;
  try {
    d.family = parse_family(j.at("family").get<std::string>());
    if (d.family == GraphFamily::FromFile) {
      d.path = j.at("path").get<std::string>();
      return d;
    }
    d.n = j.at("n").get<std::size_t>();
    if (j.contains("delta_cap")) d.delta_cap = j.at("delta_cap").get<std::size_t>();
    if (j.contains("k")) d.k = j.at("k").get<std::size_t>();
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("graph descriptor: ") + e.what());
  }
  if (d.family == GraphFamily::RandomBoundedDegree && d.delta_cap == 0)
    throw InvalidParameter("random_bounded_degree needs 'delta_cap'");
  return d;
}

}  // namespace popproto
