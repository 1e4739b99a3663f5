#include "popproto/orientation.hpp"

#include <algorithm>
#include <numeric>

#include "popproto/errors.hpp"

namespace popproto {

bool oriented_from(Colour colour_x, const OrientationState& x, Colour colour_y,
                   const OrientationState& y) {
  return y.parent != colour_x && !x.children.contains(colour_y) && y.children.contains(colour_x);
}

OrientationStatus orientation_status(Colour colour_u, const OrientationState& u, Colour colour_v,
                                     const OrientationState& v) {
  // The conditions for u→v and v→u are mutually exclusive (colour(u) ∈
  // children(v) versus colour(u) ∉ children(v)), so at most one holds.
  if (oriented_from(colour_u, u, colour_v, v))
    return {u.parent == colour_v ? OrientationKind::Proper : OrientationKind::Weak, Endpoint::First};
  if (oriented_from(colour_v, v, colour_u, u))
    return {v.parent == colour_u ? OrientationKind::Proper : OrientationKind::Weak, Endpoint::Second};
  return {};
}

OrientationStatus orientation_status(const Graph& g, const Configuration& c, EdgeId e) {
  const Edge& ed = g.edge(e);
  return orientation_status(c[ed.u].colouring.colour, c[ed.u].orientation, c[ed.v].colouring.colour,
                            c[ed.v].orientation);
}

std::vector<OrientationStatus> orientation_statuses(const Graph& g, const Configuration& c) {
  std::vector<OrientationStatus> out(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) out[e] = orientation_status(g, c, e);
  return out;
}

OrientationState fresh_orientation_state(std::size_t palette) {
  return OrientationState{kNoColour, ColourSet(palette)};
}

OrientationState random_orientation_state(std::size_t palette, SplitMix64& rng) {
  OrientationState s{static_cast<Colour>(rng.below(palette + 1)), ColourSet(palette)};
  for (Colour c = 1; c <= palette; ++c)
    if (rng.coin()) s.children.insert(c);
  return s;
}

void set_edge_orientation(OrientationState& x, Colour colour_x, OrientationState& y, Colour colour_y) {
  x.parent = colour_y;
  x.children.erase(colour_y);
  y.children.insert(colour_x);
  if (y.parent == colour_x) y.parent = kNoColour;
}

bool orientation_interact(OrientationState& a, Colour colour_a, double r_a, OrientationState& b,
                          Colour colour_b, double r_b) {
  if (orientation_status(colour_a, a, colour_b, b).kind == OrientationKind::Proper) return false;
  const bool a_initiates = draw_initiator(r_a, r_b) == Endpoint::First;
  OrientationState& u = a_initiates ? a : b;
  OrientationState& v = a_initiates ? b : a;
  const Colour colour_u = a_initiates ? colour_a : colour_b;
  const Colour colour_v = a_initiates ? colour_b : colour_a;
  if (u.children.contains(colour_v))
    set_edge_orientation(u, colour_u, v, colour_v);
  else
    set_edge_orientation(v, colour_v, u, colour_u);
  return true;
}

std::pair<OrientationState, OrientationState> orientation_transition(
    const OrientationState& u, Colour colour_u, double r_u, const OrientationState& v,
    Colour colour_v, double r_v) {
  std::pair<OrientationState, OrientationState> out{u, v};
  orientation_interact(out.first, colour_u, r_u, out.second, colour_v, r_v);
  return out;
}

bool orientation_stable_predicate(const Graph& g, const Configuration& c) {
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (orientation_status(g, c, e).kind != OrientationKind::Proper) return false;
  return true;
}

Node root_of(const Graph& g, const Configuration& c) {
  if (!orientation_stable_predicate(g, c))
    throw InvalidParameter("root_of needs every edge properly oriented");
  std::vector<std::uint8_t> has_out(g.node_count(), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto st = orientation_status(g, c, e);
    const Edge& ed = g.edge(e);
    has_out[st.tail == Endpoint::First ? ed.u : ed.v] = 1;
  }
  std::optional<Node> root;
  for (Node v = 0; v < g.node_count(); ++v) {
    if (has_out[v]) continue;
    if (root) throw InvalidParameter("orientation has more than one root");
    root = v;
  }
  if (!root) throw InvalidParameter("orientation has no root");
  return *root;
}

void orient_towards(const Graph& g, Configuration& c, Node root, std::size_t palette) {
  if (root >= g.node_count()) throw InvalidParameter("root out of range");
  auto dist = bfs_distances(g, root);
  for (Node v = 0; v < g.node_count(); ++v) c[v].orientation = fresh_orientation_state(palette);
  for (const auto& e : g.edges()) {
    if (dist[e.u] == kUnreachable || dist[e.v] == kUnreachable)
      throw InvalidParameter("orient_towards needs a connected graph");
    const Node child = dist[e.u] > dist[e.v] ? e.u : e.v;
    const Node parent = child == e.u ? e.v : e.u;
    c[child].orientation.parent = c[parent].colouring.colour;
    c[parent].orientation.children.insert(c[child].colouring.colour);
  }
}

StatusCounts count_statuses(const Graph& g, const Configuration& c) {
  StatusCounts k;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    switch (orientation_status(g, c, e).kind) {
      case OrientationKind::Proper: ++k.proper; break;
      case OrientationKind::Weak: ++k.weak; break;
      case OrientationKind::Disoriented: ++k.disoriented; break;
    }
  }
  return k;
}

std::size_t edge_potential(const Graph& g, const OrientationStatus& status, EdgeId e) {
  switch (status.kind) {
    case OrientationKind::Proper: return 0;
    case OrientationKind::Disoriented:
      throw InstrumentationError("potential is undefined on a disoriented edge");
    case OrientationKind::Weak: break;
  }
  const Edge& ed = g.edge(e);
  const Node head = status.tail == Endpoint::First ? ed.v : ed.u;
  return 1 + eccentricity(g, head, e);
}

MarkerTracker::MarkerTracker(std::size_t edge_count)
    : position_(edge_count), marker_on_(edge_count) {
  std::iota(position_.begin(), position_.end(), EdgeId{0});
  std::iota(marker_on_.begin(), marker_on_.end(), std::size_t{0});
}

std::optional<EdgeId> MarkerTracker::step(const Graph& g, const std::vector<OrientationStatus>& before,
                                          EdgeId sampled) {
  const auto& st = before[sampled];
  if (st.kind != OrientationKind::Weak) return std::nullopt;
  const Edge& ed = g.edge(sampled);
  const Node head = st.tail == Endpoint::First ? ed.v : ed.u;
  std::optional<EdgeId> partner;
  for (const auto& inc : g.incident(head)) {
    if (inc.edge == sampled) continue;
    const auto& other = before[inc.edge];
    if (other.kind != OrientationKind::Proper) continue;
    const Edge& oe = g.edge(inc.edge);
    const Node tail = other.tail == Endpoint::First ? oe.u : oe.v;
    if (tail != head) continue;
    if (partner) throw InstrumentationError("node has two properly oriented outgoing edges");
    partner = inc.edge;
  }
  if (partner) {
    const std::size_t x = marker_on_[sampled];
    const std::size_t y = marker_on_[*partner];
    std::swap(position_[x], position_[y]);
    marker_on_[sampled] = y;
    marker_on_[*partner] = x;
  }
  return partner;
}

std::vector<std::size_t> potential(const Graph& g, const Configuration& c,
                                   const MarkerTracker& markers) {
  auto statuses = orientation_statuses(g, c);
  std::vector<std::size_t> out(markers.size());
  for (std::size_t x = 0; x < markers.size(); ++x) {
    const EdgeId e = markers.position(x);
    out[x] = edge_potential(g, statuses[e], e);
  }
  return out;
}

// --- layer -----------------------------------------------------------------

void OrientationLayer::init(const Graph&, Node, NodeState& s, const InitContext& ctx,
                            SplitMix64& rng) const {
  s.orientation = ctx.mode == InitMode::Random ? random_orientation_state(palette_, rng)
                                               : fresh_orientation_state(palette_);
}

bool OrientationLayer::interact(NodeState& first, NodeState& second, LocalRandomness r,
                                StepEffects&) const {
  return orientation_interact(first.orientation, first.colouring.colour, r.first,
                              second.orientation, second.colouring.colour, r.second);
}

bool OrientationLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return orientation_status(g, c, e).kind == OrientationKind::Proper;
}

nlohmann::ordered_json OrientationLayer::output_summary(const Graph& g, const Configuration& c) const {
  nlohmann::ordered_json j;
  auto k = count_statuses(g, c);
  j["proper"] = k.proper;
  try {
    j["root"] = root_of(g, c);
  } catch (const InvalidParameter&) {
    j["root"] = nullptr;
  }
  return j;
}

void OrientationLayer::trace_metrics(const Graph& g, const Configuration& c,
                                     nlohmann::ordered_json& out) const {
  auto statuses = orientation_statuses(g, c);
  StatusCounts k;
  std::size_t max_potential = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    switch (statuses[e].kind) {
      case OrientationKind::Proper: ++k.proper; break;
      case OrientationKind::Weak:
        ++k.weak;
        max_potential = std::max(max_potential, edge_potential(g, statuses[e], e));
        break;
      case OrientationKind::Disoriented: ++k.disoriented; break;
    }
  }
  out["disoriented"] = k.disoriented;
  out["weak"] = k.weak;
  out["proper"] = k.proper;
  if (k.disoriented == 0)
    out["max_potential"] = max_potential;
  else
    out["max_potential"] = nullptr;
}

}  // namespace popproto
