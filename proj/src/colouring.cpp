#include "popproto/colouring.hpp"

#include <algorithm>
#include <utility>

#include "popproto/errors.hpp"

namespace popproto {

std::size_t colour_palette_size(std::size_t degree_cap, std::size_t alpha) {
  if (alpha == 0) throw InvalidParameter("alpha must be positive");
  const std::size_t delta = std::max<std::size_t>(degree_cap, 1);
  return alpha * delta * delta;
}

ColouringState fresh_colouring_state(std::size_t palette) {
  return ColouringState{1, StampVector(palette)};
}

ColouringState random_colouring_state(std::size_t palette, SplitMix64& rng) {
  ColouringState s{static_cast<Colour>(rng.below(palette) + 1), StampVector(palette)};
  for (Colour c = 1; c <= palette; ++c) s.stamps.set(c, static_cast<Stamp>(rng.below(3)));
  return s;
}

bool has_stamp_conflict(const ColouringState& u, const ColouringState& v) {
  const Stamp su = u.stamps.get(v.colour);
  const Stamp sv = v.stamps.get(u.colour);
  return su != Stamp::Cleared && sv != Stamp::Cleared && su != sv;
}

bool colouring_interact(ColouringState& u, double r_u, ColouringState& v, double r_v,
                        std::size_t palette) {
  const bool conflict = has_stamp_conflict(u, v);
  if (conflict) {
    u.colour = draw_uniform_colour(r_u, palette);
    v.colour = draw_uniform_colour(r_v, palette);
    u.stamps.clear();
    v.stamps.clear();
  }
  const bool x = draw_bit(residual(r_u, palette));
  u.stamps.set_bit(v.colour, x);
  v.stamps.set_bit(u.colour, x);
  return conflict;
}

ColouringStep colouring_transition(const ColouringState& u, double r_u, const ColouringState& v,
                                   double r_v, std::size_t palette) {
  ColouringStep out{u, v, false};
  out.recoloured = colouring_interact(out.u, r_u, out.v, r_v, palette);
  return out;
}

namespace {

// Does some w ∈ N(y) \ {x} carry colour(x)?
bool repeats_across(const Graph& g, const Configuration& c, Node x, Node y) {
  const Colour cx = c[x].colouring.colour;
  for (const auto& inc : g.incident(y))
    if (inc.neighbour != x && c[inc.neighbour].colouring.colour == cx) return true;
  return false;
}

}  // namespace

ConflictClassification classify_edge(const Graph& g, const Configuration& c, EdgeId e) {
  const Edge& ed = g.edge(e);
  ConflictClassification k;
  k.stamp_conflict = has_stamp_conflict(c[ed.u].colouring, c[ed.v].colouring);
  k.colour_conflict = repeats_across(g, c, ed.u, ed.v) || repeats_across(g, c, ed.v, ed.u);
  return k;
}

namespace {

std::vector<std::uint8_t> colour_conflict_flags(const Graph& g, const Configuration& c) {
  std::vector<std::uint8_t> flag(g.edge_count(), 0);
  std::vector<std::pair<Colour, EdgeId>> bucket;
  for (Node v = 0; v < g.node_count(); ++v) {
    bucket.clear();
    for (const auto& inc : g.incident(v)) bucket.emplace_back(c[inc.neighbour].colouring.colour, inc.edge);
    std::sort(bucket.begin(), bucket.end());
    for (std::size_t i = 0; i < bucket.size();) {
      std::size_t j = i;
      while (j < bucket.size() && bucket[j].first == bucket[i].first) ++j;
      if (j - i >= 2)
        for (std::size_t k = i; k < j; ++k) flag[bucket[k].second] = 1;
      i = j;
    }
  }
  return flag;
}

}  // namespace

std::vector<EdgeId> conflict_edges(const Graph& g, const Configuration& c) {
  auto flag = colour_conflict_flags(g, c);
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (flag[e] || has_stamp_conflict(c[ed.u].colouring, c[ed.v].colouring)) out.push_back(e);
  }
  return out;
}

ConflictCounts count_conflicts(const Graph& g, const Configuration& c) {
  auto flag = colour_conflict_flags(g, c);
  ConflictCounts k;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const bool stamp = has_stamp_conflict(c[ed.u].colouring, c[ed.v].colouring);
    k.stamp_conflicts += stamp;
    k.colour_conflicts += flag[e];
    k.conflicts += stamp || flag[e];
  }
  return k;
}

bool colouring_stable_predicate(const Graph& g, const Configuration& c) {
  return conflict_edges(g, c).empty();
}

std::vector<std::uint32_t> colours_of(const Configuration& c) {
  std::vector<std::uint32_t> out;
  out.reserve(c.size());
  for (const auto& s : c) out.push_back(s.colouring.colour);
  return out;
}

std::map<EdgeId, EdgeId> build_path_extension(const Graph& g, const Configuration& c) {
  auto colour = [&](Node v) { return c[v].colouring.colour; };
  // Same-coloured neighbours of `middle` with colour `col`, by node id.
  auto class_of = [&](Node middle, Colour col) {
    std::vector<Incidence> out;
    for (const auto& inc : g.incident(middle))
      if (colour(inc.neighbour) == col) out.push_back(inc);
    std::sort(out.begin(), out.end(),
              [](const Incidence& a, const Incidence& b) { return a.neighbour < b.neighbour; });
    return out;
  };

  std::map<EdgeId, EdgeId> f;
  auto flags = colour_conflict_flags(g, c);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!flags[e]) continue;
    const Edge& ed = g.edge(e);
    // (tail, middle) candidates: tail's colour recurs among middle's other neighbours.
    const bool towards_v = repeats_across(g, c, ed.u, ed.v);
    const bool towards_u = repeats_across(g, c, ed.v, ed.u);
    Node tail = ed.u;
    Node middle = ed.v;
    if (towards_u && (!towards_v || ed.u < ed.v)) std::swap(tail, middle);
    auto cls = class_of(middle, colour(tail));
    auto pos = std::find_if(cls.begin(), cls.end(),
                            [&](const Incidence& inc) { return inc.neighbour == tail; });
    const auto next = static_cast<std::size_t>(pos - cls.begin() + 1) % cls.size();
    f.emplace(e, cls[next].edge);
  }
  return f;
}

// --- layer -----------------------------------------------------------------

void ColouringLayer::init(const Graph&, Node, NodeState& s, const InitContext& ctx,
                          SplitMix64& rng) const {
  s.colouring = ctx.mode == InitMode::Random ? random_colouring_state(palette_, rng)
                                             : fresh_colouring_state(palette_);
}

bool ColouringLayer::interact(NodeState& first, NodeState& second, LocalRandomness r,
                              StepEffects& fx) const {
  // Without a recolouring only the two partner-colour stamps can move.
  const Stamp old_first = first.colouring.stamps.get(second.colouring.colour);
  const Stamp old_second = second.colouring.stamps.get(first.colouring.colour);
  fx.recoloured = colouring_interact(first.colouring, r.first, second.colouring, r.second, palette_);
  return fx.recoloured || first.colouring.stamps.get(second.colouring.colour) != old_first ||
         second.colouring.stamps.get(first.colouring.colour) != old_second;
}

bool ColouringLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return !classify_edge(g, c, e).conflict();
}

nlohmann::ordered_json ColouringLayer::output_summary(const Graph& g, const Configuration& c) const {
  auto colours = colours_of(c);
  std::vector<std::uint32_t> used = colours;
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  nlohmann::ordered_json j;
  j["valid"] = is_valid_two_hop_colouring(g, colours);
  j["colours_used"] = used.size();
  return j;
}

void ColouringLayer::trace_metrics(const Graph& g, const Configuration& c,
                                   nlohmann::ordered_json& out) const {
  auto k = count_conflicts(g, c);
  out["conflicts"] = k.conflicts;
  out["stamp_conflicts"] = k.stamp_conflicts;
  out["colour_conflicts"] = k.colour_conflicts;
}

std::vector<LocalRandomness> ColouringLayer::randomness_outcomes() const {
  std::vector<LocalRandomness> out;
  const double p = static_cast<double>(palette_);
  for (std::size_t cu = 0; cu < palette_; ++cu)
    for (std::size_t cv = 0; cv < palette_; ++cv)
      for (int x = 0; x < 2; ++x)
        out.push_back({(static_cast<double>(cu) + (x + 0.5) / 2.0) / p,
                       (static_cast<double>(cv) + 0.5) / p});
  return out;
}

}  // namespace popproto
