#pragma once

#include <map>
#include <string>

#include "oracles.hpp"
#include "popproto/colouring.hpp"

namespace fixture {

using namespace popproto;

/// A tree on n nodes with colours drawn from 1..colours and stamps drawn
/// uniformly from {0, 1, ⊥} over a palette of size `palette`.
inline Configuration random_colouring(const Graph& g, std::size_t palette, std::size_t colours,
                                      SplitMix64& rng) {
  Configuration c(g.node_count());
  for (auto& s : c) {
    s.colouring = random_colouring_state(palette, rng);
    s.colouring.colour = static_cast<Colour>(rng.below(colours) + 1);
  }
  return c;
}

/// Brute-force check of a path extension function. Returns an empty string
/// when f is a balanced path extension on the colour-conflict edges,
/// otherwise a description of the first problem.
inline std::string path_extension_problem(const Graph& g, const Configuration& c,
                                          const std::map<EdgeId, EdgeId>& f) {
  auto colours = colours_of(c);
  auto conflict = oracle::colour_conflict_edges(g, colours);
  auto key = [&](EdgeId e) {
    const auto& ed = g.edge(e);
    return std::pair<std::size_t, std::size_t>{ed.u, ed.v};
  };
  if (f.size() != conflict.size()) return "domain differs from the colour-conflict edges";
  std::map<EdgeId, int> preimages;
  for (const auto& [e, fe] : f) {
    if (!conflict.count(key(e))) return "edge outside the colour-conflict set";
    if (!conflict.count(key(fe))) return "image outside the colour-conflict set";
    if (e == fe) return "edge maps to itself";
    const auto& a = g.edge(e);
    const auto& b = g.edge(fe);
    std::size_t middle;
    if (a.u == b.u || a.u == b.v)
      middle = a.u;
    else if (a.v == b.u || a.v == b.v)
      middle = a.v;
    else
      return "edge and image share no node";
    const std::size_t x = a.u == middle ? a.v : a.u;
    const std::size_t y = b.u == middle ? b.v : b.u;
    if (x == y || colours[x] != colours[y]) return "edge and image do not form a conflict path";
    if (++preimages[fe] > 2) return "image with more than two preimages";
  }
  return {};
}

}  // namespace fixture
