#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "popproto/engine.hpp"

namespace popproto {

inline constexpr std::size_t kDefaultAlpha = 7;

/// |C| = alpha · Δ², with Δ the degree bound of the graph class.
std::size_t colour_palette_size(std::size_t degree_cap, std::size_t alpha = kDefaultAlpha);

ColouringState fresh_colouring_state(std::size_t palette);
ColouringState random_colouring_state(std::size_t palette, SplitMix64& rng);

/// Both partner-colour stamps are set and they differ.
bool has_stamp_conflict(const ColouringState& u, const ColouringState& v);

/// In-place 2-hop colouring interaction. On a stamp conflict both endpoints
/// resample their colour (colour(u) from r_u, colour(v) from r_v) and clear
/// every stamp; then the shared bit X (taken from the residual of r_u) is
/// written to stamp(u, colour(v)) and stamp(v, colour(u)). Returns true if
/// the recolouring branch fired.
bool colouring_interact(ColouringState& u, double r_u, ColouringState& v, double r_v,
                        std::size_t palette);

struct ColouringStep {
  ColouringState u;
  ColouringState v;
  bool recoloured = false;
};

ColouringStep colouring_transition(const ColouringState& u, double r_u, const ColouringState& v,
                                   double r_v, std::size_t palette);

struct ConflictClassification {
  bool stamp_conflict = false;
  bool colour_conflict = false;

  bool conflict() const noexcept { return stamp_conflict || colour_conflict; }
  bool operator==(const ConflictClassification&) const = default;
};

ConflictClassification classify_edge(const Graph& g, const Configuration& c, EdgeId e);

/// C_t, sorted by edge id. Colour conflicts are found by bucketing each
/// node's neighbours by colour.
std::vector<EdgeId> conflict_edges(const Graph& g, const Configuration& c);

struct ConflictCounts {
  std::size_t conflicts = 0;
  std::size_t stamp_conflicts = 0;
  std::size_t colour_conflicts = 0;
};
ConflictCounts count_conflicts(const Graph& g, const Configuration& c);

bool colouring_stable_predicate(const Graph& g, const Configuration& c);

std::vector<std::uint32_t> colours_of(const Configuration& c);

/// A balanced path extension function on the colour-conflict edges: every
/// e ∈ C^colour maps to f(e) such that e ∪ f(e) is a conflict path, and each
/// image has at most two preimages. Each edge is oriented towards the middle
/// of a conflict path through it (the smaller-id middle when both endpoints
/// qualify) and mapped along the cyclic successor among the middle node's
/// same-coloured neighbours, ordered by node id.
std::map<EdgeId, EdgeId> build_path_extension(const Graph& g, const Configuration& c);

class ColouringLayer final : public ProtocolLayer {
 public:
  explicit ColouringLayer(std::size_t palette) : palette_(palette) {}

  std::size_t palette() const noexcept { return palette_; }

  std::string_view name() const override { return "coloring"; }
  Tier tier() const override { return Tier::Colouring; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  bool two_hop_scope() const override { return true; }
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
  void trace_metrics(const Graph& g, const Configuration& c,
                     nlohmann::ordered_json& out) const override;
  std::vector<LocalRandomness> randomness_outcomes() const override;

 private:
  std::size_t palette_;
};

}  // namespace popproto
