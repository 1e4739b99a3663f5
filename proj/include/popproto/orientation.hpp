#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "popproto/engine.hpp"

namespace popproto {

enum class OrientationKind : std::uint8_t { Proper, Weak, Disoriented };

/// Status of an edge. For Proper and Weak, `tail` names the endpoint the edge
/// points away from (the child side).
struct OrientationStatus {
  OrientationKind kind = OrientationKind::Disoriented;
  Endpoint tail = Endpoint::First;

  bool oriented() const noexcept { return kind != OrientationKind::Disoriented; }
  bool operator==(const OrientationStatus&) const = default;
};

/// The three-condition test for "oriented from x to y".
bool oriented_from(Colour colour_x, const OrientationState& x, Colour colour_y,
                   const OrientationState& y);

OrientationStatus orientation_status(Colour colour_u, const OrientationState& u, Colour colour_v,
                                     const OrientationState& v);
OrientationStatus orientation_status(const Graph& g, const Configuration& c, EdgeId e);
std::vector<OrientationStatus> orientation_statuses(const Graph& g, const Configuration& c);

OrientationState fresh_orientation_state(std::size_t palette);
OrientationState random_orientation_state(std::size_t palette, SplitMix64& rng);

/// x adopts y as its parent.
void set_edge_orientation(OrientationState& x, Colour colour_x, OrientationState& y, Colour colour_y);

/// In-place tree orientation interaction; returns true if anything changed.
bool orientation_interact(OrientationState& a, Colour colour_a, double r_a, OrientationState& b,
                          Colour colour_b, double r_b);

std::pair<OrientationState, OrientationState> orientation_transition(
    const OrientationState& u, Colour colour_u, double r_u, const OrientationState& v,
    Colour colour_v, double r_v);

/// Every edge is properly oriented.
bool orientation_stable_predicate(const Graph& g, const Configuration& c);

/// The unique node without a properly oriented outgoing edge. Throws
/// InvalidParameter when the orientation is not stable or the root is not
/// unique.
Node root_of(const Graph& g, const Configuration& c);

/// Writes parent/children so that every edge is properly oriented towards
/// `root`, using the colours already present in `c`.
void orient_towards(const Graph& g, Configuration& c, Node root, std::size_t palette);

struct StatusCounts {
  std::size_t proper = 0;
  std::size_t weak = 0;
  std::size_t disoriented = 0;
};
StatusCounts count_statuses(const Graph& g, const Configuration& c);

/// 1 + eccentricity of the head of a weakly oriented edge in its component of
/// G - e; 0 for a properly oriented edge. Throws InstrumentationError on a
/// disoriented edge.
std::size_t edge_potential(const Graph& g, const OrientationStatus& status, EdgeId e);

/// Edge-marker process. Marker x sits on edge position(x); the placement
/// starts as the identity and only changes by swaps, so it stays a bijection.
class MarkerTracker {
 public:
  explicit MarkerTracker(std::size_t edge_count);

  /// One scheduler step. `before` are the edge statuses at the start of the
  /// step. If the sampled edge was weakly oriented u→v and v had a properly
  /// oriented outgoing edge e' = (v, w), the markers on the two edges swap.
  /// Returns the swap partner, if any.
  std::optional<EdgeId> step(const Graph& g, const std::vector<OrientationStatus>& before,
                             EdgeId sampled);

  EdgeId position(std::size_t marker) const { return position_[marker]; }
  std::size_t marker_on(EdgeId e) const { return marker_on_[e]; }
  std::size_t size() const noexcept { return position_.size(); }

 private:
  std::vector<EdgeId> position_;
  std::vector<std::size_t> marker_on_;
};

/// Φ for every marker; requires no disoriented edge.
std::vector<std::size_t> potential(const Graph& g, const Configuration& c,
                                   const MarkerTracker& markers);

class OrientationLayer final : public ProtocolLayer {
 public:
  explicit OrientationLayer(std::size_t palette) : palette_(palette) {}

  std::size_t palette() const noexcept { return palette_; }

  std::string_view name() const override { return "orientation"; }
  Tier tier() const override { return Tier::Orientation; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
  void trace_metrics(const Graph& g, const Configuration& c,
                     nlohmann::ordered_json& out) const override;
  std::vector<LocalRandomness> randomness_outcomes() const override {
    return {{0.25, 0.75}, {0.75, 0.25}};
  }

 private:
  std::size_t palette_;
};

}  // namespace popproto
