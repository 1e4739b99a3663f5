#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "popproto/engine.hpp"
#include "popproto/orientation.hpp"

namespace popproto {

/// Direction the application layers use for an interaction on (first,
/// second): the tail endpoint of a properly or weakly oriented edge, or
/// nothing when the edge is disoriented.
std::optional<Endpoint> app_tail(const NodeState& first, const NodeState& second);

// Token rules over an edge oriented tail → head (child → parent). Each
// returns true if it changed a state.

/// Tail's token is annihilated if both hold one, otherwise moves to head.
bool leader_rule(LeaderState& tail, LeaderState& head);

/// Rules 1-4 in order: A/B annihilate into C/C; an A/B tail swaps with a C
/// head; a non-C head outputs its token; the tail copies the head's output.
struct MajorityRuleEffects {
  bool annihilated = false;
  bool swapped = false;
};
bool majority_rule(MajorityState& tail, MajorityState& head, MajorityRuleEffects* fx = nullptr);

/// The child copies the parent's bit, flipped.
bool two_colour_rule(TwoColourState& tail, const TwoColourState& head);

/// Parent takes the sum, child keeps 0, both take the maximum seen. Throws
/// InvariantViolation if the parent's counter would exceed n.
bool counting_rule(CountingState& tail, CountingState& head, std::uint32_t n);

std::pair<LeaderState, LeaderState> leader_transition(LeaderState tail, LeaderState head);
std::pair<MajorityState, MajorityState> majority_transition(MajorityState tail, MajorityState head);
std::pair<bool, bool> two_colouring_transition(bool bit_tail, bool bit_head);
std::pair<CountingState, CountingState> counting_transition(CountingState tail, CountingState head,
                                                            std::uint32_t n);

/// Orientation stable, exactly one token, and it sits on the root.
bool leader_stable_predicate(const Graph& g, const Configuration& c);
/// Orientation stable and no rule can fire on any properly oriented edge.
bool majority_stable_predicate(const Graph& g, const Configuration& c);

struct TokenCensus {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  std::size_t outputs_a = 0;

  long long balance() const noexcept { return static_cast<long long>(a) - static_cast<long long>(b); }
};
TokenCensus census(const Configuration& c);

/// Identity-preserving view of the majority tokens: identity z starts on
/// node z; rule 1 retypes both identities to C in place, rule 2 swaps their
/// positions. Every step is cross-checked against the configuration.
class TokenLedger {
 public:
  explicit TokenLedger(const Configuration& c);

  /// Throws InstrumentationError if the bijection or the types disagree with
  /// `after`.
  void step(const Graph& g, EdgeId e, const StepEffects& fx, const Configuration& after);

  std::size_t size() const noexcept { return position_.size(); }
  Node position(std::size_t z) const { return position_[z]; }
  Token type(std::size_t z) const { return type_[z]; }
  std::size_t identity_at(Node v) const { return identity_at_[v]; }

  /// dist(position(z), root) for every identity.
  std::vector<std::size_t> depths(const Graph& g, Node root) const;

 private:
  std::vector<Node> position_;
  std::vector<Token> type_;
  std::vector<std::size_t> identity_at_;
};

class LeaderLayer final : public ProtocolLayer {
 public:
  std::string_view name() const override { return "leader"; }
  Tier tier() const override { return Tier::Application; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  bool globally_correct(const Graph& g, const Configuration& c) const override;
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
  void trace_metrics(const Graph& g, const Configuration& c,
                     nlohmann::ordered_json& out) const override;
};

class MajorityLayer final : public ProtocolLayer {
 public:
  std::string_view name() const override { return "majority"; }
  Tier tier() const override { return Tier::Application; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
  void trace_metrics(const Graph& g, const Configuration& c,
                     nlohmann::ordered_json& out) const override;
};

class TwoColourLayer final : public ProtocolLayer {
 public:
  std::string_view name() const override { return "two-colour"; }
  Tier tier() const override { return Tier::Application; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
};

class CountingLayer final : public ProtocolLayer {
 public:
  explicit CountingLayer(std::size_t n) : n_(static_cast<std::uint32_t>(n)) {}

  std::string_view name() const override { return "count"; }
  Tier tier() const override { return Tier::Application; }
  void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
            SplitMix64& rng) const override;
  bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                StepEffects& fx) const override;
  bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const override;
  nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const override;
  void trace_metrics(const Graph& g, const Configuration& c,
                     nlohmann::ordered_json& out) const override;

 private:
  std::uint32_t n_;
};

}  // namespace popproto
