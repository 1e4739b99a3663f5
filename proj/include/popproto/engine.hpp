#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "popproto/graph.hpp"
#include "popproto/node_state.hpp"
#include "popproto/rng.hpp"

namespace popproto {

// ---------------------------------------------------------------------------
// Randomness contract
//
// Every scheduler step t draws, from step_stream(seed, t): first the edge
// (uniform over E), then for every layer position i a pair (r_first,
// r_second) of 53-bit uniforms in [0, 1). Layers derive everything they need
// from their own pair via the helpers below.
// ---------------------------------------------------------------------------

struct LocalRandomness {
  double first = 0.0;
  double second = 0.0;
};

enum class Endpoint : std::uint8_t { First, Second };

/// floor(r * palette_size) + 1.
Colour draw_uniform_colour(double r, std::size_t palette_size);
/// floor(2r).
bool draw_bit(double r);
/// Initiator is the endpoint with the smaller value; ties go to First.
Endpoint draw_initiator(double r_first, double r_second);
/// Fractional part of r * k; uniform in [0, 1) and independent of floor(r * k).
double residual(double r, std::size_t k);

// ---------------------------------------------------------------------------
// Layers and stacks
// ---------------------------------------------------------------------------

enum class Tier : std::uint8_t { Colouring = 0, Orientation = 1, Application = 2 };

/// Side effects of one interaction that instrumentation needs to see.
struct StepEffects {
  bool recoloured = false;
  /// Direction the application layers used on this step: true means the
  /// first endpoint was the tail (child). Unset when the edge was disoriented.
  std::optional<bool> app_tail_is_first;
  bool annihilated = false;  // majority rule 1
  bool swapped = false;      // majority rule 2
};

enum class InitMode { Fresh, Random };

struct InitContext {
  InitMode mode = InitMode::Fresh;
  /// Majority input per node; empty means every node starts with A.
  std::vector<Opinion> majority_inputs;
  /// Leader candidates per node; empty means every node is a candidate.
  std::vector<bool> leader_candidates;
};

/// One protocol layer. Implementations are stateless apart from their
/// parameters; all run state lives in the Configuration.
class ProtocolLayer {
 public:
  virtual ~ProtocolLayer() = default;

  virtual std::string_view name() const = 0;
  virtual Tier tier() const = 0;

  /// Writes this layer's slice of `s` for node v.
  virtual void init(const Graph& g, Node v, NodeState& s, const InitContext& ctx,
                    SplitMix64& rng) const = 0;

  /// Applies the layer's transition in place to the endpoints of the sampled
  /// edge. Reads lower-tier slices (already updated this step) and writes only
  /// its own slice. Returns true if the slice of either endpoint changed.
  virtual bool interact(NodeState& first, NodeState& second, LocalRandomness r,
                        StepEffects& fx) const = 0;

  /// Edge-local part of the stable predicate: true iff no interaction on `e`
  /// can change this layer's output (colouring) or state (all other layers).
  virtual bool edge_settled(const Graph& g, const Configuration& c, EdgeId e) const = 0;

  /// True if edge_settled(e) also depends on the colours of nodes adjacent to
  /// e's endpoints, not only on the endpoints themselves.
  virtual bool two_hop_scope() const { return false; }

  /// Global part of the stable predicate, only consulted once every edge is
  /// settled.
  virtual bool globally_correct(const Graph&, const Configuration&) const { return true; }

  /// Summary of the current output for RunRecords.
  virtual nlohmann::ordered_json output_summary(const Graph& g, const Configuration& c) const = 0;

  /// Per-step trace metrics (full instrumentation only).
  virtual void trace_metrics(const Graph&, const Configuration&, nlohmann::ordered_json&) const {}

  /// A finite set of randomness values that realises every distinct outcome
  /// of interact(); used by exhaustive reachability checks.
  virtual std::vector<LocalRandomness> randomness_outcomes() const { return {{0.25, 0.75}}; }
};

using LayerPtr = std::shared_ptr<const ProtocolLayer>;

inline constexpr std::size_t kMaxLayers = 8;

/// Ordered layer composition. Within one interaction layers apply in order,
/// and each reads the post-update slices of the layers beneath it.
class ProtocolStack {
 public:
  /// Throws InvalidParameter when a layer sits above one of a higher tier,
  /// when a colouring or orientation layer appears twice, or when two layers
  /// would own the same state slice.
  static ProtocolStack compose(std::vector<LayerPtr> layers, std::string name = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const ProtocolLayer& layer(std::size_t i) const { return *layers_[i]; }
  const std::vector<LayerPtr>& layers() const noexcept { return layers_; }
  std::optional<std::size_t> find(std::string_view layer_name) const;

  /// True if layer j is in the dependency closure of layer i (strictly lower tier).
  bool depends_on(std::size_t i, std::size_t j) const {
    return layers_[j]->tier() < layers_[i]->tier();
  }

 private:
  std::vector<LayerPtr> layers_;
  std::string name_;
};

/// Initialises each stack layer's slice on top of `base` (default-constructed
/// node states when empty). Slices of absent layers are left as in `base`.
Configuration initial_configuration(const Graph& g, const ProtocolStack& stack,
                                    const InitContext& ctx, std::uint64_t seed,
                                    Configuration base = {});

// ---------------------------------------------------------------------------
// Scheduler and rounds
// ---------------------------------------------------------------------------

struct StepDraw {
  EdgeId edge = 0;
  std::array<LocalRandomness, kMaxLayers> randomness{};
};

/// Uniform random pairwise scheduler. Step t's draw depends only on (seed, t).
class Scheduler {
 public:
  /// Throws InvalidParameter on a graph without edges.
  Scheduler(const Graph& g, std::uint64_t seed, std::size_t layer_count);

  StepDraw draw(std::uint64_t t) const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t edge_count_;
  std::uint64_t seed_;
  std::size_t layer_count_;
};

/// Fair-schedule rounds: round k ends at the first step at which every edge
/// has been sampled at least once since the end of round k-1 (t_0 = 0).
class RoundTracker {
 public:
  RoundTracker() = default;
  explicit RoundTracker(std::size_t edge_count);

  /// Registers that `edge` was sampled at step t. Returns true if this step
  /// closed a round.
  bool advance(EdgeId edge, std::uint64_t t);

  std::uint64_t completed_rounds() const noexcept { return boundaries_.size() - 1; }
  /// t_0 = 0, t_1, ..., t_k for every completed round.
  const std::vector<std::uint64_t>& boundaries() const noexcept { return boundaries_; }
  std::size_t unseen() const noexcept { return unseen_; }

 private:
  std::vector<std::uint8_t> seen_;
  std::size_t unseen_ = 0;
  std::vector<std::uint64_t> boundaries_{0};
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct StepResult {
  std::uint64_t t = 0;
  EdgeId edge = 0;
  std::uint32_t changed_mask = 0;  // bit i: layer i changed state
  StepEffects effects;

  bool layer_changed(std::size_t i) const noexcept { return (changed_mask >> i) & 1U; }
};

/// A single sequential run: configuration, scheduler, rounds, and
/// incrementally maintained stable predicates.
class Simulation {
 public:
  Simulation(const Graph& g, ProtocolStack stack, Configuration initial, std::uint64_t seed);

  StepResult step();

  const Graph& graph() const noexcept { return *graph_; }
  const ProtocolStack& stack() const noexcept { return stack_; }
  const Configuration& configuration() const noexcept { return config_; }
  std::uint64_t time() const noexcept { return t_; }
  const RoundTracker& rounds() const noexcept { return rounds_; }

  /// Stable predicate of layer i: the layer is settled on every edge and
  /// globally correct, and so is every layer it depends on.
  bool layer_stable(std::size_t i) const;
  bool all_stable() const;
  /// Number of edges on which layer i is not settled.
  std::size_t unsettled_edges(std::size_t i) const { return unsettled_[i]; }

 private:
  bool layer_settled(std::size_t i) const;
  void refresh_edge(std::size_t layer, EdgeId e);

  const Graph* graph_;
  ProtocolStack stack_;
  Configuration config_;
  Scheduler scheduler_;
  RoundTracker rounds_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<std::uint8_t>> unsettled_flag_;
  std::vector<std::size_t> unsettled_;
  mutable std::vector<std::optional<bool>> global_cache_;
};

/// Recomputes a stack's stable predicates from scratch (no incremental state).
bool stack_layer_stable(const Graph& g, const ProtocolStack& stack, const Configuration& c,
                        std::size_t layer);

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_start(const Simulation&) {}
  virtual void on_step(const Simulation&, const StepResult&) {}
};

/// Writes one JSON object per step: {"t","edge","layers_changed"} plus each
/// layer's trace metrics when `full` is set.
class TraceWriter : public StepObserver {
 public:
  TraceWriter(std::ostream& out, bool full) : out_(&out), full_(full) {}
  void on_step(const Simulation& sim, const StepResult& step) override;

 private:
  std::ostream* out_;
  bool full_;
};

struct LayerOutcome {
  std::string layer;
  std::optional<std::uint64_t> steps;  // unset when capped

  bool operator==(const LayerOutcome&) const = default;
};

struct RunRecord {
  GraphDescriptor graph;
  std::string stack;
  std::uint64_t seed = 0;
  std::vector<LayerOutcome> steps;
  std::optional<std::uint64_t> rounds;
  bool capped = false;
  nlohmann::ordered_json output = nlohmann::ordered_json::object();
  std::uint64_t steps_run = 0;
  double wall_seconds = 0.0;

  /// Steps to stability of the topmost layer.
  std::optional<std::uint64_t> top_steps() const {
    return steps.empty() ? std::nullopt : steps.back().steps;
  }
};

/// 50 · n² · ceil(log2 n), at least 1.
std::uint64_t default_step_cap(std::size_t n);
/// max(10 · n · D, 10^5).
std::uint64_t default_verification_tail(const Graph& g);

struct RunOptions {
  std::uint64_t step_cap = 0;              // 0: default_step_cap(n)
  std::optional<std::uint64_t> tail;       // unset: default_verification_tail(g)
  std::vector<StepObserver*> observers;
};

/// Runs until every layer's stable predicate holds, then for a verification
/// tail. A layer's step count is the first step from which its predicate held
/// through the end of the run. The cap bounds the steps allowed to reach
/// stability; the tail is run on top of it.
RunRecord run_until_stable(const Graph& g, const ProtocolStack& stack, Configuration initial,
                           std::uint64_t seed, const RunOptions& options = {});

/// Same as run_until_stable but also returns the final configuration.
RunRecord run_until_stable(const Graph& g, const ProtocolStack& stack, Configuration initial,
                           std::uint64_t seed, const RunOptions& options,
                           Configuration* final_configuration);

}  // namespace popproto
