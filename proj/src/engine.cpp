#include "popproto/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "popproto/errors.hpp"

namespace popproto {

Colour draw_uniform_colour(double r, std::size_t palette_size) {
  if (palette_size == 0) throw InvalidParameter("palette must be non-empty");
  auto c = static_cast<std::size_t>(r * static_cast<double>(palette_size));
  return static_cast<Colour>(std::min(c, palette_size - 1) + 1);
}

bool draw_bit(double r) { return r >= 0.5; }

Endpoint draw_initiator(double r_first, double r_second) {
  return r_second < r_first ? Endpoint::Second : Endpoint::First;
}

double residual(double r, std::size_t k) {
  double scaled = r * static_cast<double>(k);
  return scaled - std::floor(scaled);
}

// --- stack ------------------------------------------------------------------

ProtocolStack ProtocolStack::compose(std::vector<LayerPtr> layers, std::string name) {
  if (layers.empty()) throw InvalidParameter("a stack needs at least one layer");
  if (layers.size() > kMaxLayers) throw InvalidParameter("too many layers in stack");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i]) throw InvalidParameter("null layer");
    if (i > 0 && layers[i]->tier() < layers[i - 1]->tier())
      throw InvalidParameter("layer '" + std::string(layers[i]->name()) + "' reads no state of '" +
                             std::string(layers[i - 1]->name()) +
                             "' but is placed above it: upper layers must read lower layers only");
    for (std::size_t j = 0; j < i; ++j) {
      if (layers[j]->name() == layers[i]->name())
        throw InvalidParameter("layer '" + std::string(layers[i]->name()) + "' appears twice");
      if (layers[i]->tier() != Tier::Application && layers[j]->tier() == layers[i]->tier())
        throw InvalidParameter("two layers own the same state slice");
    }
  }
  ProtocolStack s;
  s.layers_ = std::move(layers);
  if (name.empty()) {
    for (std::size_t i = 0; i < s.layers_.size(); ++i) {
      if (i) name += '+';
      name += s.layers_[i]->name();
    }
  }
  s.name_ = std::move(name);
  return s;
}

std::optional<std::size_t> ProtocolStack::find(std::string_view layer_name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i]->name() == layer_name) return i;
  return std::nullopt;
}

Configuration initial_configuration(const Graph& g, const ProtocolStack& stack,
                                    const InitContext& ctx, std::uint64_t seed,
                                    Configuration base) {
  if (base.empty()) base.resize(g.node_count());
  if (base.size() != g.node_count()) throw InvalidParameter("base configuration size mismatch");
  if (!ctx.majority_inputs.empty() && ctx.majority_inputs.size() != g.node_count())
    throw InvalidParameter("majority inputs must cover every node");
  if (!ctx.leader_candidates.empty() && ctx.leader_candidates.size() != g.node_count())
    throw InvalidParameter("leader candidate mask must cover every node");
  SplitMix64 rng = init_stream(seed);
  for (const auto& layer : stack.layers())
    for (Node v = 0; v < g.node_count(); ++v) layer->init(g, v, base[v], ctx, rng);
  return base;
}

// --- scheduler --------------------------------------------------------------

Scheduler::Scheduler(const Graph& g, std::uint64_t seed, std::size_t layer_count)
    : edge_count_(g.edge_count()), seed_(seed), layer_count_(layer_count) {
  if (edge_count_ == 0) throw InvalidParameter("the scheduler needs at least one edge");
  if (layer_count_ > kMaxLayers) throw InvalidParameter("too many layers");
}

StepDraw Scheduler::draw(std::uint64_t t) const {
  SplitMix64 stream = step_stream(seed_, t);
  StepDraw d;
  d.edge = static_cast<EdgeId>(stream.below(edge_count_));
  for (std::size_t i = 0; i < layer_count_; ++i) {
    d.randomness[i].first = stream.uniform();
    d.randomness[i].second = stream.uniform();
  }
  return d;
}

RoundTracker::RoundTracker(std::size_t edge_count) : seen_(edge_count, 0), unseen_(edge_count) {}

bool RoundTracker::advance(EdgeId edge, std::uint64_t t) {
  if (edge >= seen_.size()) throw InvalidParameter("edge not in graph");
  if (!seen_[edge]) {
    seen_[edge] = 1;
    --unseen_;
  }
  if (unseen_ == 0) {
    boundaries_.push_back(t);
    std::fill(seen_.begin(), seen_.end(), 0);
    unseen_ = seen_.size();
    return true;
  }
  return false;
}

// --- simulation -------------------------------------------------------------

Simulation::Simulation(const Graph& g, ProtocolStack stack, Configuration initial, std::uint64_t seed)
    : graph_(&g),
      stack_(std::move(stack)),
      config_(std::move(initial)),
      scheduler_(g, seed, stack_.size()),
      rounds_(g.edge_count()),
      unsettled_flag_(stack_.size(), std::vector<std::uint8_t>(g.edge_count(), 0)),
      unsettled_(stack_.size(), 0),
      global_cache_(stack_.size()) {
  if (config_.size() != g.node_count()) throw InvalidParameter("configuration size mismatch");
  for (std::size_t i = 0; i < stack_.size(); ++i)
    for (EdgeId e = 0; e < g.edge_count(); ++e) refresh_edge(i, e);
}

void Simulation::refresh_edge(std::size_t layer, EdgeId e) {
  const bool bad = !stack_.layer(layer).edge_settled(*graph_, config_, e);
  auto& flag = unsettled_flag_[layer][e];
  if (bad != static_cast<bool>(flag)) {
    flag = bad;
    if (bad)
      ++unsettled_[layer];
    else
      --unsettled_[layer];
  }
}

StepResult Simulation::step() {
  StepResult res;
  res.t = ++t_;
  const StepDraw d = scheduler_.draw(res.t);
  res.edge = d.edge;
  const Edge e = graph_->edge(d.edge);
  NodeState& a = config_[e.u];
  NodeState& b = config_[e.v];
  const Colour colour_a = a.colouring.colour;
  const Colour colour_b = b.colouring.colour;

  for (std::size_t i = 0; i < stack_.size(); ++i)
    if (stack_.layer(i).interact(a, b, d.randomness[i], res.effects)) res.changed_mask |= 1U << i;

  rounds_.advance(d.edge, res.t);

  if (res.changed_mask != 0) {
    const bool recoloured = a.colouring.colour != colour_a || b.colouring.colour != colour_b;
    for (std::size_t i = 0; i < stack_.size(); ++i) {
      if (res.layer_changed(i)) global_cache_[i].reset();
      if (recoloured && stack_.layer(i).two_hop_scope()) {
        for (Node x : {e.u, e.v})
          for (const auto& inc : graph_->incident(x))
            for (const auto& far : graph_->incident(inc.neighbour)) refresh_edge(i, far.edge);
      } else {
        for (Node x : {e.u, e.v})
          for (const auto& inc : graph_->incident(x)) refresh_edge(i, inc.edge);
      }
    }
  }
  return res;
}

bool Simulation::layer_settled(std::size_t i) const {
  if (unsettled_[i] != 0) return false;
  auto& cached = global_cache_[i];
  if (!cached) cached = stack_.layer(i).globally_correct(*graph_, config_);
  return *cached;
}

bool Simulation::layer_stable(std::size_t i) const {
  for (std::size_t j = 0; j < stack_.size(); ++j)
    if ((j == i || stack_.depends_on(i, j)) && !layer_settled(j)) return false;
  return true;
}

bool Simulation::all_stable() const {
  for (std::size_t i = 0; i < stack_.size(); ++i)
    if (!layer_settled(i)) return false;
  return true;
}

bool stack_layer_stable(const Graph& g, const ProtocolStack& stack, const Configuration& c,
                        std::size_t layer) {
  for (std::size_t j = 0; j < stack.size(); ++j) {
    if (j != layer && !stack.depends_on(layer, j)) continue;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (!stack.layer(j).edge_settled(g, c, e)) return false;
    if (!stack.layer(j).globally_correct(g, c)) return false;
  }
  return true;
}

void TraceWriter::on_step(const Simulation& sim, const StepResult& step) {
  nlohmann::ordered_json j;
  j["t"] = step.t;
  const Edge& e = sim.graph().edge(step.edge);
  j["edge"] = {e.u, e.v};
  auto changed = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sim.stack().size(); ++i)
    if (step.layer_changed(i)) changed.push_back(std::string(sim.stack().layer(i).name()));
  j["layers_changed"] = std::move(changed);
  if (full_)
    for (const auto& layer : sim.stack().layers())
      layer->trace_metrics(sim.graph(), sim.configuration(), j);
  *out_ << j.dump() << '\n';
}

// --- run loop ---------------------------------------------------------------

std::uint64_t default_step_cap(std::size_t n) {
  std::uint64_t log2n = 0;
  while ((std::uint64_t{1} << log2n) < n) ++log2n;
  return std::max<std::uint64_t>(1, 50ULL * n * n * log2n);
}

std::uint64_t default_verification_tail(const Graph& g) {
  return std::max<std::uint64_t>(10ULL * g.node_count() * g.diameter(), 100000ULL);
}

RunRecord run_until_stable(const Graph& g, const ProtocolStack& stack, Configuration initial,
                           std::uint64_t seed, const RunOptions& options) {
  return run_until_stable(g, stack, std::move(initial), seed, options, nullptr);
}

RunRecord run_until_stable(const Graph& g, const ProtocolStack& stack, Configuration initial,
                           std::uint64_t seed, const RunOptions& options,
                           Configuration* final_configuration) {
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t cap = options.step_cap ? options.step_cap : default_step_cap(g.node_count());
  const std::uint64_t tail = options.tail ? *options.tail : default_verification_tail(g);

  Simulation sim(g, stack, std::move(initial), seed);
  for (auto* obs : options.observers) obs->on_start(sim);

  const std::size_t layers = stack.size();
  std::vector<std::optional<std::uint64_t>> first_hold(layers);
  std::vector<std::uint64_t> rounds_at_hold(layers, 0);
  auto update_holds = [&]() {
    bool all = true;
    for (std::size_t i = 0; i < layers; ++i) {
      if (sim.layer_stable(i)) {
        if (!first_hold[i]) {
          first_hold[i] = sim.time();
          rounds_at_hold[i] = sim.rounds().completed_rounds();
        }
      } else {
        first_hold[i].reset();
        all = false;
      }
    }
    return all;
  };

  bool all = update_holds();
  std::optional<std::uint64_t> all_since = all ? std::optional<std::uint64_t>(0) : std::nullopt;
  bool capped = false;
  for (;;) {
    if (all_since) {
      if (sim.time() >= *all_since + tail) break;
    } else if (sim.time() >= cap) {
      capped = true;
      break;
    }
    const StepResult res = sim.step();
    for (auto* obs : options.observers) obs->on_step(sim, res);
    all = update_holds();
    if (all && !all_since)
      all_since = sim.time();
    else if (!all)
      all_since.reset();
  }

  RunRecord rec;
  rec.stack = stack.name();
  rec.seed = seed;
  rec.capped = capped;
  rec.steps_run = sim.time();
  std::uint64_t top_rounds = 0;
  std::uint64_t top_steps = 0;
  for (std::size_t i = 0; i < layers; ++i) {
    rec.steps.push_back({std::string(stack.layer(i).name()), first_hold[i]});
    if (first_hold[i] && *first_hold[i] >= top_steps) {
      top_steps = *first_hold[i];
      top_rounds = rounds_at_hold[i];
    }
  }
  if (!capped) rec.rounds = top_rounds;
  for (const auto& layer : stack.layers())
    rec.output[std::string(layer->name())] = layer->output_summary(g, sim.configuration());
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (final_configuration) *final_configuration = sim.configuration();
  return rec;
}

}  // namespace popproto
