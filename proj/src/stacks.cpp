#include "popproto/stacks.hpp"

#include "popproto/apps.hpp"
#include "popproto/colouring.hpp"
#include "popproto/errors.hpp"
#include "popproto/orientation.hpp"

namespace popproto {

MajorityInputs parse_majority_inputs(const std::string& name) {
  if (name == "alternating") return MajorityInputs::Alternating;
  if (name == "all-a") return MajorityInputs::AllA;
  if (name == "random") return MajorityInputs::Random;
  if (name == "explicit") return MajorityInputs::Explicit;
  throw InvalidParameter("unknown majority input mode '" + name + "'");
}

std::string majority_inputs_name(MajorityInputs m) {
  switch (m) {
    case MajorityInputs::Alternating: return "alternating";
    case MajorityInputs::AllA: return "all-a";
    case MajorityInputs::Random: return "random";
    case MajorityInputs::Explicit: return "explicit";
  }
  return "?";
}

const std::vector<std::string>& stack_names() {
  static const std::vector<std::string> names{"coloring", "orientation", "leader", "majority",
                                              "two-colour", "count", "full"};
  return names;
}

ProtocolStack make_named_stack(const std::string& name, const Graph& g, const StackOptions& opts) {
  const std::size_t palette = colour_palette_size(g.degree_cap(), opts.alpha);
  std::vector<LayerPtr> layers{std::make_shared<ColouringLayer>(palette)};
  if (name == "coloring") return ProtocolStack::compose(layers, name);
  layers.push_back(std::make_shared<OrientationLayer>(palette));
  if (name == "orientation") return ProtocolStack::compose(layers, name);
  if (name == "leader")
    layers.push_back(std::make_shared<LeaderLayer>());
  else if (name == "majority")
    layers.push_back(std::make_shared<MajorityLayer>());
  else if (name == "two-colour")
    layers.push_back(std::make_shared<TwoColourLayer>());
  else if (name == "count")
    layers.push_back(std::make_shared<CountingLayer>(g.node_count()));
  else if (name == "full") {
    layers.push_back(std::make_shared<MajorityLayer>());
    layers.push_back(std::make_shared<LeaderLayer>());
    layers.push_back(std::make_shared<TwoColourLayer>());
    layers.push_back(std::make_shared<CountingLayer>(g.node_count()));
  } else {
    throw InvalidParameter("unknown stack '" + name + "'");
  }
  return ProtocolStack::compose(layers, name);
}

std::vector<Opinion> majority_inputs(const Graph& g, const StackOptions& opts, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<Opinion> in(n, Opinion::A);
  switch (opts.inputs) {
    case MajorityInputs::AllA: break;
    case MajorityInputs::Alternating:
      for (std::size_t v = 0; v < n; ++v) in[v] = v % 2 ? Opinion::B : Opinion::A;
      break;
    case MajorityInputs::Random: {
      SplitMix64 rng(mix64(seed ^ 0x6d616a6f72697479ULL));
      for (auto& o : in) o = rng.coin() ? Opinion::B : Opinion::A;
      break;
    }
    case MajorityInputs::Explicit:
      if (opts.explicit_inputs.size() != n)
        throw InvalidParameter("explicit majority inputs must have one entry per node");
      in = opts.explicit_inputs;
      break;
  }
  return in;
}

Configuration make_initial(const Graph& g, const ProtocolStack& stack, const StackOptions& opts,
                           std::uint64_t seed) {
  InitContext ctx;
  ctx.mode = opts.init;
  if (stack.find("majority")) ctx.majority_inputs = majority_inputs(g, opts, seed);
  if (!opts.leader_candidates.empty()) {
    if (opts.leader_candidates.size() != g.node_count())
      throw InvalidParameter("leader candidates must have one entry per node");
    ctx.leader_candidates = opts.leader_candidates;
  }
  return initial_configuration(g, stack, ctx, seed);
}

}  // namespace popproto
