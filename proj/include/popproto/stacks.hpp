#pragma once

#include <string>
#include <vector>

#include "popproto/engine.hpp"

namespace popproto {

enum class MajorityInputs { Alternating, AllA, Random, Explicit };

MajorityInputs parse_majority_inputs(const std::string& name);
std::string majority_inputs_name(MajorityInputs m);

struct StackOptions {
  std::size_t alpha = 7;
  InitMode init = InitMode::Fresh;
  MajorityInputs inputs = MajorityInputs::Alternating;
  std::vector<Opinion> explicit_inputs;
  /// Empty: every node is a candidate.
  std::vector<bool> leader_candidates;
};

/// Known stack names: coloring, orientation, leader, majority, two-colour,
/// count, full.
const std::vector<std::string>& stack_names();

/// Builds the named stack for `g`. The palette is sized from g's degree cap.
/// Throws InvalidParameter for an unknown name.
ProtocolStack make_named_stack(const std::string& name, const Graph& g, const StackOptions& opts = {});

/// Majority input per node under `opts`; random inputs are drawn from the
/// run seed.
std::vector<Opinion> majority_inputs(const Graph& g, const StackOptions& opts, std::uint64_t seed);

/// Initial configuration for a run of `stack` on g.
Configuration make_initial(const Graph& g, const ProtocolStack& stack, const StackOptions& opts,
                           std::uint64_t seed);

}  // namespace popproto
