#include "popproto/apps.hpp"

#include <algorithm>

#include "popproto/errors.hpp"

namespace popproto {

std::optional<Endpoint> app_tail(const NodeState& first, const NodeState& second) {
  const auto st = orientation_status(first.colouring.colour, first.orientation,
                                     second.colouring.colour, second.orientation);
  if (!st.oriented()) return std::nullopt;
  return st.tail;
}

namespace {

// Runs `rule(tail, head)` on the slice selected by `slice` in the current
// edge direction; records the direction in fx.
template <typename Slice, typename Rule>
bool apply_directed(NodeState& first, NodeState& second, StepEffects& fx, Slice slice, Rule rule) {
  const auto tail = app_tail(first, second);
  if (!tail) return false;
  fx.app_tail_is_first = *tail == Endpoint::First;
  NodeState& t = *tail == Endpoint::First ? first : second;
  NodeState& h = *tail == Endpoint::First ? second : first;
  return rule(slice(t), slice(h));
}

// Silence: applying the slice's rule on the edge would change nothing.
template <typename Slice, typename Rule>
bool silent_on(const Graph& g, const Configuration& c, EdgeId e, Slice slice, Rule rule) {
  const Edge& ed = g.edge(e);
  const auto tail = app_tail(c[ed.u], c[ed.v]);
  if (!tail) return true;
  const NodeState& t = c[*tail == Endpoint::First ? ed.u : ed.v];
  const NodeState& h = c[*tail == Endpoint::First ? ed.v : ed.u];
  auto tail_copy = slice(t);
  auto head_copy = slice(h);
  return !rule(tail_copy, head_copy);
}

}  // namespace

bool leader_rule(LeaderState& tail, LeaderState& head) {
  if (!tail.has_token) return false;
  tail.has_token = false;
  head.has_token = true;
  return true;
}

bool majority_rule(MajorityState& tail, MajorityState& head, MajorityRuleEffects* fx) {
  const MajorityState tail_before = tail;
  const MajorityState head_before = head;
  const bool tail_ab = tail.token != Token::C;
  if (tail_ab && head.token != Token::C && tail.token != head.token) {
    tail.token = Token::C;
    head.token = Token::C;
    if (fx) fx->annihilated = true;
  }
  if (tail.token != Token::C && head.token == Token::C) {
    std::swap(tail.token, head.token);
    if (fx) fx->swapped = true;
  }
  if (head.token != Token::C) head.output = head.token == Token::A ? Opinion::A : Opinion::B;
  tail.output = head.output;
  return !(tail == tail_before) || !(head == head_before);
}

bool two_colour_rule(TwoColourState& tail, const TwoColourState& head) {
  const bool want = !head.bit;
  if (tail.bit == want) return false;
  tail.bit = want;
  return true;
}

bool counting_rule(CountingState& tail, CountingState& head, std::uint32_t n) {
  const std::uint64_t sum = std::uint64_t{tail.counter} + head.counter;
  if (sum > n) throw InvariantViolation("counter exceeds population size");
  const CountingState tail_before = tail;
  const CountingState head_before = head;
  head.counter = static_cast<std::uint32_t>(sum);
  tail.counter = 0;
  const std::uint32_t m = std::max({tail.broadcast_max, head.broadcast_max, head.counter});
  tail.broadcast_max = m;
  head.broadcast_max = m;
  return !(tail == tail_before) || !(head == head_before);
}

std::pair<LeaderState, LeaderState> leader_transition(LeaderState tail, LeaderState head) {
  leader_rule(tail, head);
  return {tail, head};
}

std::pair<MajorityState, MajorityState> majority_transition(MajorityState tail, MajorityState head) {
  majority_rule(tail, head);
  return {tail, head};
}

std::pair<bool, bool> two_colouring_transition(bool bit_tail, bool bit_head) {
  TwoColourState t{bit_tail};
  two_colour_rule(t, TwoColourState{bit_head});
  return {t.bit, bit_head};
}

std::pair<CountingState, CountingState> counting_transition(CountingState tail, CountingState head,
                                                            std::uint32_t n) {
  counting_rule(tail, head, n);
  return {tail, head};
}

bool leader_stable_predicate(const Graph& g, const Configuration& c) {
  if (!orientation_stable_predicate(g, c)) return false;
  std::size_t tokens = 0;
  Node holder = 0;
  for (Node v = 0; v < g.node_count(); ++v)
    if (c[v].leader.has_token) {
      ++tokens;
      holder = v;
    }
  if (tokens != 1) return false;
  try {
    return root_of(g, c) == holder;
  } catch (const InvalidParameter&) {
    return false;
  }
}

bool majority_stable_predicate(const Graph& g, const Configuration& c) {
  if (!orientation_stable_predicate(g, c)) return false;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const auto tail = app_tail(c[ed.u], c[ed.v]);
    const MajorityState& u = c[*tail == Endpoint::First ? ed.u : ed.v].majority;
    const MajorityState& v = c[*tail == Endpoint::First ? ed.v : ed.u].majority;
    const bool u_ab = u.token != Token::C;
    const bool v_ab = v.token != Token::C;
    if (u_ab && v_ab && u.token != v.token) return false;
    if (u_ab && !v_ab) return false;
    if (v_ab && v.output != (v.token == Token::A ? Opinion::A : Opinion::B)) return false;
    if (u.output != v.output) return false;
  }
  return true;
}

TokenCensus census(const Configuration& c) {
  TokenCensus k;
  for (const auto& s : c) {
    switch (s.majority.token) {
      case Token::A: ++k.a; break;
      case Token::B: ++k.b; break;
      case Token::C: ++k.c; break;
    }
    k.outputs_a += s.majority.output == Opinion::A;
  }
  return k;
}

// --- ledger ----------------------------------------------------------------

TokenLedger::TokenLedger(const Configuration& c)
    : position_(c.size()), type_(c.size()), identity_at_(c.size()) {
  for (Node v = 0; v < c.size(); ++v) {
    position_[v] = v;
    type_[v] = c[v].majority.token;
    identity_at_[v] = v;
  }
}

void TokenLedger::step(const Graph& g, EdgeId e, const StepEffects& fx, const Configuration& after) {
  const Edge& ed = g.edge(e);
  const std::size_t zu = identity_at_[ed.u];
  const std::size_t zv = identity_at_[ed.v];
  if (fx.annihilated) {
    type_[zu] = Token::C;
    type_[zv] = Token::C;
  }
  if (fx.swapped) {
    std::swap(position_[zu], position_[zv]);
    identity_at_[ed.u] = zv;
    identity_at_[ed.v] = zu;
  }
  for (Node x : {ed.u, ed.v}) {
    const std::size_t z = identity_at_[x];
    if (position_[z] != x) throw InstrumentationError("token ledger lost its bijection");
    if (type_[z] != after[x].majority.token)
      throw InstrumentationError("token ledger disagrees with configuration at node " +
                                 std::to_string(x));
  }
}

std::vector<std::size_t> TokenLedger::depths(const Graph& g, Node root) const {
  auto dist = bfs_distances(g, root);
  std::vector<std::size_t> out(position_.size());
  for (std::size_t z = 0; z < position_.size(); ++z) out[z] = dist[position_[z]];
  return out;
}

// --- layers ----------------------------------------------------------------

void LeaderLayer::init(const Graph&, Node v, NodeState& s, const InitContext& ctx,
                       SplitMix64& rng) const {
  if (!ctx.leader_candidates.empty())
    s.leader.has_token = ctx.leader_candidates[v];
  else if (ctx.mode == InitMode::Random)
    s.leader.has_token = v == 0 || rng.coin();
  else
    s.leader.has_token = true;
}

bool LeaderLayer::interact(NodeState& first, NodeState& second, LocalRandomness,
                           StepEffects& fx) const {
  return apply_directed(first, second, fx, [](NodeState& s) -> LeaderState& { return s.leader; },
                        leader_rule);
}

bool LeaderLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return silent_on(g, c, e, [](const NodeState& s) { return s.leader; }, leader_rule);
}

bool LeaderLayer::globally_correct(const Graph&, const Configuration& c) const {
  return std::count_if(c.begin(), c.end(), [](const NodeState& s) { return s.leader.has_token; }) == 1;
}

nlohmann::ordered_json LeaderLayer::output_summary(const Graph&, const Configuration& c) const {
  nlohmann::ordered_json j;
  std::size_t tokens = 0;
  j["leader"] = nullptr;
  for (Node v = 0; v < c.size(); ++v)
    if (c[v].leader.has_token) {
      ++tokens;
      j["leader"] = v;
    }
  if (tokens != 1) j["leader"] = nullptr;
  j["tokens"] = tokens;
  return j;
}

void LeaderLayer::trace_metrics(const Graph&, const Configuration& c, nlohmann::ordered_json& out) const {
  out["tokens"] = std::count_if(c.begin(), c.end(), [](const NodeState& s) { return s.leader.has_token; });
}

void MajorityLayer::init(const Graph&, Node v, NodeState& s, const InitContext& ctx,
                         SplitMix64& rng) const {
  if (ctx.mode == InitMode::Random) {
    s.majority.token = static_cast<Token>(rng.below(3));
    s.majority.output = rng.coin() ? Opinion::B : Opinion::A;
    return;
  }
  const Opinion in = ctx.majority_inputs.empty() ? Opinion::A : ctx.majority_inputs[v];
  s.majority = {token_of(in), in};
}

bool MajorityLayer::interact(NodeState& first, NodeState& second, LocalRandomness,
                             StepEffects& fx) const {
  MajorityRuleEffects rules;
  const bool changed = apply_directed(
      first, second, fx, [](NodeState& s) -> MajorityState& { return s.majority; },
      [&](MajorityState& t, MajorityState& h) { return majority_rule(t, h, &rules); });
  fx.annihilated = rules.annihilated;
  fx.swapped = rules.swapped;
  return changed;
}

bool MajorityLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return silent_on(g, c, e, [](const NodeState& s) { return s.majority; },
                   [](MajorityState& t, MajorityState& h) { return majority_rule(t, h); });
}

nlohmann::ordered_json MajorityLayer::output_summary(const Graph&, const Configuration& c) const {
  auto k = census(c);
  nlohmann::ordered_json j;
  if (k.outputs_a == c.size())
    j["consensus"] = "A";
  else if (k.outputs_a == 0)
    j["consensus"] = "B";
  else
    j["consensus"] = nullptr;
  j["balance"] = k.balance();
  return j;
}

void MajorityLayer::trace_metrics(const Graph&, const Configuration& c,
                                  nlohmann::ordered_json& out) const {
  auto k = census(c);
  out["tokens_A"] = k.a;
  out["tokens_B"] = k.b;
  out["tokens_C"] = k.c;
  out["outputs_A"] = k.outputs_a;
}

void TwoColourLayer::init(const Graph&, Node, NodeState& s, const InitContext& ctx,
                          SplitMix64& rng) const {
  s.two_colour.bit = ctx.mode == InitMode::Random ? rng.coin() : false;
}

bool TwoColourLayer::interact(NodeState& first, NodeState& second, LocalRandomness,
                              StepEffects& fx) const {
  return apply_directed(first, second, fx,
                        [](NodeState& s) -> TwoColourState& { return s.two_colour; },
                        [](TwoColourState& t, TwoColourState& h) { return two_colour_rule(t, h); });
}

bool TwoColourLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return silent_on(g, c, e, [](const NodeState& s) { return s.two_colour; },
                   [](TwoColourState& t, TwoColourState& h) { return two_colour_rule(t, h); });
}

nlohmann::ordered_json TwoColourLayer::output_summary(const Graph& g, const Configuration& c) const {
  bool proper = true;
  for (const auto& e : g.edges()) proper = proper && c[e.u].two_colour.bit != c[e.v].two_colour.bit;
  nlohmann::ordered_json j;
  j["proper"] = proper;
  return j;
}

void CountingLayer::init(const Graph&, Node, NodeState& s, const InitContext&, SplitMix64&) const {
  s.counting = CountingState{1, 1};
}

bool CountingLayer::interact(NodeState& first, NodeState& second, LocalRandomness,
                             StepEffects& fx) const {
  return apply_directed(first, second, fx, [](NodeState& s) -> CountingState& { return s.counting; },
                        [this](CountingState& t, CountingState& h) { return counting_rule(t, h, n_); });
}

bool CountingLayer::edge_settled(const Graph& g, const Configuration& c, EdgeId e) const {
  return silent_on(g, c, e, [](const NodeState& s) { return s.counting; },
                   [this](CountingState& t, CountingState& h) { return counting_rule(t, h, n_); });
}

nlohmann::ordered_json CountingLayer::output_summary(const Graph&, const Configuration& c) const {
  std::uint32_t lo = UINT32_MAX, hi = 0;
  for (const auto& s : c) {
    lo = std::min(lo, s.counting.broadcast_max);
    hi = std::max(hi, s.counting.broadcast_max);
  }
  nlohmann::ordered_json j;
  j["min_broadcast"] = lo;
  j["max_broadcast"] = hi;
  return j;
}

void CountingLayer::trace_metrics(const Graph&, const Configuration& c,
                                  nlohmann::ordered_json& out) const {
  std::uint64_t sum = 0;
  std::uint32_t lo = UINT32_MAX;
  for (const auto& s : c) {
    sum += s.counting.counter;
    lo = std::min(lo, s.counting.broadcast_max);
  }
  out["sum"] = sum;
  out["max_broadcast_min"] = lo;
}

}  // namespace popproto
