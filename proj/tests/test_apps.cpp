#include <doctest.h>

#include "popproto/apps.hpp"
#include "popproto/colouring.hpp"
#include "popproto/errors.hpp"
#include "popproto/stacks.hpp"

using namespace popproto;

namespace {

MajorityState ms(Token t, Opinion o) { return MajorityState{t, o}; }

// Path 0-1-...-(n-1), injective colours, oriented towards `root`.
Configuration oriented_path(const Graph& g, Node root) {
  Configuration c(g.node_count());
  for (Node v = 0; v < g.node_count(); ++v) c[v].colouring.colour = v + 1;
  orient_towards(g, c, root, g.node_count());
  return c;
}

}  // namespace

TEST_CASE("leader transition") {
  auto [a1, b1] = leader_transition({true}, {true});
  CHECK_FALSE(a1.has_token);
  CHECK(b1.has_token);
  auto [a2, b2] = leader_transition({true}, {false});
  CHECK_FALSE(a2.has_token);
  CHECK(b2.has_token);
  auto [a3, b3] = leader_transition({false}, {true});
  CHECK_FALSE(a3.has_token);
  CHECK(b3.has_token);
  CHECK(b3.output());
}

TEST_CASE("leader stable predicate") {
  auto g = generate_path(4);
  auto c = oriented_path(g, 2);
  c[2].leader.has_token = true;
  CHECK(leader_stable_predicate(g, c));
  c[0].leader.has_token = true;
  CHECK_FALSE(leader_stable_predicate(g, c));
  c[2].leader.has_token = false;
  CHECK_FALSE(leader_stable_predicate(g, c));
}

TEST_CASE("majority transition") {
  for (Opinion ou : {Opinion::A, Opinion::B})
    for (Opinion ov : {Opinion::A, Opinion::B}) {
      auto [u, v] = majority_transition(ms(Token::A, ou), ms(Token::B, ov));
      CHECK(u.token == Token::C);
      CHECK(v.token == Token::C);
      CHECK(v.output == ov);
      CHECK(u.output == ov);
    }
  auto [u2, v2] = majority_transition(ms(Token::A, Opinion::B), ms(Token::C, Opinion::B));
  CHECK(u2.token == Token::C);
  CHECK(v2.token == Token::A);
  CHECK(v2.output == Opinion::A);
  CHECK(u2.output == Opinion::A);

  auto [u3, v3] = majority_transition(ms(Token::A, Opinion::B), ms(Token::A, Opinion::B));
  CHECK(u3.token == Token::A);
  CHECK(v3.token == Token::A);
  CHECK(v3.output == Opinion::A);
  CHECK(u3.output == Opinion::A);

  MajorityRuleEffects fx;
  auto t = ms(Token::B, Opinion::A), h = ms(Token::C, Opinion::A);
  majority_rule(t, h, &fx);
  CHECK(fx.swapped);
  CHECK_FALSE(fx.annihilated);
}

TEST_CASE("majority stable predicate") {
  auto g = generate_path(5);
  auto c = oriented_path(g, 0);
  for (auto& s : c) s.majority = ms(Token::A, Opinion::A);
  CHECK(majority_stable_predicate(g, c));

  // A child below a C parent: a swap is pending.
  c[0].majority = ms(Token::C, Opinion::A);
  CHECK_FALSE(majority_stable_predicate(g, c));

  // Tie on n=2 resolves after one interaction.
  auto g2 = generate_path(2);
  auto stack = ProtocolStack::compose({std::make_shared<MajorityLayer>()});
  InitContext ctx;
  ctx.majority_inputs = {Opinion::A, Opinion::B};
  auto base = oriented_path(g2, 1);
  Simulation sim(g2, stack, initial_configuration(g2, stack, ctx, 1, base), 1);
  CHECK_FALSE(majority_stable_predicate(g2, sim.configuration()));
  sim.step();
  CHECK(majority_stable_predicate(g2, sim.configuration()));
  CHECK(sim.configuration()[0].majority.token == Token::C);
  CHECK(sim.configuration()[0].majority.output == sim.configuration()[1].majority.output);
}

TEST_CASE("app rules are no-ops on disoriented edges") {
  NodeState a, b;
  a.colouring.colour = 1;
  b.colouring.colour = 2;
  a.orientation = OrientationState{kNoColour, ColourSet(4)};
  b.orientation = OrientationState{kNoColour, ColourSet(4)};
  a.leader.has_token = true;
  a.majority = ms(Token::A, Opinion::A);
  b.majority = ms(Token::B, Opinion::B);
  StepEffects fx;
  CHECK_FALSE(LeaderLayer().interact(a, b, {}, fx));
  CHECK_FALSE(MajorityLayer().interact(a, b, {}, fx));
  CHECK_FALSE(fx.app_tail_is_first.has_value());
  CHECK(a.leader.has_token);
}

TEST_CASE("token ledger") {
  auto g = generate_path(2);
  auto c = oriented_path(g, 1);  // 0 → 1
  c[0].majority = ms(Token::A, Opinion::A);
  c[1].majority = ms(Token::C, Opinion::A);
  TokenLedger ledger(c);

  StepEffects none;
  ledger.step(g, 0, none, c);
  CHECK(ledger.position(0) == 0);
  CHECK(ledger.position(1) == 1);

  StepEffects swap;
  swap.swapped = true;
  auto after = c;
  std::swap(after[0].majority.token, after[1].majority.token);
  ledger.step(g, 0, swap, after);
  CHECK(ledger.position(0) == 1);
  CHECK(ledger.position(1) == 0);
  CHECK(ledger.type(0) == Token::A);
  CHECK(ledger.depths(g, 1) == std::vector<std::size_t>{0, 1});

  auto ab = c;
  ab[0].majority.token = Token::A;
  ab[1].majority.token = Token::B;
  TokenLedger l2(ab);
  StepEffects ann;
  ann.annihilated = true;
  auto cc = ab;
  cc[0].majority.token = Token::C;
  cc[1].majority.token = Token::C;
  l2.step(g, 0, ann, cc);
  CHECK(l2.type(0) == Token::C);
  CHECK(l2.type(1) == Token::C);
  CHECK(l2.position(0) == 0);

  TokenLedger l3(ab);
  CHECK_THROWS_AS(l3.step(g, 0, none, cc), InstrumentationError);
}

TEST_CASE("two-colouring") {
  CHECK(two_colouring_transition(false, false) == std::pair{true, false});
  CHECK(two_colouring_transition(false, true) == std::pair{false, true});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = generate_random_bounded_degree_tree(30, 4, seed);
    auto stack = make_named_stack("two-colour", g);
    StackOptions opts;
    opts.init = InitMode::Random;
    RunOptions ro;
    ro.tail = 1000;
    Configuration fin;
    auto rec = run_until_stable(g, stack, make_initial(g, stack, opts, seed), seed, ro, &fin);
    REQUIRE_FALSE(rec.capped);
    for (const auto& e : g.edges()) CHECK(fin[e.u].two_colour.bit != fin[e.v].two_colour.bit);
    CHECK(rec.output["two-colour"]["proper"] == true);
  }
}

TEST_CASE("counting") {
  auto [t, h] = counting_transition({3, 3}, {5, 5}, 10);
  CHECK(t.counter == 0);
  CHECK(h.counter == 8);
  CHECK(t.broadcast_max >= 8);
  CHECK(h.broadcast_max >= 8);
  CHECK_THROWS_AS(counting_transition({6, 6}, {5, 5}, 10), InvariantViolation);

  for (std::size_t n : {2u, 7u, 16u, 32u}) {
    auto g = generate_random_bounded_degree_tree(n, 3, n);
    auto stack = make_named_stack("count", g);
    Simulation sim(g, stack, make_initial(g, stack, {}, n), n);
    while (!sim.all_stable()) {
      sim.step();
      std::uint64_t sum = 0;
      for (const auto& s : sim.configuration()) sum += s.counting.counter;
      REQUIRE(sum == n);
    }
    for (const auto& s : sim.configuration()) CHECK(s.counting.broadcast_max == n);
  }
}

TEST_CASE("leader election keeps a token and elects the root") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto g = generate_random_bounded_degree_tree(25, 3, seed);
    auto stack = make_named_stack("leader", g);
    StackOptions opts;
    opts.leader_candidates.assign(25, false);
    opts.leader_candidates[seed % 25] = true;
    opts.leader_candidates[(seed * 7) % 25] = true;
    Simulation sim(g, stack, make_initial(g, stack, opts, seed), seed);
    while (!sim.all_stable()) {
      sim.step();
      std::size_t tokens = 0;
      for (const auto& s : sim.configuration()) tokens += s.leader.has_token;
      REQUIRE(tokens >= 1);
    }
    CHECK(leader_stable_predicate(g, sim.configuration()));
  }
}

TEST_CASE("majority reaches the initial majority") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = generate_random_bounded_degree_tree(21, 3, seed);
    auto stack = make_named_stack("majority", g);
    StackOptions opts;
    opts.inputs = MajorityInputs::Random;
    auto init = make_initial(g, stack, opts, seed);
    const auto k = census(init);
    Configuration fin;
    auto rec = run_until_stable(g, stack, init, seed, {}, &fin);
    REQUIRE_FALSE(rec.capped);
    CHECK(majority_stable_predicate(g, fin));
    const Opinion want = k.a > k.b ? Opinion::A : Opinion::B;
    for (const auto& s : fin) CHECK(s.majority.output == want);
  }
}
