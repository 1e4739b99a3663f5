#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "popproto/apps.hpp"
#include "popproto/colouring.hpp"
#include "popproto/errors.hpp"
#include "popproto/orientation.hpp"
#include "popproto/stacks.hpp"

using namespace popproto;

TEST_CASE("randomness helpers") {
  for (double r : {0.0, 0.3, 0.999999}) CHECK(draw_uniform_colour(r, 1) == 1);
  CHECK(draw_uniform_colour(0.0, 7) == 1);
  CHECK(draw_uniform_colour(0.99999999, 7) == 7);
  CHECK_FALSE(draw_bit(0.49));
  CHECK(draw_bit(0.5));
  CHECK(draw_initiator(0.2, 0.7) == Endpoint::First);
  CHECK(draw_initiator(0.7, 0.2) == Endpoint::Second);
  CHECK(draw_initiator(0.4, 0.4) == Endpoint::First);

  SplitMix64 rng(2024);
  std::array<double, 7> count{};
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) ++count[draw_uniform_colour(rng.uniform(), 7) - 1];
  double chi = 0.0;
  const double expected = draws / 7.0;
  for (double c : count) {
    CHECK(std::abs(c / draws - 1.0 / 7.0) <= 0.01);
    chi += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi < oracle::kChiSquare999Df6);
}

TEST_CASE("scheduler") {
  CHECK_THROWS_AS(Scheduler(generate_path(1), 1, 1), InvalidParameter);

  Scheduler one(generate_path(2), 3, 1);
  for (std::uint64_t t = 1; t <= 100; ++t) CHECK(one.draw(t).edge == 0);

  auto g = generate_path(11);
  Scheduler s(g, 99, 2);
  std::array<double, 10> count{};
  const int steps = 1'000'000;
  for (int t = 1; t <= steps; ++t) ++count[s.draw(t).edge];
  double chi = 0.0;
  for (double c : count) {
    CHECK(std::abs(c / steps - 0.1) <= 0.01);
    chi += (c - steps / 10.0) * (c - steps / 10.0) / (steps / 10.0);
  }
  CHECK(chi < oracle::kChiSquare999Df9);

  // Draws depend only on (seed, t).
  Scheduler again(g, 99, 2);
  CHECK(again.draw(777).edge == s.draw(777).edge);
  CHECK(again.draw(777).randomness[1].second == s.draw(777).randomness[1].second);
}

TEST_CASE("round tracker") {
  RoundTracker single(1);
  for (std::uint64_t t = 1; t <= 5; ++t) CHECK(single.advance(0, t));
  CHECK(single.completed_rounds() == 5);

  RoundTracker p3(2);
  CHECK_FALSE(p3.advance(0, 1));
  CHECK_FALSE(p3.advance(0, 2));
  CHECK(p3.advance(1, 3));
  CHECK(p3.boundaries() == std::vector<std::uint64_t>{0, 3});

  // Round lengths are coupon-collector times over m edges.
  auto g = generate_path(64);
  Scheduler s(g, 5, 1);
  RoundTracker tracker(g.edge_count());
  std::uint64_t t = 0;
  while (tracker.completed_rounds() < 400) tracker.advance(s.draw(++t).edge, t);
  const double mean = static_cast<double>(tracker.boundaries().back()) / 400.0;
  const double m = static_cast<double>(g.edge_count());
  const double expected = m * oracle::harmonic(g.edge_count());
  CHECK(mean >= 0.8 * expected);
  CHECK(mean <= 1.2 * expected);
}

TEST_CASE("stack composition") {
  auto g = generate_path(4);
  const std::size_t p = colour_palette_size(2);
  CHECK_NOTHROW(ProtocolStack::compose({std::make_shared<ColouringLayer>(p)}));
  auto s = ProtocolStack::compose({std::make_shared<ColouringLayer>(p),
                                   std::make_shared<OrientationLayer>(p),
                                   std::make_shared<MajorityLayer>()});
  CHECK(s.name() == "coloring+orientation+majority");
  CHECK(s.depends_on(2, 1));
  CHECK(s.depends_on(1, 0));
  CHECK_FALSE(s.depends_on(0, 1));
  CHECK(s.find("majority") == 2u);
  CHECK_THROWS_AS(ProtocolStack::compose({std::make_shared<MajorityLayer>(),
                                          std::make_shared<OrientationLayer>(p)}),
                  InvalidParameter);
  CHECK_THROWS_AS(ProtocolStack::compose({std::make_shared<ColouringLayer>(p),
                                          std::make_shared<ColouringLayer>(p)}),
                  InvalidParameter);
  CHECK_THROWS_AS(ProtocolStack::compose({std::make_shared<MajorityLayer>(),
                                          std::make_shared<MajorityLayer>()}),
                  InvalidParameter);
  CHECK_THROWS_AS(make_named_stack("gossip", g), InvalidParameter);
}

TEST_CASE("layers read post-update lower slices") {
  // Fresh n=2: the colouring interaction leaves colours alone, the
  // orientation layer then orients the edge, and the majority layer already
  // acts on that orientation within the same step.
  auto g = generate_path(2);
  auto stack = make_named_stack("majority", g);
  StackOptions opts;
  opts.inputs = MajorityInputs::Explicit;
  opts.explicit_inputs = {Opinion::A, Opinion::B};
  Simulation sim(g, stack, make_initial(g, stack, opts, 4), 4);
  auto r = sim.step();
  CHECK(r.layer_changed(1));
  CHECK(r.effects.app_tail_is_first.has_value());
  CHECK(r.effects.annihilated);
  CHECK(sim.configuration()[0].majority.token == Token::C);
  CHECK(sim.configuration()[1].majority.token == Token::C);
}

TEST_CASE("run_until_stable small cases") {
  auto g2 = generate_path(2);
  auto orient = make_named_stack("orientation", g2);
  auto rec = run_until_stable(g2, orient, make_initial(g2, orient, {}, 1), 1);
  CHECK_FALSE(rec.capped);
  CHECK(rec.steps[1].steps == 1u);

  // Majority alone on a pre-oriented edge with tokens (A,A).
  auto maj = ProtocolStack::compose({std::make_shared<MajorityLayer>()});
  Configuration base(2);
  base[0].colouring.colour = 1;
  base[1].colouring.colour = 2;
  orient_towards(g2, base, 1, 2);
  InitContext ctx;
  ctx.majority_inputs = {Opinion::A, Opinion::A};
  auto rec2 = run_until_stable(g2, maj, initial_configuration(g2, maj, ctx, 1, base), 1);
  CHECK(rec2.steps[0].steps == 0u);

  auto g16 = generate_path(16);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto full = make_named_stack("full", g16);
    RunOptions ro;
    ro.step_cap = 10'000'000;
    auto r = run_until_stable(g16, full, make_initial(g16, full, {}, seed), seed, ro);
    CHECK_FALSE(r.capped);
    for (const auto& o : r.steps) CHECK(o.steps.has_value());
  }
}

TEST_CASE("capped runs keep lower layer times") {
  auto g = generate_path(40);
  auto stack = make_named_stack("majority", g);
  RunOptions ro;
  ro.step_cap = 50;
  ro.tail = 0;
  auto rec = run_until_stable(g, stack, make_initial(g, stack, {}, 3), 3, ro);
  CHECK(rec.capped);
  CHECK_FALSE(rec.rounds.has_value());
  CHECK_FALSE(rec.top_steps().has_value());
}

TEST_CASE("determinism") {
  auto g = generate_random_bounded_degree_tree(30, 3, 8);
  auto stack = make_named_stack("full", g);
  auto a = run_until_stable(g, stack, make_initial(g, stack, {}, 8), 8);
  auto b = run_until_stable(g, stack, make_initial(g, stack, {}, 8), 8);
  CHECK(a.steps == b.steps);
  CHECK(a.rounds == b.rounds);
  CHECK(a.output == b.output);
}

TEST_CASE("incremental predicates agree with recomputation") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto g = generate_random_bounded_degree_tree(14, 3, seed);
    auto stack = make_named_stack("full", g);
    StackOptions opts;
    opts.init = seed % 2 ? InitMode::Random : InitMode::Fresh;
    opts.inputs = MajorityInputs::Random;
    Simulation sim(g, stack, make_initial(g, stack, opts, seed), seed);
    for (int t = 0; t < 20000; ++t) {
      if (t % 7 == 0)
        for (std::size_t i = 0; i < stack.size(); ++i)
          REQUIRE(sim.layer_stable(i) == stack_layer_stable(g, stack, sim.configuration(), i));
      sim.step();
    }
  }
}

TEST_CASE("trace writer") {
  auto g = generate_path(5);
  auto stack = make_named_stack("majority", g);
  std::ostringstream out;
  TraceWriter w(out, true);
  RunOptions ro;
  ro.step_cap = 10;
  ro.tail = 0;
  ro.observers = {&w};
  run_until_stable(g, stack, make_initial(g, stack, {}, 2), 2, ro);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  auto j = nlohmann::json::parse(line);
  CHECK(j["t"] == 1);
  CHECK(j.contains("tokens_A"));
  CHECK(j.contains("weak"));
  CHECK(j.contains("conflicts"));
}
