#include <doctest.h>

#include "fixtures.hpp"
#include "popproto/errors.hpp"
#include "popproto/stacks.hpp"

using namespace popproto;

namespace {

ColouringState state(std::size_t palette, Colour colour) {
  auto s = fresh_colouring_state(palette);
  s.colour = colour;
  return s;
}

// The five-node configuration with one stamp conflict on {u2,u4} and a
// colour conflict path (u1,u2,u3); u_i is node i-1.
struct ConflictExample {
  Graph g = Graph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}});
  Configuration c;

  ConflictExample() : c(5) {
    const Colour colours[] = {1, 2, 1, 3, 4};
    for (Node v = 0; v < 5; ++v) c[v].colouring = state(7, colours[v]);
    c[1].colouring.stamps.set(3, Stamp::Zero);
    c[3].colouring.stamps.set(2, Stamp::One);
    c[1].colouring.stamps.set(1, Stamp::One);
    c[0].colouring.stamps.set(2, Stamp::One);
  }
  EdgeId edge(Node a, Node b) const { return *g.find_edge(a, b); }
};

}  // namespace

TEST_CASE("palette size") {
  CHECK(colour_palette_size(3) == 63);
  CHECK(colour_palette_size(2, 5) == 20);
  CHECK(fresh_colouring_state(63).stamps.palette_size() == 63);
  CHECK_THROWS_AS(colour_palette_size(3, 0), InvalidParameter);
}

TEST_CASE("colouring transition") {
  const std::size_t p = 7;
  SUBCASE("stamp conflict recolours and clears") {
    auto u = state(p, 2);
    auto v = state(p, 5);
    u.stamps.set(5, Stamp::Zero);
    v.stamps.set(2, Stamp::One);
    u.stamps.set(4, Stamp::One);
    v.stamps.set(6, Stamp::Zero);
    auto out = colouring_transition(u, 0.51, v, 0.13, p);
    CHECK(out.recoloured);
    CHECK(out.u.colour == draw_uniform_colour(0.51, p));
    CHECK(out.v.colour == draw_uniform_colour(0.13, p));
    CHECK(out.u.stamps.known_count() == 1);
    CHECK(out.v.stamps.known_count() == 1);
    CHECK(out.u.stamps.get(out.v.colour) == out.v.stamps.get(out.u.colour));
    CHECK(out.u.stamps.get(out.v.colour) != Stamp::Cleared);
  }
  SUBCASE("a cleared stamp never conflicts") {
    for (Stamp other : {Stamp::Zero, Stamp::One, Stamp::Cleared}) {
      auto u = state(p, 3);
      auto v = state(p, 4);
      v.stamps.set(3, other);
      auto out = colouring_transition(u, 0.8, v, 0.2, p);
      CHECK_FALSE(out.recoloured);
      CHECK(out.u.colour == 3);
      CHECK(out.v.colour == 4);
      CHECK(out.u.stamps.get(4) == out.v.stamps.get(3));
      CHECK(out.u.stamps.get(4) != Stamp::Cleared);
    }
  }
  SUBCASE("equal stamps are no conflict") {
    auto u = state(p, 3);
    auto v = state(p, 4);
    u.stamps.set(4, Stamp::One);
    v.stamps.set(3, Stamp::One);
    std::set<Stamp> seen;
    for (double r : {0.05, 0.1, 0.2, 0.33, 0.47, 0.6, 0.71, 0.93}) {
      auto out = colouring_transition(u, r, v, 0.5, p);
      CHECK_FALSE(out.recoloured);
      CHECK(out.u.stamps.get(4) == out.v.stamps.get(3));
      seen.insert(out.u.stamps.get(4));
    }
    CHECK(seen.size() == 2);  // the fresh bit takes both values
  }
}

TEST_CASE("edge classification on a five-node conflict example") {
  ConflictExample f;
  using K = ConflictClassification;
  CHECK(classify_edge(f.g, f.c, f.edge(1, 3)) == K{true, false});
  CHECK(classify_edge(f.g, f.c, f.edge(0, 1)) == K{false, true});
  CHECK(classify_edge(f.g, f.c, f.edge(1, 2)) == K{false, true});
  CHECK(classify_edge(f.g, f.c, f.edge(2, 4)) == K{false, false});
  CHECK(classify_edge(f.g, f.c, f.edge(3, 4)) == K{false, false});
  CHECK(conflict_edges(f.g, f.c) ==
        std::vector<EdgeId>{f.edge(0, 1), f.edge(1, 2), f.edge(1, 3)});
  CHECK_FALSE(colouring_stable_predicate(f.g, f.c));
}

TEST_CASE("edge classification basics") {
  auto g = generate_random_bounded_degree_tree(20, 3, 4);
  Configuration c(20);
  for (Node v = 0; v < 20; ++v) c[v].colouring = state(63, v + 1);
  for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK_FALSE(classify_edge(g, c, e).conflict());
  CHECK(conflict_edges(g, c).empty());
  CHECK(colouring_stable_predicate(g, c));

  auto star = generate_star(4);
  Configuration s(4);
  const Colour colours[] = {1, 2, 2, 3};
  for (Node v = 0; v < 4; ++v) s[v].colouring = state(7, colours[v]);
  CHECK(classify_edge(star, s, *star.find_edge(0, 1)).colour_conflict);
  CHECK(classify_edge(star, s, *star.find_edge(0, 2)).colour_conflict);
  CHECK_FALSE(classify_edge(star, s, *star.find_edge(0, 3)).colour_conflict);

  s[1].colouring.stamps.set(2, Stamp::One);
  s[0].colouring.stamps.set(2, Stamp::Zero);
  CHECK_FALSE(colouring_stable_predicate(star, s));
}

TEST_CASE("conflict set agrees with brute force") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(29);
    auto g = generate_random_bounded_degree_tree(n, 2 + rng.below(3), rng.next());
    auto c = fixture::random_colouring(g, 16, 1 + rng.below(8), rng);
    auto brute = oracle::colour_conflict_edges(g, colours_of(c));
    std::vector<EdgeId> expected;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      const bool colour = brute.count({ed.u, ed.v}) > 0;
      CHECK(classify_edge(g, c, e).colour_conflict == colour);
      if (classify_edge(g, c, e).conflict()) expected.push_back(e);
    }
    CHECK(conflict_edges(g, c) == expected);
  }
}

TEST_CASE("path extension examples") {
  auto star = generate_star(3);
  Configuration s(3);
  for (Node v = 0; v < 3; ++v) s[v].colouring = state(7, v == 0 ? 1 : 2);
  auto f = build_path_extension(star, s);
  const EdgeId e1 = *star.find_edge(0, 1), e2 = *star.find_edge(0, 2);
  CHECK(f.at(e1) == e2);
  CHECK(f.at(e2) == e1);

  auto path = generate_path(3);
  Configuration p(3);
  const Colour colours[] = {5, 1, 5};
  for (Node v = 0; v < 3; ++v) p[v].colouring = state(7, colours[v]);
  auto fp = build_path_extension(path, p);
  CHECK(fp.at(*path.find_edge(0, 1)) == *path.find_edge(1, 2));
  CHECK(fp.at(*path.find_edge(1, 2)) == *path.find_edge(0, 1));
}

TEST_CASE("path extension on random configurations") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + rng.below(28);
    auto g = generate_random_bounded_degree_tree(n, 2 + rng.below(4), rng.next());
    auto c = fixture::random_colouring(g, 8, 1 + rng.below(4), rng);
    CHECK(fixture::path_extension_problem(g, c, build_path_extension(g, c)) == "");
  }
}

TEST_CASE("stabilised colouring is a silent valid 2-hop colouring") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = generate_random_bounded_degree_tree(30, 3, seed);
    auto stack = make_named_stack("coloring", g);
    StackOptions opts;
    opts.init = seed % 2 ? InitMode::Random : InitMode::Fresh;
    RunOptions ro;
    ro.tail = 0;
    Configuration final_c;
    auto rec = run_until_stable(g, stack, make_initial(g, stack, opts, seed), seed, ro, &final_c);
    REQUIRE_FALSE(rec.capped);
    CHECK(colouring_stable_predicate(g, final_c));
    CHECK(is_valid_two_hop_colouring(g, colours_of(final_c)));

    Simulation sim(g, stack, final_c, seed + 1000);
    for (int t = 0; t < 10000; ++t) {
      auto r = sim.step();
      REQUIRE_FALSE(r.effects.recoloured);
    }
    CHECK(colours_of(sim.configuration()) == colours_of(final_c));
  }
}

TEST_CASE("randomness outcomes cover both bits and every colour pair") {
  ColouringLayer layer(3);
  auto outcomes = layer.randomness_outcomes();
  CHECK(outcomes.size() == 18);
  std::set<std::tuple<Colour, Colour, bool>> seen;
  for (auto r : outcomes)
    seen.insert({draw_uniform_colour(r.first, 3), draw_uniform_colour(r.second, 3),
                 draw_bit(residual(r.first, 3))});
  CHECK(seen.size() == 18);
}
