#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wes/graphgen.hpp"

using namespace wes;
using namespace wes::graphgen;

namespace {

GraphSpec pa_spec(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
  GraphSpec spec;
  spec.n_users = n;
  spec.model = GraphModel::PreferentialAttachment;
  spec.pa_edges_per_arrival = m;
  spec.seed = seed;
  return spec;
}

GraphSpec er_spec(std::uint32_t n, double p, std::uint64_t seed) {
  GraphSpec spec;
  spec.n_users = n;
  spec.model = GraphModel::ErdosRenyi;
  spec.er_edge_prob = p;
  spec.seed = seed;
  return spec;
}

GraphSpec ring_spec(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
  GraphSpec spec;
  spec.n_users = n;
  spec.model = GraphModel::Ring;
  spec.ring_neighbors = k;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("single-user worlds have one user and no edges for every model") {
  for (const GraphSpec& spec :
       {pa_spec(1, 0, 3), er_spec(1, 0.5, 3), ring_spec(1, 0, 3)}) {
    const auto world = generate(spec);
    CHECK(world.users.size() == 1);
    CHECK(world.edge_count() == 0);
  }
}

TEST_CASE("generation is a pure function of the spec") {
  GraphSpec spec = pa_spec(200, 3, 77);
  spec.vulnerable_prob = 0.2;
  spec.bad_actor_count = 5;
  spec.groups = {3, 0.3};
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(platform::state_hash(a) == platform::state_hash(b));

  spec.seed = 78;
  const auto c = generate(spec);
  CHECK(platform::state_hash(a) != platform::state_hash(c));
}

TEST_CASE("preferential attachment edge count matches the construction formula") {
  // m-clique seed plus m edges per arrival: |E| = C(m,2) + m(n-m).
  for (const auto& [n, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
           {1000, 3}, {50, 2}, {10, 4}, {5, 1}}) {
    const auto world = generate(pa_spec(n, m, 11));
    const std::size_t expected = m * (m - 1) / 2 + static_cast<std::size_t>(m) * (n - m);
    CHECK(world.edge_count() == expected);
  }
}

TEST_CASE("ring k=2 over ten users gives every user degree 2") {
  const auto world = generate(ring_spec(10, 2, 0));
  const auto stats = degree_stats(world);
  CHECK(stats.min == 2);
  CHECK(stats.max == 2);
  CHECK(stats.mean == doctest::Approx(2.0));
}

TEST_CASE("empty Erdos-Renyi graph has all degrees zero") {
  const auto world = generate(er_spec(20, 0.0, 5));
  const auto stats = degree_stats(world);
  CHECK(stats.max == 0);
  CHECK(stats.mean == doctest::Approx(0.0));
}

TEST_CASE("mean degree equals 2E/n on generated graphs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto world = generate(er_spec(100, 0.08, seed));
    const auto stats = degree_stats(world);
    std::size_t degree_sum = 0;
    for (const auto& [id, _] : world.users) {
      auto it = world.adjacency.find(id);
      degree_sum += it == world.adjacency.end() ? 0 : it->second.size();
    }
    CHECK(degree_sum % 2 == 0);
    CHECK(stats.mean ==
          doctest::Approx(2.0 * world.edge_count() / world.users.size()));
    CHECK(degree_sum == 2 * world.edge_count());
  }
}

TEST_CASE("degree histogram sums to the user count") {
  const auto world = generate(pa_spec(300, 3, 9));
  const auto stats = degree_stats(world);
  std::uint64_t total = 0;
  for (std::uint32_t bucket : stats.histogram) {
    total += bucket;
  }
  CHECK(total == world.users.size());
}

TEST_CASE("preferential attachment has a heavier tail than Erdos-Renyi") {
  // Equal mean degree (~6 at m=3); the scale-free max degree should win in
  // at least 90% of paired seeds.
  const std::uint32_t n = 1000;
  const double p = 6.0 / static_cast<double>(n - 1);
  int pa_wins = 0;
  const int pairs = 100;
  for (int i = 0; i < pairs; ++i) {
    const auto pa = generate(pa_spec(n, 3, 1000 + i));
    const auto er = generate(er_spec(n, p, 2000 + i));
    if (degree_stats(pa).max > degree_stats(er).max) {
      ++pa_wins;
    }
  }
  CHECK(pa_wins >= 90);
}

TEST_CASE("trait sampling follows the spec probabilities") {
  GraphSpec spec = er_spec(2000, 0.0, 31);
  spec.vulnerable_prob = 0.25;
  spec.bad_actor_count = 7;
  const auto world = generate(spec);
  int vulnerable = 0;
  int bad = 0;
  for (const auto& [_, profile] : world.users) {
    vulnerable += profile.vulnerable ? 1 : 0;
    bad += profile.bad_actor ? 1 : 0;
  }
  CHECK(bad == 7);
  CHECK(vulnerable > 2000 * 0.25 * 0.7);
  CHECK(vulnerable < 2000 * 0.25 * 1.3);
}

TEST_CASE("group membership respects the group spec") {
  GraphSpec spec = er_spec(100, 0.0, 8);
  spec.groups = {4, 0.5};
  const auto world = generate(spec);
  CHECK(world.groups.size() == 4);
  for (const auto& [_, members] : world.groups) {
    CHECK(members.size() > 20);
    CHECK(members.size() < 80);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(validate(pa_spec(10, 10, 0)), InvalidSpec);
  CHECK_THROWS_AS(validate(er_spec(10, 1.5, 0)), InvalidSpec);
  CHECK_THROWS_AS(validate(ring_spec(10, 3, 0)), InvalidSpec);  // odd k
  CHECK_THROWS_AS(validate(ring_spec(4, 6, 0)), InvalidSpec);
  GraphSpec bad_vuln = er_spec(10, 0.5, 0);
  bad_vuln.vulnerable_prob = -0.1;
  CHECK_THROWS_AS(validate(bad_vuln), InvalidSpec);
  GraphSpec bad_actor = er_spec(10, 0.5, 0);
  bad_actor.bad_actor_count = 10;
  CHECK_THROWS_AS(validate(bad_actor), InvalidSpec);
  GraphSpec zero = er_spec(10, 0.5, 0);
  zero.n_users = 0;
  CHECK_THROWS_AS(validate(zero), InvalidSpec);
}
