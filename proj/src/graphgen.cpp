#include "wes/graphgen.hpp"

#include <algorithm>

namespace wes::graphgen {

using platform::UserId;
using platform::WorldState;

void validate(const GraphSpec& spec) {
  if (spec.n_users == 0) {
    throw InvalidSpec("n_users must be >= 1");
  }
  if (spec.vulnerable_prob < 0.0 || spec.vulnerable_prob > 1.0) {
    throw InvalidSpec("vulnerable_prob must be in [0,1]");
  }
  if (spec.bad_actor_count >= spec.n_users) {
    throw InvalidSpec("bad_actor_count must be < n_users");
  }
  switch (spec.model) {
    case GraphModel::PreferentialAttachment:
      if (spec.pa_edges_per_arrival >= spec.n_users) {
        throw InvalidSpec("edges per arrival must be < n_users");
      }
      break;
    case GraphModel::ErdosRenyi:
      if (spec.er_edge_prob < 0.0 || spec.er_edge_prob > 1.0) {
        throw InvalidSpec("edge probability must be in [0,1]");
      }
      break;
    case GraphModel::Ring:
      if (spec.ring_neighbors % 2 != 0) {
        throw InvalidSpec("ring neighbor count must be even");
      }
      if (spec.ring_neighbors >= spec.n_users && spec.ring_neighbors != 0) {
        throw InvalidSpec("ring neighbor count must be < n_users");
      }
      break;
  }
  if (spec.groups.membership_prob < 0.0 || spec.groups.membership_prob > 1.0) {
    throw InvalidSpec("group membership probability must be in [0,1]");
  }
}

namespace {

void build_preferential_attachment(WorldState& world, const GraphSpec& spec, Rng& rng) {
  const std::uint32_t n = spec.n_users;
  const std::uint32_t m = spec.pa_edges_per_arrival;
  if (m == 0 || n < 2) {
    return;
  }
  // Seed clique on the first m nodes, then each arrival attaches m edges to
  // distinct targets picked proportionally to degree (repeated-endpoint
  // list sampling).
  std::vector<UserId> endpoints;
  for (UserId a = 0; a < m; ++a) {
    for (UserId b = a + 1; b < m; ++b) {
      platform::add_friendship(world, a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  if (m == 1) {
    // Single node seed; attach the second node directly so the endpoint list
    // is non-empty.
    endpoints.push_back(0);
  }
  for (UserId arrival = std::max<UserId>(m, 1); arrival < n; ++arrival) {
    std::vector<UserId> targets;
    while (targets.size() < m) {
      const UserId candidate = endpoints[rng.uniform_index(endpoints.size())];
      if (candidate == arrival ||
          std::find(targets.begin(), targets.end(), candidate) != targets.end()) {
        continue;
      }
      targets.push_back(candidate);
    }
    for (UserId t : targets) {
      platform::add_friendship(world, arrival, t);
      endpoints.push_back(arrival);
      endpoints.push_back(t);
    }
  }
}

void build_erdos_renyi(WorldState& world, const GraphSpec& spec, Rng& rng) {
  if (spec.er_edge_prob <= 0.0) {
    return;
  }
  for (UserId a = 0; a < spec.n_users; ++a) {
    for (UserId b = a + 1; b < spec.n_users; ++b) {
      if (rng.bernoulli(spec.er_edge_prob)) {
        platform::add_friendship(world, a, b);
      }
    }
  }
}

void build_ring(WorldState& world, const GraphSpec& spec) {
  const std::uint32_t n = spec.n_users;
  const std::uint32_t half = spec.ring_neighbors / 2;
  if (half == 0 || n < 2) {
    return;
  }
  for (UserId a = 0; a < n; ++a) {
    for (std::uint32_t step = 1; step <= half; ++step) {
      const UserId b = static_cast<UserId>((a + step) % n);
      if (a != b && !world.are_friends(a, b)) {
        platform::add_friendship(world, a, b);
      }
    }
  }
}

}  // namespace

WorldState generate(const GraphSpec& spec) {
  validate(spec);
  WorldState world;

  Rng trait_rng(split_seed(spec.seed, "graphgen-traits"));
  for (UserId id = 0; id < spec.n_users; ++id) {
    platform::UserProfile profile;
    profile.id = id;
    profile.partition = platform::Partition::Synthetic;
    profile.vulnerable = spec.vulnerable_prob > 0.0 && trait_rng.bernoulli(spec.vulnerable_prob);
    profile.profile_visibility = spec.profile_visibility;
    platform::add_user(world, profile);
  }

  // Bad actors: a seeded sample of distinct users.
  if (spec.bad_actor_count > 0) {
    Rng bad_rng(split_seed(spec.seed, "graphgen-bad-actors"));
    std::set<UserId> chosen;
    while (chosen.size() < spec.bad_actor_count) {
      chosen.insert(static_cast<UserId>(bad_rng.uniform_index(spec.n_users)));
    }
    for (UserId id : chosen) {
      world.users.at(id).bad_actor = true;
    }
  }

  Rng edge_rng(split_seed(spec.seed, "graphgen-edges"));
  if (spec.n_users > 1) {
    switch (spec.model) {
      case GraphModel::PreferentialAttachment:
        build_preferential_attachment(world, spec, edge_rng);
        break;
      case GraphModel::ErdosRenyi:
        build_erdos_renyi(world, spec, edge_rng);
        break;
      case GraphModel::Ring:
        build_ring(world, spec);
        break;
    }
  }

  if (spec.groups.count > 0) {
    Rng group_rng(split_seed(spec.seed, "graphgen-groups"));
    for (std::uint32_t g = 0; g < spec.groups.count; ++g) {
      std::vector<UserId> members;
      for (UserId id = 0; id < spec.n_users; ++id) {
        if (group_rng.bernoulli(spec.groups.membership_prob)) {
          members.push_back(id);
        }
      }
      platform::add_group(world, members);
    }
  }

  return world;
}

DegreeStats degree_stats(const platform::WorldState& world) {
  DegreeStats stats;
  if (world.users.empty()) {
    return stats;
  }
  std::vector<std::uint32_t> degrees;
  degrees.reserve(world.users.size());
  for (const auto& [id, _] : world.users) {
    auto it = world.adjacency.find(id);
    degrees.push_back(it == world.adjacency.end()
                          ? 0u
                          : static_cast<std::uint32_t>(it->second.size()));
  }
  stats.min = *std::min_element(degrees.begin(), degrees.end());
  stats.max = *std::max_element(degrees.begin(), degrees.end());
  double sum = 0.0;
  for (std::uint32_t d : degrees) {
    sum += d;
  }
  stats.mean = sum / static_cast<double>(degrees.size());
  stats.histogram.assign(stats.max + 1, 0);
  for (std::uint32_t d : degrees) {
    stats.histogram[d] += 1;
  }
  return stats;
}

}  // namespace wes::graphgen
