#pragma once
// Deterministic synthetic social graph generation: preferential attachment
// (m-clique initialization), Erdos-Renyi, and ring lattices, plus trait
// sampling and group assignment. generate() is a pure function of the spec,
// seed included.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wes/platform.hpp"

namespace wes::graphgen {

enum class GraphModel : std::uint8_t { PreferentialAttachment, ErdosRenyi, Ring };

struct GroupSpec {
  std::uint32_t count = 0;
  double membership_prob = 0.0;
};

struct GraphSpec {
  std::uint32_t n_users = 1;
  GraphModel model = GraphModel::ErdosRenyi;
  std::uint32_t pa_edges_per_arrival = 0;  // PreferentialAttachment m
  double er_edge_prob = 0.0;               // ErdosRenyi p
  std::uint32_t ring_neighbors = 0;        // Ring k (even, degree per node)
  double vulnerable_prob = 0.0;
  std::uint32_t bad_actor_count = 0;
  GroupSpec groups;
  platform::Visibility profile_visibility = platform::Visibility::Public;
  std::uint64_t seed = 0;
};

struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Throws InvalidSpec when the spec invariants do not hold.
void validate(const GraphSpec& spec);

// Builds a world of n_users Synthetic users with model edges, sampled traits
// and groups. Identical spec (seed included) gives an identical world hash.
platform::WorldState generate(const GraphSpec& spec);

struct DegreeStats {
  std::uint32_t min = 0;
  std::uint32_t max = 0;
  double mean = 0.0;
  std::vector<std::uint32_t> histogram;  // histogram[d] = #users with degree d
};

DegreeStats degree_stats(const platform::WorldState& world);

}  // namespace wes::graphgen
