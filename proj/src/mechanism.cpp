#include "wes/mechanism.hpp"

#include <algorithm>
#include <cmath>

namespace wes::mechanism {

MechanismParams identity_params() {
  MechanismParams p;
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    p.rate[i] = {kMaxRateWindow, kMaxRateCount};
    p.action_mask[i] = true;
    p.action_cost[i] = 1;
  }
  p.search_result_cap = kMaxSearchCap;
  p.visibility_hops = kMaxVisibilityHops;
  return p;
}

bool is_identity(const MechanismParams& params) {
  const MechanismParams id = identity_params();
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    if (params.rate[i].window != id.rate[i].window ||
        params.rate[i].max != id.rate[i].max ||
        params.action_mask[i] != id.action_mask[i] ||
        params.action_cost[i] != id.action_cost[i]) {
      return false;
    }
  }
  return params.search_result_cap == id.search_result_cap &&
         params.visibility_hops == id.visibility_hops;
}

void validate(const MechanismParams& params) {
  if (!within_bounds(encode(params), standard_bounds())) {
    throw OutOfBounds("mechanism parameters outside the published bounds");
  }
}

MechanismDecision MechanismDecision::allow(std::uint32_t cost) {
  MechanismDecision d;
  d.kind = DecisionKind::Allow;
  d.cost = cost;
  return d;
}

MechanismDecision MechanismDecision::deny(platform::DenyReason reason) {
  MechanismDecision d;
  d.kind = DecisionKind::Deny;
  d.reason = reason;
  return d;
}

MechanismDecision MechanismDecision::transform(ObservationQuery query) {
  MechanismDecision d;
  d.kind = DecisionKind::Transform;
  d.transformed = query;
  return d;
}

std::uint32_t RateLedger::count_in_window(UserId actor, int ordinal, Tick now,
                                          std::uint32_t window) const {
  auto it = accepted_.find({actor, ordinal});
  if (it == accepted_.end()) {
    return 0;
  }
  // Window is (now - window, now]; ticks are unsigned so guard the subtraction.
  std::uint32_t count = 0;
  for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
    const Tick t = *rit;
    if (t > now) {
      continue;
    }
    if (now < window || t > now - window) {
      ++count;
    } else {
      break;
    }
  }
  return count;
}

void RateLedger::record(UserId actor, int ordinal, Tick vtime) {
  auto& times = accepted_[{actor, ordinal}];
  times.push_back(vtime);
  // Nothing older than the widest possible window is ever counted again.
  const Tick cutoff = vtime >= kMaxRateWindow ? vtime - kMaxRateWindow : 0;
  while (!times.empty() && times.front() + 1 <= cutoff) {
    times.pop_front();
  }
}

MechanismDecision mediate_action(const MechanismParams& params, RateLedger& ledger,
                                 UserId actor, const Action& action, Tick vtime) {
  const int ordinal = action.ordinal();
  if (!params.action_mask[ordinal]) {
    return MechanismDecision::deny(platform::DenyReason::Masked);
  }
  const RateLimit& limit = params.rate[ordinal];
  const std::uint32_t used = ledger.count_in_window(actor, ordinal, vtime, limit.window);
  if (used >= limit.max) {
    return MechanismDecision::deny(platform::DenyReason::RateLimited);
  }
  ledger.record(actor, ordinal, vtime);
  return MechanismDecision::allow(params.action_cost[ordinal]);
}

MechanismDecision mediate_observation(const MechanismParams& params, UserId /*actor*/,
                                      const ObservationQuery& query) {
  if (query.kind != platform::QueryKind::SearchUsers) {
    return MechanismDecision::allow(0);
  }
  const bool uncapped = params.search_result_cap >= kMaxSearchCap;
  const bool unhopped = params.visibility_hops >= kMaxVisibilityHops;
  if (uncapped && unhopped) {
    return MechanismDecision::allow(0);
  }
  ObservationQuery narrowed = query;
  if (!uncapped) {
    narrowed.limit = std::min(narrowed.limit, params.search_result_cap);
  }
  if (!unhopped) {
    narrowed.max_hops = params.visibility_hops;
  }
  return MechanismDecision::transform(narrowed);
}

namespace {

std::vector<GeneBound> make_standard_bounds() {
  std::vector<GeneBound> bounds;
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    const std::string action = platform::to_string(static_cast<platform::ActionKind>(i));
    bounds.push_back({0, 1, true, "mask_" + action});
    bounds.push_back({1, static_cast<double>(kMaxRateWindow), true, "window_" + action});
    bounds.push_back({0, static_cast<double>(kMaxRateCount), true, "max_" + action});
    bounds.push_back({1, static_cast<double>(kMaxActionCost), true, "cost_" + action});
  }
  bounds.push_back({0, static_cast<double>(kMaxSearchCap), true, "search_result_cap"});
  bounds.push_back({1, static_cast<double>(kMaxVisibilityHops), true, "visibility_hops"});
  return bounds;
}

}  // namespace

const std::vector<GeneBound>& standard_bounds() {
  static const std::vector<GeneBound> bounds = make_standard_bounds();
  return bounds;
}

Genome encode(const MechanismParams& params) {
  Genome genome;
  genome.reserve(standard_bounds().size());
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    genome.push_back(params.action_mask[i] ? 1.0 : 0.0);
    genome.push_back(static_cast<double>(params.rate[i].window));
    genome.push_back(static_cast<double>(params.rate[i].max));
    genome.push_back(static_cast<double>(params.action_cost[i]));
  }
  genome.push_back(static_cast<double>(params.search_result_cap));
  genome.push_back(static_cast<double>(params.visibility_hops));
  return genome;
}

bool within_bounds(const Genome& genome, const std::vector<GeneBound>& bounds) {
  if (genome.size() != bounds.size()) {
    return false;
  }
  for (std::size_t i = 0; i < genome.size(); ++i) {
    if (!(genome[i] >= bounds[i].lo && genome[i] <= bounds[i].hi) ||
        !std::isfinite(genome[i])) {
      return false;
    }
  }
  return true;
}

MechanismParams decode(const Genome& genome) {
  const auto& bounds = standard_bounds();
  if (genome.size() != bounds.size()) {
    throw OutOfBounds("genome length " + std::to_string(genome.size()) +
                      " != " + std::to_string(bounds.size()));
  }
  if (!within_bounds(genome, bounds)) {
    throw OutOfBounds("genome component outside published bounds");
  }
  auto as_u32 = [](double v) {
    return static_cast<std::uint32_t>(std::llround(v));
  };
  MechanismParams params;
  std::size_t g = 0;
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    params.action_mask[i] = genome[g++] >= 0.5;
    params.rate[i].window = as_u32(genome[g++]);
    params.rate[i].max = as_u32(genome[g++]);
    params.action_cost[i] = as_u32(genome[g++]);
  }
  params.search_result_cap = as_u32(genome[g++]);
  params.visibility_hops = as_u32(genome[g++]);
  return params;
}

}  // namespace wes::mechanism
