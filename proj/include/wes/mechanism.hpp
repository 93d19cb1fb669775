#pragma once
// The mediation layer between bots and the platform. Every bot action and
// observation passes through mediate_* against a MechanismParams vector;
// the same vector doubles as the optimizer genome (see encode/decode).

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wes/platform.hpp"

namespace wes::mechanism {

using platform::Action;
using platform::ObservationQuery;
using platform::Tick;
using platform::UserId;

// Published parameter maxima. A cap or hop count at its maximum is the
// "unrestricted" sentinel so identity parameters pass queries through
// unchanged.
inline constexpr std::uint32_t kMaxRateWindow = 64;
inline constexpr std::uint32_t kMaxRateCount = 64;
inline constexpr std::uint32_t kMaxActionCost = 8;
inline constexpr std::uint32_t kMaxSearchCap = 64;
inline constexpr std::uint32_t kMaxVisibilityHops = 8;

struct RateLimit {
  std::uint32_t window = 1;  // ticks, >= 1
  std::uint32_t max = 0;     // accepted actions per trailing window
};

struct MechanismParams {
  std::array<RateLimit, platform::kActionKindCount> rate{};
  std::array<bool, platform::kActionKindCount> action_mask{};
  std::array<std::uint32_t, platform::kActionKindCount> action_cost{};
  std::uint32_t search_result_cap = 0;
  std::uint32_t visibility_hops = 1;
};

// Pass-through baseline: all masks on, caps and hops at their unrestricted
// maxima, unit costs, non-binding rate limits.
MechanismParams identity_params();

bool is_identity(const MechanismParams& params);

// Parameters must lie within the published genome bounds. Throws OutOfBounds.
void validate(const MechanismParams& params);

enum class DecisionKind : std::uint8_t { Allow, Deny, Transform };

struct MechanismDecision {
  DecisionKind kind = DecisionKind::Allow;
  std::uint32_t cost = 1;                                   // Allow
  platform::DenyReason reason = platform::DenyReason::None; // Deny
  ObservationQuery transformed;                             // Transform

  static MechanismDecision allow(std::uint32_t cost);
  static MechanismDecision deny(platform::DenyReason reason);
  static MechanismDecision transform(ObservationQuery query);
};

// Exact sliding-window accounting of accepted actions, per actor per action
// ordinal. Episode-local.
class RateLedger {
 public:
  // Accepted actions of `ordinal` by `actor` with time in (now - window, now].
  std::uint32_t count_in_window(UserId actor, int ordinal, Tick now,
                                std::uint32_t window) const;

  void record(UserId actor, int ordinal, Tick vtime);

 private:
  std::map<std::pair<UserId, int>, std::deque<Tick>> accepted_;
};

// Allow iff the action is unmasked and the actor's accepted count of this
// ordinal within the trailing window is below the limit. Allow records the
// acceptance in the ledger. Denial is a value, never an error.
MechanismDecision mediate_action(const MechanismParams& params, RateLedger& ledger,
                                 UserId actor, const Action& action, Tick vtime);

// SearchUsers is narrowed to the result cap and visibility hops; every other
// query passes through untouched.
MechanismDecision mediate_observation(const MechanismParams& params, UserId actor,
                                      const ObservationQuery& query);

// --- Genome codec ------------------------------------------------------------

using Genome = std::vector<double>;

struct GeneBound {
  double lo = 0.0;
  double hi = 1.0;
  bool integer = true;
  std::string name;
};

struct OutOfBounds : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The published bounds table for the full mechanism genome: per action
// ordinal [mask, window, max, cost], then search_result_cap, visibility_hops.
const std::vector<GeneBound>& standard_bounds();

Genome encode(const MechanismParams& params);

// Strict: out-of-bounds genes raise OutOfBounds, nothing is clamped.
MechanismParams decode(const Genome& genome);

bool within_bounds(const Genome& genome, const std::vector<GeneBound>& bounds);

}  // namespace wes::mechanism
