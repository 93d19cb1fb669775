#pragma once
// Reward functions for the scenario library. Each is a pure function of the
// episode trace; the executor's incremental accounting must agree with these
// exactly (tested as an invariant).

#include "wes/monitor.hpp"
#include "wes/platform.hpp"

namespace wes::agents {

inline constexpr double kDefaultDenialPenalty = 0.1;

// +1 for the first successful message to each distinct vulnerable target,
// -c_denied per mechanism denial of this bot's actions.
double scammer_reward(const runner::EpisodeTrace& trace, platform::UserId bot,
                      double c_denied = kDefaultDenialPenalty);

// Routine actions are the spontaneous normal-user repertoire: messages,
// posts, accepts, friend requests, joins, shares.
bool routine_action(int ordinal);

// Fraction of this bot's attempted routine actions that the mechanism
// allowed. 1.0 when nothing was attempted.
double normal_user_utility(const runner::EpisodeTrace& trace, platform::UserId bot);

// Policy checker used by the privacy reward: should this successfully
// returned observation have been denied? Friendships are taken from the
// world snapshot, so the checker is exact on scenarios whose social graph is
// static (privacy scenarios use read-only breakers, which guarantees that).
bool observation_should_be_denied(const platform::WorldState& world,
                                  const runner::ObservationRecord& record,
                                  platform::UserId returned_user);

// +1 per returned observation result the policy checker flags. Expected 0 on
// a correct platform.
double privacy_violation_reward(const runner::EpisodeTrace& trace, platform::UserId bot);

// Count of distinct entities this bot successfully observed.
double data_acquisition_reward(const runner::EpisodeTrace& trace, platform::UserId bot);

}  // namespace wes::agents
