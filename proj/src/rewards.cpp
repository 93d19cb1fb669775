#include "wes/rewards.hpp"

#include <set>

namespace wes::agents {

using platform::ActionKind;
using platform::QueryKind;
using platform::UserId;
using platform::Visibility;

double scammer_reward(const runner::EpisodeTrace& trace, UserId bot, double c_denied) {
  double total = 0.0;
  std::set<UserId> contacted;
  for (const auto& ev : trace.events) {
    if (ev.actor != bot || ev.action.kind != ActionKind::SendMessage) {
      continue;
    }
    const UserId target = ev.action.peer;
    if (!trace.initial_world->has_user(target) ||
        !trace.initial_world->users.at(target).vulnerable) {
      continue;
    }
    if (contacted.insert(target).second) {
      total += 1.0;
    }
  }
  for (const auto& audit : trace.audits) {
    if (audit.actor == bot && audit.mechanism_stage) {
      total -= c_denied;
    }
  }
  return total;
}

bool routine_action(int ordinal) {
  switch (static_cast<ActionKind>(ordinal)) {
    case ActionKind::SendMessage:
    case ActionKind::CreatePost:
    case ActionKind::AcceptFriendRequest:
    case ActionKind::SendFriendRequest:
    case ActionKind::JoinGroup:
    case ActionKind::ShareData:
      return true;
    default:
      return false;
  }
}

double normal_user_utility(const runner::EpisodeTrace& trace, UserId bot) {
  std::uint64_t attempts = 0;
  std::uint64_t allowed = 0;
  for (const auto& ev : trace.events) {
    if (ev.actor == bot && routine_action(ev.action.ordinal())) {
      attempts += 1;
      allowed += 1;
    }
  }
  for (const auto& audit : trace.audits) {
    if (audit.actor != bot || !routine_action(audit.ordinal)) {
      continue;
    }
    attempts += 1;
    if (!audit.mechanism_stage) {
      // The mechanism allowed it; the platform (or an injected fault)
      // rejected it afterwards.
      allowed += 1;
    }
  }
  if (attempts == 0) {
    return 1.0;
  }
  return static_cast<double>(allowed) / static_cast<double>(attempts);
}

bool observation_should_be_denied(const platform::WorldState& world,
                                  const runner::ObservationRecord& record,
                                  UserId returned_user) {
  auto profile_hidden = [&](UserId subject) {
    if (subject == record.actor) {
      return false;
    }
    auto it = world.users.find(subject);
    if (it == world.users.end()) {
      return true;
    }
    switch (it->second.profile_visibility) {
      case Visibility::Public: return false;
      case Visibility::FriendsOnly: return !world.are_friends(record.actor, subject);
      case Visibility::OwnerOnly: return true;
    }
    return true;
  };

  switch (record.kind) {
    case QueryKind::ViewProfile:
    case QueryKind::ListFriends:
      return profile_hidden(record.query_user);
    case QueryKind::SearchUsers:
      return profile_hidden(returned_user);
    case QueryKind::ViewPost: {
      if (record.actor == record.post_author) {
        return false;
      }
      switch (record.post_visibility) {
        case Visibility::Public: return false;
        case Visibility::FriendsOnly:
          return !world.are_friends(record.actor, record.post_author);
        case Visibility::OwnerOnly: return true;
      }
      return true;
    }
    case QueryKind::ReadMessage:
      // Recipient-only by construction; not re-checked here.
      return false;
  }
  return false;
}

double privacy_violation_reward(const runner::EpisodeTrace& trace, UserId bot) {
  double total = 0.0;
  for (const auto& record : trace.observations) {
    if (record.actor != bot || !record.ok) {
      continue;
    }
    if (record.kind == QueryKind::SearchUsers) {
      for (UserId u : record.returned_users) {
        if (observation_should_be_denied(*trace.initial_world, record, u)) {
          total += 1.0;
        }
      }
    } else {
      if (observation_should_be_denied(*trace.initial_world, record, 0)) {
        total += 1.0;
      }
    }
  }
  return total;
}

double data_acquisition_reward(const runner::EpisodeTrace& trace, UserId bot) {
  std::set<std::pair<char, std::uint64_t>> seen;
  for (const auto& record : trace.observations) {
    if (record.actor != bot || !record.ok) {
      continue;
    }
    switch (record.kind) {
      case QueryKind::ViewProfile:
      case QueryKind::ListFriends:
        // The friend list is profile data; both resolve to the same entity.
        seen.insert({'u', record.query_user});
        break;
      case QueryKind::ViewPost:
        seen.insert({'p', record.query_post});
        break;
      case QueryKind::ReadMessage:
        seen.insert({'m', record.query_message});
        break;
      case QueryKind::SearchUsers:
        break;  // discovery, not access
    }
  }
  return static_cast<double>(seen.size());
}

}  // namespace wes::agents
