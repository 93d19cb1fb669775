#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "wes/platform.hpp"
#include "wes/platform_log.hpp"
#include "wes/rng.hpp"

using namespace wes;
using namespace wes::platform;

namespace {

WorldState small_world(int users = 6) {
  WorldState world;
  for (int i = 0; i < users; ++i) {
    UserProfile profile;
    profile.id = static_cast<UserId>(i);
    add_user(world, profile);
  }
  return world;
}

WorldState world_with_protected() {
  WorldState world = small_world(4);
  UserProfile p;
  p.id = 100;
  p.partition = Partition::Protected;
  add_user(world, p);
  UserProfile q;
  q.id = 101;
  q.partition = Partition::Protected;
  add_user(world, q);
  add_friendship(world, 100, 101);
  return world;
}

Action random_action(Rng& rng, const WorldState& world) {
  const UserId max_id = world.max_user_id();
  const auto pick_user = [&]() {
    return static_cast<UserId>(rng.uniform_index(max_id + 1));
  };
  switch (rng.uniform_index(7)) {
    case 0: return Action::send_friend_request(pick_user());
    case 1: return Action::accept_friend_request(pick_user());
    case 2:
      return Action::create_post(static_cast<ContentTag>(rng.uniform_index(8)),
                                 static_cast<Visibility>(rng.uniform_index(3)));
    case 3:
      return Action::send_message(pick_user(),
                                  static_cast<ContentTag>(rng.uniform_index(8)));
    case 4: return Action::get_message(1 + rng.uniform_index(8));
    case 5: return Action::join_group(static_cast<GroupId>(1 + rng.uniform_index(3)));
    default:
      return Action::share_data(1 + rng.uniform_index(8), pick_user());
  }
}

ObservationQuery random_query(Rng& rng, const WorldState& world) {
  const UserId max_id = world.max_user_id();
  const auto pick_user = [&]() {
    return static_cast<UserId>(rng.uniform_index(max_id + 1));
  };
  switch (rng.uniform_index(5)) {
    case 0: return ObservationQuery::read_message({1 + rng.uniform_index(8)});
    case 1: return ObservationQuery::view_post(1 + rng.uniform_index(8));
    case 2: return ObservationQuery::view_profile(pick_user());
    case 3: return ObservationQuery::list_friends(pick_user());
    default:
      return ObservationQuery::search_users({.vulnerable = rng.bernoulli(0.5)},
                                            1 + rng.uniform_index(8),
                                            rng.uniform_index(3));
  }
}

}  // namespace

TEST_CASE("friend request base case emits one event visible to the target") {
  WorldState world = small_world();
  const auto outcome =
      apply_action(world, 0, BotClass::Writer, Action::send_friend_request(1), 1);
  CHECK(outcome.applied);
  CHECK(world.pending.count({0, 1}) == 1);
  REQUIRE(world.events.size() == 1);
  const Event& ev = world.events.front();
  CHECK_FALSE(ev.visibility.all);
  CHECK(ev.visibility.ids == std::vector<UserId>{1});
  CHECK(ev.visibility.contains(1));
  CHECK_FALSE(ev.visibility.contains(0));
}

TEST_CASE("read-only bots cannot perform any action") {
  WorldState world = small_world();
  const std::uint64_t before = state_hash(world);
  const auto outcome = apply_action(world, 0, BotClass::ReadOnly,
                                    Action::create_post(0, Visibility::Public), 1);
  CHECK_FALSE(outcome.applied);
  CHECK(outcome.reason == DenyReason::IsolationViolation);
  CHECK(state_hash(world) == before);
}

TEST_CASE("writer and fully isolated bots cannot touch protected users") {
  WorldState world = world_with_protected();
  const std::uint64_t prot_before = partition_hash(world, Partition::Protected);
  for (BotClass cls : {BotClass::Writer, BotClass::FullyIsolated}) {
    const auto outcome =
        apply_action(world, 0, cls, Action::send_message(100, 0), 1);
    CHECK_FALSE(outcome.applied);
    CHECK(outcome.reason == DenyReason::IsolationViolation);
  }
  CHECK(partition_hash(world, Partition::Protected) == prot_before);
}

TEST_CASE("real-user origin bypasses bot isolation but not platform rules") {
  WorldState world = world_with_protected();
  const auto outcome = apply_action(world, 100, BotClass::Writer,
                                    Action::send_message(101, 0), 1,
                                    Origin::RealUser);
  CHECK(outcome.applied);
  CHECK(world.events.back().origin == Origin::RealUser);
}

TEST_CASE("isolation fuzz: fully isolated bots never change the protected slice") {
  WorldState world = world_with_protected();
  Rng rng(7);
  const std::uint64_t prot_before = partition_hash(world, Partition::Protected);
  for (int i = 0; i < 2000; ++i) {
    const UserId actor = static_cast<UserId>(rng.uniform_index(4));
    apply_action(world, actor, BotClass::FullyIsolated, random_action(rng, world),
                 i + 1);
    CHECK(partition_hash(world, Partition::Protected) == prot_before);
  }
}

TEST_CASE("observation purity: world hash identical before and after queries") {
  WorldState world = world_with_protected();
  apply_action(world, 0, BotClass::Writer, Action::send_friend_request(1), 1);
  apply_action(world, 1, BotClass::Writer, Action::accept_friend_request(0), 2);
  apply_action(world, 0, BotClass::Writer, Action::create_post(2, Visibility::Public),
               3);
  apply_action(world, 0, BotClass::Writer, Action::send_message(1, 1), 4);
  Rng rng(42);
  const std::uint64_t before = state_hash(world);
  for (int i = 0; i < 2000; ++i) {
    const UserId actor = static_cast<UserId>(rng.uniform_index(4));
    const auto cls = static_cast<BotClass>(rng.uniform_index(3));
    observe(world, actor, cls, random_query(rng, world));
    CHECK(state_hash(world) == before);
  }
}

TEST_CASE("own profile is always observable") {
  WorldState world = small_world();
  world.users.at(2).profile_visibility = Visibility::OwnerOnly;
  const auto result =
      observe(world, 2, BotClass::Writer, ObservationQuery::view_profile(2));
  CHECK(result.ok);
  CHECK(result.profile->id == 2);
}

TEST_CASE("friends-only post denied to non-friends, allowed to friends") {
  WorldState world = small_world();
  add_friendship(world, 0, 1);
  const auto outcome = apply_action(world, 0, BotClass::Writer,
                                    Action::create_post(1, Visibility::FriendsOnly), 1);
  REQUIRE(outcome.applied);
  const PostId post = *outcome.created;
  CHECK(observe(world, 1, BotClass::Writer, ObservationQuery::view_post(post)).ok);
  const auto denied =
      observe(world, 2, BotClass::Writer, ObservationQuery::view_post(post));
  CHECK_FALSE(denied.ok);
  CHECK(denied.reason == DenyReason::PrivacyDenied);
}

TEST_CASE("get_message happens once and notifies the sender") {
  WorldState world = small_world();
  add_friendship(world, 0, 1);
  const auto sent =
      apply_action(world, 0, BotClass::Writer, Action::send_message(1, 3), 1);
  REQUIRE(sent.applied);
  const MessageId msg = *sent.created;

  const auto fetched = get_message(world, 1, msg, 2);
  CHECK(fetched.applied);
  CHECK(fetched.handle->id == msg);
  const auto& queue = world.notifications.at(0);
  CHECK(queue.back().kind == NotificationKind::MessageRead);

  const auto again = get_message(world, 1, msg, 3);
  CHECK_FALSE(again.applied);
  CHECK(again.reason == DenyReason::AlreadyFetched);

  const auto wrong = get_message(world, 2, msg, 3);
  CHECK_FALSE(wrong.applied);
  CHECK(wrong.reason == DenyReason::NotRecipient);
}

TEST_CASE("read_message is pure and repeatable") {
  WorldState world = small_world();
  add_friendship(world, 0, 1);
  const auto sent =
      apply_action(world, 0, BotClass::Writer, Action::send_message(1, 5), 1);
  const MessageId msg = *sent.created;
  get_message(world, 1, msg, 2);
  const std::uint64_t hash = state_hash(world);
  for (int i = 0; i < 3; ++i) {
    const auto read =
        observe(world, 1, BotClass::Writer, ObservationQuery::read_message({msg}));
    CHECK(read.ok);
    CHECK(*read.message_tag == 5);
    CHECK(state_hash(world) == hash);
  }
}

TEST_CASE("visible_events filters by visibility and sequence") {
  WorldState world = small_world();
  apply_action(world, 0, BotClass::Writer, Action::send_friend_request(1), 1);
  apply_action(world, 2, BotClass::Writer, Action::create_post(0, Visibility::Public),
               2);
  const auto for_user3 = visible_events(world, 3, 0);
  REQUIRE(for_user3.size() == 1);
  CHECK(for_user3.front().action.kind == ActionKind::CreatePost);
  CHECK(visible_events(world, 1, 0).size() == 2);
  CHECK(visible_events(world, 1, 1).size() == 1);
  WorldState empty = small_world();
  CHECK(visible_events(empty, 4, 0).empty());
}

TEST_CASE("brute-force visibility recomputation matches stored sets") {
  WorldState world = small_world(8);
  add_friendship(world, 0, 1);
  add_friendship(world, 1, 2);
  const std::vector<UserId> members = {0, 2, 4};
  add_group(world, members);
  Rng rng(99);
  WorldState initial = world;

  for (int i = 0; i < 200 && world.events.size() < 50; ++i) {
    const UserId actor = static_cast<UserId>(rng.uniform_index(8));
    apply_action(world, actor, BotClass::Writer, random_action(rng, world), i + 1);
  }
  REQUIRE(world.events.size() >= 20);

  WorldState replay = initial;
  for (const Event& ev : world.events) {
    bool expect_all = false;
    const std::set<UserId> expected =
        test_oracles::expected_visibility(replay, ev, expect_all);
    CHECK(ev.visibility.all == expect_all);
    if (!expect_all) {
      const std::set<UserId> stored(ev.visibility.ids.begin(), ev.visibility.ids.end());
      CHECK(stored == expected);
    }
    REQUIRE(apply_action(replay, ev.actor, BotClass::Writer, ev.action, ev.vtime,
                         ev.origin)
                .applied);
  }
}

TEST_CASE("event-sourcing round trip reproduces the final hash") {
  WorldState world = world_with_protected();
  WorldState initial = world;
  Rng rng(1234);
  for (int i = 0; i < 400; ++i) {
    const UserId actor = static_cast<UserId>(rng.uniform_index(4));
    apply_action(world, actor, BotClass::Writer, random_action(rng, world), i + 1);
    if (rng.bernoulli(0.1)) {
      apply_action(world, 100, BotClass::Writer, Action::send_message(101, 0), i + 1,
                   Origin::RealUser);
    }
  }
  const WorldState replayed = replay_log(initial, world.events);
  CHECK(state_hash(replayed) == state_hash(world));
  CHECK(partition_hash(replayed, Partition::Protected) ==
        partition_hash(world, Partition::Protected));
}

TEST_CASE("privacy monotonicity: tightening a policy never widens results") {
  Rng rng(5);
  for (int round = 0; round < 20; ++round) {
    WorldState world = small_world(8);
    for (int i = 0; i < 10; ++i) {
      const UserId a = static_cast<UserId>(rng.uniform_index(8));
      const UserId b = static_cast<UserId>(rng.uniform_index(8));
      if (a != b && !world.are_friends(a, b)) {
        add_friendship(world, a, b);
      }
    }
    const UserId subject = static_cast<UserId>(rng.uniform_index(8));
    const UserId actor = static_cast<UserId>(rng.uniform_index(8));
    const auto query = ObservationQuery::search_users({}, 8);

    auto results_with = [&](Visibility vis) {
      world.users.at(subject).profile_visibility = vis;
      const auto result = observe(world, actor, BotClass::Writer, query);
      return std::set<UserId>(result.users.begin(), result.users.end());
    };
    const auto pub = results_with(Visibility::Public);
    const auto friends = results_with(Visibility::FriendsOnly);
    const auto owner = results_with(Visibility::OwnerOnly);
    CHECK(std::includes(pub.begin(), pub.end(), friends.begin(), friends.end()));
    CHECK(std::includes(friends.begin(), friends.end(), owner.begin(), owner.end()));
  }
}

TEST_CASE("search respects hop limits against a BFS oracle") {
  WorldState world = small_world(10);
  add_friendship(world, 0, 1);
  add_friendship(world, 1, 2);
  add_friendship(world, 2, 3);
  add_friendship(world, 0, 4);
  const auto result = observe(world, 0, BotClass::Writer,
                              ObservationQuery::search_users({}, 10, 1));
  const auto reachable = test_oracles::bfs_reachable(world, 0, 1);
  const std::set<UserId> got(result.users.begin(), result.users.end());
  CHECK(got == reachable);

  const auto two_hops = observe(world, 0, BotClass::Writer,
                                ObservationQuery::search_users({}, 10, 2));
  const auto reachable2 = test_oracles::bfs_reachable(world, 0, 2);
  const std::set<UserId> got2(two_hops.users.begin(), two_hops.users.end());
  CHECK(got2 == reachable2);
}

TEST_CASE("event log lines round-trip byte for byte") {
  WorldState baseline = small_world();
  add_friendship(baseline, 0, 1);
  WorldState world = baseline;
  apply_action(world, 0, BotClass::Writer, Action::send_friend_request(2), 1);
  apply_action(world, 0, BotClass::Writer, Action::create_post(7, Visibility::Public),
               2);
  apply_action(world, 0, BotClass::Writer, Action::send_message(1, 3), 3);
  apply_action(world, 1, BotClass::Writer, Action::get_message(1), 4);
  apply_action(world, 2, BotClass::Writer, Action::accept_friend_request(0), 5);

  const std::string text = log_to_string(world.events);
  const auto parsed = log_from_string(text);
  CHECK(log_to_string(parsed) == text);

  const WorldState replayed = replay_log(baseline, parsed);
  CHECK(state_hash(replayed) == state_hash(world));
}

TEST_CASE("state hash is sensitive to each state section") {
  WorldState a = small_world();
  WorldState b = a;
  CHECK(state_hash(a) == state_hash(b));
  add_friendship(b, 0, 1);
  CHECK(state_hash(a) != state_hash(b));
  WorldState c = a;
  c.users.at(0).vulnerable = true;
  CHECK(state_hash(a) != state_hash(c));
}

TEST_CASE("duplicate and self-targeted requests are rejected as values") {
  WorldState world = small_world();
  CHECK(apply_action(world, 0, BotClass::Writer, Action::send_friend_request(0), 1)
            .reason == DenyReason::InvalidTarget);
  CHECK(apply_action(world, 0, BotClass::Writer, Action::send_friend_request(1), 1)
            .applied);
  CHECK(apply_action(world, 0, BotClass::Writer, Action::send_friend_request(1), 2)
            .reason == DenyReason::Duplicate);
  CHECK(apply_action(world, 1, BotClass::Writer, Action::send_friend_request(0), 3)
            .reason == DenyReason::Duplicate);
  CHECK(apply_action(world, 0, BotClass::Writer, Action::send_message(9, 0), 4)
            .reason == DenyReason::UnknownEntity);
  CHECK(apply_action(world, 2, BotClass::Writer, Action::send_message(3, 0), 5)
            .reason == DenyReason::PrivacyDenied);
}

TEST_CASE("fully isolated observers see no protected entities") {
  WorldState world = world_with_protected();
  const auto denied = observe(world, 0, BotClass::FullyIsolated,
                              ObservationQuery::view_profile(100));
  CHECK_FALSE(denied.ok);
  CHECK(denied.reason == DenyReason::IsolationViolation);
  const auto allowed =
      observe(world, 0, BotClass::ReadOnly, ObservationQuery::view_profile(100));
  CHECK(allowed.ok);
  const auto search_fi = observe(world, 0, BotClass::FullyIsolated,
                                 ObservationQuery::search_users({}, 32));
  for (UserId u : search_fi.users) {
    CHECK_FALSE(world.is_protected(u));
  }
  const auto search_ro =
      observe(world, 0, BotClass::ReadOnly, ObservationQuery::search_users({}, 32));
  CHECK(std::count_if(search_ro.users.begin(), search_ro.users.end(),
                      [&](UserId u) { return world.is_protected(u); }) == 2);
}
