#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "wes/platform_log.hpp"
#include "wes/rewards.hpp"
#include "wes/runner.hpp"
#include "wes/scenarios.hpp"
#include "wes/training.hpp"

using namespace wes;
using namespace wes::runner;
using platform::ActionKind;
using platform::BotClass;

namespace {

Script one_bot_script(platform::Tick objective_ticks) {
  Script script;
  script.graph.n_users = 4;
  script.graph.model = graphgen::GraphModel::Ring;
  script.graph.ring_neighbors = 2;
  script.graph.seed = 1;
  script.objective = Objective::time(objective_ticks);
  script.max_ticks = objective_ticks + 100;
  script.mechanism = mechanism::identity_params();
  agents::BotSpec bot;
  bot.user = 0;
  bot.bind_existing = true;
  bot.policy = agents::PolicyKind::RuleBased;
  bot.rules = agents::RuleSet::Normal;
  bot.role = agents::Role::Normal;
  bot.repertoire = {static_cast<int>(ActionKind::SendMessage),
                    static_cast<int>(ActionKind::CreatePost)};
  script.roster.push_back(bot);
  return script;
}

}  // namespace

TEST_CASE("steps objective zero finalizes immediately with no events") {
  Script script = one_bot_script(100);
  script.objective = Objective::steps(0);
  const EpisodeResult result = run_script(script, 7);
  CHECK(result.objective_reached);
  CHECK(result.steps == 0);
  CHECK(result.ticks_elapsed == 0);
  CHECK(result.final_world->events.empty());
}

TEST_CASE("time objective: one unit-cost bot elapses exactly the objective") {
  Script script = one_bot_script(10);
  const EpisodeResult result = run_script(script, 7);
  CHECK(result.objective_reached);
  CHECK(result.ticks_elapsed == 10);
  CHECK(result.steps <= 10);
  for (const auto& ev : result.final_world->events) {
    CHECK(ev.vtime <= 10);
  }
}

TEST_CASE("time zero objective is already reached at start") {
  Script script = one_bot_script(10);
  script.objective = Objective::time(0);
  const EpisodeResult result = run_script(script, 7);
  CHECK(result.objective_reached);
  CHECK(result.ticks_elapsed == 0);
  CHECK(result.steps == 0);
}

TEST_CASE("unreachable objectives stop at max_ticks with the flag down") {
  Script script = one_bot_script(10);
  script.objective = Objective::results("scam_contacts", 5);
  script.max_ticks = 40;
  const EpisodeResult result = run_script(script, 7);
  CHECK_FALSE(result.objective_reached);
  CHECK(result.ticks_elapsed == 40);
  // objective-reached XOR max_ticks hit
  const bool hit_cap = result.ticks_elapsed == script.max_ticks;
  CHECK(result.objective_reached != hit_cap);
}

TEST_CASE("same script and seed produce byte-identical event logs") {
  const std::vector<Script> scripts = {
      scenarios::scam_scenario(60, 4, 5, 21, 60),
      scenarios::messenger_scenario(30, 8, 22, 80),
      scenarios::privacy_scenario(20, 3, 23, 60),
  };
  for (const Script& script : scripts) {
    const EpisodeResult a = run_script(script, 99);
    const EpisodeResult b = run_script(script, 99);
    CHECK(platform::log_to_string(a.final_world->events) ==
          platform::log_to_string(b.final_world->events));
    CHECK(a.final_world_hash == b.final_world_hash);
    const EpisodeResult c = run_script(script, 100);
    CHECK(platform::log_to_string(a.final_world->events) !=
          platform::log_to_string(c.final_world->events));
  }
}

TEST_CASE("scheduling interleaves by cost with id tie-break") {
  // Two bots with uniform action costs 2 and 3; expected turn ticks follow a
  // brute-force priority-queue simulation.
  Script script;
  script.graph.n_users = 2;
  script.graph.model = graphgen::GraphModel::Ring;
  script.graph.ring_neighbors = 0;
  script.graph.seed = 1;
  script.objective = Objective::time(12);
  script.max_ticks = 50;
  for (platform::UserId id : {0u, 1u}) {
    agents::BotSpec bot;
    bot.user = id;
    bot.bind_existing = true;
    bot.policy = agents::PolicyKind::RuleBased;
    bot.rules = agents::RuleSet::Normal;
    bot.role = agents::Role::Normal;
    bot.repertoire = {static_cast<int>(ActionKind::CreatePost)};
    mechanism::MechanismParams params = mechanism::identity_params();
    for (int ord = 0; ord < platform::kActionKindCount; ++ord) {
      params.action_cost[ord] = id == 0 ? 2 : 3;
    }
    bot.mechanism_override = params;
    script.roster.push_back(bot);
  }
  const EpisodeResult result = run_script(script, 3);

  // Brute-force discrete-event simulation of (ready tick, id) scheduling,
  // including the loop-head objective check.
  std::vector<platform::Tick> expected_ticks;
  platform::Tick ready[2] = {2, 3};
  const platform::Tick costs[2] = {2, 3};
  platform::Tick now = 0;
  while (now < 12) {
    const int next = (ready[0] < ready[1] || (ready[0] == ready[1])) ? 0 : 1;
    if (ready[next] > script.max_ticks) {
      break;
    }
    now = ready[next];
    expected_ticks.push_back(now);
    ready[next] += costs[next];
  }
  std::vector<platform::Tick> got;
  for (const auto& ev : result.final_world->events) {
    got.push_back(ev.vtime);
  }
  // Every bot turn creates a post (always concretizable), so event vtimes are
  // exactly the turn ticks.
  CHECK(got == expected_ticks);
  REQUIRE(got.size() >= 5);
  CHECK(got[0] == 2);
  CHECK(got[1] == 3);
  CHECK(got[2] == 4);
  CHECK(got[3] == 6);
  CHECK(got[4] == 6);
  // The tick-6 tie goes to the lower user id first.
  CHECK(result.final_world->events[3].actor == 0);
  CHECK(result.final_world->events[4].actor == 1);
}

TEST_CASE("event vtimes are non-decreasing in log order") {
  const Script script = scenarios::scam_scenario(60, 4, 5, 5, 80);
  const EpisodeResult result = run_script(script, 11);
  platform::Tick last = 0;
  for (const auto& ev : result.final_world->events) {
    CHECK(ev.vtime >= last);
    last = ev.vtime;
  }
}

TEST_CASE("monitor rejects non-monotone ticks per metric") {
  Monitor monitor;
  monitor.record_metric("messages_sent", 5, 1.0);
  CHECK_THROWS_AS(monitor.record_metric("messages_sent", 4, 2.0), NonMonotoneTick);
  CHECK_NOTHROW(monitor.record_metric("messages_sent", 5, 2.0));
  CHECK_NOTHROW(monitor.record_metric("requests_sent", 1, 1.0));
}

TEST_CASE("empty episodes produce empty metric series") {
  Script script = one_bot_script(10);
  script.objective = Objective::steps(0);
  const EpisodeResult result = run_script(script, 7);
  for (const auto& [id, series] : result.monitor->series()) {
    CHECK(series.empty());
  }
}

TEST_CASE("metrics are recomputable from the event log") {
  const Script script = scenarios::scam_scenario(80, 5, 6, 31, 100);
  const EpisodeResult result = run_script(script, 17);
  const auto& events = result.final_world->events;
  CHECK(result.metric_finals.at("messages_sent") ==
        doctest::Approx(static_cast<double>(
            test_oracles::count_events(events, ActionKind::SendMessage))));
  CHECK(result.metric_finals.at("requests_sent") ==
        doctest::Approx(static_cast<double>(
            test_oracles::count_events(events, ActionKind::SendFriendRequest))));
  CHECK(result.metric_finals.at("posts_created") ==
        doctest::Approx(static_cast<double>(
            test_oracles::count_events(events, ActionKind::CreatePost))));
  CHECK(result.metric_finals.at("messages_fetched") ==
        doctest::Approx(static_cast<double>(
            test_oracles::count_events(events, ActionKind::GetMessage))));
  // scam_contacts recount: first message to each distinct vulnerable target.
  const platform::UserId scammer = scenarios::scam_scenario_scammer(script);
  std::set<platform::UserId> contacted;
  double expected_contacts = 0;
  for (const auto& ev : events) {
    if (ev.actor == scammer && ev.action.kind == ActionKind::SendMessage &&
        result.initial_world->users.at(ev.action.peer).vulnerable &&
        contacted.insert(ev.action.peer).second) {
      expected_contacts += 1;
    }
  }
  CHECK(result.metric_finals.at("scam_contacts") == doctest::Approx(expected_contacts));
  // actions_denied recount from the audit log.
  CHECK(result.metric_finals.at("actions_denied") ==
        doctest::Approx(static_cast<double>(result.monitor->audits().size())));
}

TEST_CASE("executor reward accounting matches the pure trace recomputation") {
  const Script script = scenarios::scam_scenario(80, 5, 6, 31, 100);
  const platform::UserId scammer = scenarios::scam_scenario_scammer(script);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const EpisodeResult result = run_script(script, seed);
    const EpisodeTrace trace = result.trace();
    CHECK(result.rewards.at(scammer) ==
          doctest::Approx(agents::scammer_reward(trace, scammer)).epsilon(1e-9));
    for (const auto& [user, utility] : result.utilities) {
      CHECK(utility ==
            doctest::Approx(agents::normal_user_utility(trace, user)).epsilon(1e-12));
    }
  }
}

TEST_CASE("privacy and data rewards recompute from the trace") {
  const Script privacy = scenarios::privacy_scenario(20, 3, 5, 300);
  const platform::UserId breaker = scenarios::privacy_scenario_breaker(privacy);
  const EpisodeResult result = run_script(privacy, 9);
  CHECK(result.rewards.at(breaker) ==
        doctest::Approx(agents::privacy_violation_reward(result.trace(), breaker)));
  // Correct platform: zero violations.
  CHECK(result.rewards.at(breaker) == doctest::Approx(0.0));

  const Script data = scenarios::data_acquisition_scenario(15, 6, 120);
  const EpisodeResult data_result = run_script(data, 3);
  const platform::UserId acquirer = 15;
  CHECK(data_result.rewards.at(acquirer) ==
        doctest::Approx(
            agents::data_acquisition_reward(data_result.trace(), acquirer)));
  // 0-edge world with owner-only profiles: only the acquirer's own profile.
  CHECK(data_result.rewards.at(acquirer) == doctest::Approx(1.0));
}

TEST_CASE("identity mechanism episodes equal mechanism-free episodes byte for byte") {
  Script with_identity = scenarios::messenger_scenario(25, 8, 3, 60);
  Script without = with_identity;
  without.mechanism.reset();
  const EpisodeResult a = run_script(with_identity, 5);
  const EpisodeResult b = run_script(without, 5);
  CHECK(platform::log_to_string(a.final_world->events) ==
        platform::log_to_string(b.final_world->events));
  CHECK(a.final_world_hash == b.final_world_hash);
}

TEST_CASE("runner episodes replay from their event logs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Script script = scenarios::scam_scenario(60, 4, 4, 13, 60);
    script.protected_users = 6;
    for (auto& bot : script.roster) {
      if (!bot.bind_existing) {
        bot.user += script.protected_users;  // keep clear of the replay range
      }
    }
    const EpisodeResult result = run_script(script, seed);
    const platform::WorldState replayed =
        platform::replay_log(*result.initial_world, result.final_world->events);
    CHECK(platform::state_hash(replayed) == result.final_world_hash);
  }
}

TEST_CASE("protected partition changes only through real-user events") {
  Script script = scenarios::scam_scenario(50, 3, 4, 13, 80);
  script.protected_users = 8;
  for (auto& bot : script.roster) {
    if (!bot.bind_existing) {
      bot.user += script.protected_users;
    }
  }
  const EpisodeResult result = run_script(script, 21);
  // Step through the log: the protected slice may move only at real-user
  // events.
  platform::WorldState world = *result.initial_world;
  std::uint64_t prot = platform::partition_hash(world, platform::Partition::Protected);
  int real_user_changes = 0;
  for (const auto& ev : result.final_world->events) {
    REQUIRE(platform::apply_action(world, ev.actor, BotClass::Writer, ev.action,
                                   ev.vtime, ev.origin)
                .applied);
    const std::uint64_t after =
        platform::partition_hash(world, platform::Partition::Protected);
    if (after != prot) {
      CHECK(ev.origin == platform::Origin::RealUser);
      ++real_user_changes;
    }
    prot = after;
  }
  CHECK(real_user_changes > 0);
  CHECK(prot ==
        platform::partition_hash(*result.final_world, platform::Partition::Protected));
}

TEST_CASE("normal bots keep full utility under the identity mechanism") {
  const Script script = scenarios::messenger_scenario(25, 8, 3, 60);
  const EpisodeResult result = run_script(script, 2);
  REQUIRE_FALSE(result.utilities.empty());
  for (const auto& [_, utility] : result.utilities) {
    CHECK(utility == doctest::Approx(1.0));
  }
}

TEST_CASE("batch runs are identical across worker counts") {
  Script script = scenarios::messenger_scenario(25, 8, 3, 60);
  script.keep_artifacts = false;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 12; ++i) {
    seeds.push_back(split_seed(4, "batch", i));
  }
  const auto serial = run_batch(script, seeds, 1);
  const auto parallel = run_batch(script, seeds, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].final_world_hash == parallel[i].final_world_hash);
    CHECK(serial[i].metric_finals == parallel[i].metric_finals);
    CHECK(serial[i].rewards == parallel[i].rewards);
  }
}

TEST_CASE("notification loss suppresses fetches and replies") {
  Script healthy = scenarios::messenger_scenario(30, 10, 6, 150);
  Script faulty = healthy;
  faulty.faults.notification_loss_p = 1.0;
  const EpisodeResult a = run_script(healthy, 8);
  const EpisodeResult b = run_script(faulty, 8);
  CHECK(b.metric_finals.at("messages_fetched") == doctest::Approx(0.0));
  CHECK(a.metric_finals.at("messages_fetched") > 0.0);
}

TEST_CASE("train_policy returns one reward per episode and learns the funnel") {
  const Script scenario = scenarios::scam_scenario(60, 4, 3, 17, 40);
  const platform::UserId scammer = scenarios::scam_scenario_scammer(scenario);
  TrainConfig config;
  config.episodes = 40;
  const TrainResult result = train_policy(scenario, scammer, config, 5);
  CHECK(result.episode_rewards.size() == 40);

  TrainConfig none;
  none.episodes = 0;
  const TrainResult empty = train_policy(scenario, scammer, none, 5);
  CHECK(empty.episode_rewards.empty());
  CHECK(empty.policy == agents::QTable{});
}

TEST_CASE("accept rule fires before the routine fallback") {
  // Two isolated users: bot 0 can only request (one possible target, so its
  // first action is deterministic); bot 1 runs the normal rule set and must
  // answer the pending request before doing anything routine.
  Script script;
  script.graph.n_users = 2;
  script.graph.model = graphgen::GraphModel::ErdosRenyi;
  script.graph.er_edge_prob = 0.0;
  script.graph.seed = 1;
  script.objective = Objective::time(6);
  script.max_ticks = 20;
  script.mechanism = mechanism::identity_params();

  agents::BotSpec requester;
  requester.user = 0;
  requester.bind_existing = true;
  requester.policy = agents::PolicyKind::Random;
  requester.role = agents::Role::None;
  requester.repertoire = {static_cast<int>(ActionKind::SendFriendRequest)};
  script.roster.push_back(requester);

  agents::BotSpec responder;
  responder.user = 1;
  responder.bind_existing = true;
  responder.policy = agents::PolicyKind::RuleBased;
  responder.rules = agents::RuleSet::Normal;
  responder.role = agents::Role::Normal;
  responder.repertoire = {static_cast<int>(ActionKind::AcceptFriendRequest),
                          static_cast<int>(ActionKind::SendMessage),
                          static_cast<int>(ActionKind::CreatePost)};
  script.roster.push_back(responder);

  const EpisodeResult result = run_script(script, 5);
  const auto& events = result.final_world->events;
  REQUIRE(events.size() >= 2);
  CHECK(events[0].actor == 0);
  CHECK(events[0].action.kind == ActionKind::SendFriendRequest);
  // Bot 1's first applied action answers the request, not a post.
  for (const auto& ev : events) {
    if (ev.actor == 1) {
      CHECK(ev.action.kind == ActionKind::AcceptFriendRequest);
      break;
    }
  }
  CHECK(result.final_world->are_friends(0, 1));
}

TEST_CASE("out-of-bounds mechanism parameters are rejected at validation") {
  Script script = one_bot_script(10);
  mechanism::MechanismParams bad = mechanism::identity_params();
  bad.rate[0].window = mechanism::kMaxRateWindow + 1;
  script.mechanism = bad;
  CHECK_THROWS_AS(validate(script), ScriptInvalid);

  Script bot_level = one_bot_script(10);
  mechanism::MechanismParams too_costly = mechanism::identity_params();
  too_costly.action_cost[2] = mechanism::kMaxActionCost + 5;
  bot_level.roster[0].mechanism_override = too_costly;
  CHECK_THROWS_AS(validate(bot_level), ScriptInvalid);
}

TEST_CASE("script validation rejects bad rosters") {
  Script script = one_bot_script(10);
  script.roster[0].user = 99;
  script.roster[0].bind_existing = true;  // out of generated range
  CHECK_THROWS_AS(validate(script), ScriptInvalid);

  Script dup = one_bot_script(10);
  dup.roster.push_back(dup.roster[0]);
  CHECK_THROWS_AS(validate(dup), ScriptInvalid);

  Script protected_overlap = one_bot_script(10);
  protected_overlap.protected_users = 4;
  protected_overlap.roster[0].user = 5;  // inside the replay range 4..7
  protected_overlap.roster[0].bind_existing = false;
  CHECK_THROWS_AS(validate(protected_overlap), ScriptInvalid);

  Script bad_predicate = one_bot_script(10);
  bad_predicate.objective = Objective::results("unknown_metric", 1);
  CHECK_THROWS_AS(validate(bad_predicate), UnknownPredicate);
}
