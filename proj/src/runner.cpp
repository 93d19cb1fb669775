#include "wes/runner.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <tuple>

#include "wes/parallel.hpp"
#include "wes/rewards.hpp"

namespace wes::runner {

using agents::BotSpec;
using agents::PolicyKind;
using agents::Role;
using agents::RuleSet;
using mechanism::MechanismDecision;
using mechanism::MechanismParams;
using platform::Action;
using platform::ActionKind;
using platform::ActionOutcome;
using platform::BotClass;
using platform::MessageId;
using platform::NotificationKind;
using platform::ObservationQuery;
using platform::ObservationResult;
using platform::Origin;
using platform::PostId;
using platform::QueryKind;
using platform::Tick;
using platform::WorldState;

EpisodeTrace EpisodeResult::trace() const {
  EpisodeTrace t;
  t.initial_world = initial_world.get();
  if (final_world) {
    t.events = final_world->events;
  }
  if (monitor) {
    t.audits = monitor->audits();
    t.observations = monitor->observations();
  }
  return t;
}

namespace {

struct BotRuntime {
  BotSpec spec;
  bool is_replay = false;
  Rng rng{0};
  agents::QTable qtable;
  double epsilon = 0.0;
  bool train = false;
  bool has_mechanism = false;
  MechanismParams params;

  // Bot-local memory, fed by notifications and observation results.
  std::map<UserId, bool> known;  // user -> believed vulnerable
  std::set<UserId> contacted;    // recipients of applied messages
  std::set<UserId> requested;    // friend requests sent
  std::deque<MessageId> unfetched;
  std::map<MessageId, UserId> msg_sender;
  std::deque<std::pair<UserId, MessageId>> reply_ready;
  std::set<PostId> known_posts;
  std::size_t notif_watermark = 0;

  Tick next_ready = 1;
  double reward_total = 0.0;
  std::uint64_t routine_attempts = 0;
  std::uint64_t routine_allowed = 0;

  bool has_prev = false;
  int prev_state = 0;
  int prev_action = 0;
  double prev_reward = 0.0;

  std::uint32_t replay_cursor = 0;
  UserId probe_cursor = 0;
};

class EpisodeExecutor {
 public:
  EpisodeExecutor(const Script& script, std::uint64_t seed, const PolicySlots* slots)
      : script_(script), seed_(seed), slots_(slots), fault_rng_(split_seed(seed, "fault")) {}

  EpisodeResult run();

 private:
  void setup();
  bool objective_reached(Tick now) const;
  std::size_t next_bot(Tick& tick) const;
  void take_turn(BotRuntime& bot, Tick now);
  void replay_turn(BotRuntime& bot, Tick now);
  void consume_notifications(BotRuntime& bot);
  void observation_phase(BotRuntime& bot, Tick now);
  void run_observation(BotRuntime& bot, const ObservationQuery& query, Tick now);
  agents::FeatureInputs feature_inputs(const BotRuntime& bot, Tick now) const;
  std::optional<Action> concretize(BotRuntime& bot, int ordinal);
  std::optional<Action> rules_pick(BotRuntime& bot);
  void execute_action(BotRuntime& bot, const Action& action, Tick now,
                      double& step_reward, std::uint32_t& cost);
  void note_applied_metrics(const BotRuntime& bot, const Action& action,
                            const ActionOutcome& outcome, Tick now);
  std::vector<UserId> pending_in(UserId user) const;
  std::vector<UserId> friends_of(UserId user) const;

  const Script& script_;
  std::uint64_t seed_;
  const PolicySlots* slots_;

  WorldState world_;
  std::shared_ptr<WorldState> initial_world_;
  Monitor monitor_{};
  mechanism::RateLedger ledger_;
  Rng fault_rng_;
  std::vector<BotRuntime> bots_;
  std::uint64_t steps_ = 0;
  const platform::FaultConfig* faults_ = nullptr;
  std::set<std::tuple<UserId, char, std::uint64_t>> acquired_;
};

void EpisodeExecutor::setup() {
  graphgen::GraphSpec graph = script_.graph;
  if (script_.world_per_episode) {
    graph.seed = split_seed(seed_, "graph");
  }
  world_ = graphgen::generate(graph);
  faults_ = &script_.faults;
  monitor_ = Monitor(script_.metrics);

  // Protected replay population: a ring of real-user stand-ins.
  const UserId prot_lo = protected_base(script_);
  for (std::uint32_t i = 0; i < script_.protected_users; ++i) {
    platform::UserProfile profile;
    profile.id = prot_lo + i;
    profile.partition = platform::Partition::Protected;
    platform::add_user(world_, profile);
  }
  if (script_.protected_users >= 2) {
    for (std::uint32_t i = 0; i < script_.protected_users; ++i) {
      const UserId a = prot_lo + i;
      const UserId b = prot_lo + (i + 1) % script_.protected_users;
      if (a != b && !world_.are_friends(a, b)) {
        platform::add_friendship(world_, a, b);
      }
    }
  }

  for (const BotSpec& spec : script_.roster) {
    if (spec.bind_existing) {
      if (spec.vulnerable_override.has_value()) {
        world_.users.at(spec.user).vulnerable = *spec.vulnerable_override;
      }
    } else {
      platform::UserProfile profile;
      profile.id = spec.user;
      profile.partition = platform::Partition::Synthetic;
      profile.vulnerable = spec.vulnerable_override.value_or(false);
      profile.profile_visibility = script_.graph.profile_visibility;
      platform::add_user(world_, profile);
    }
  }

  initial_world_ = std::make_shared<WorldState>(world_);

  for (const BotSpec& spec : script_.roster) {
    BotRuntime bot;
    bot.spec = spec;
    bot.rng = Rng(split_seed(seed_, "bot", spec.user));
    bot.epsilon = spec.rl.epsilon;
    bot.train = spec.train;
    if (spec.mechanism_override.has_value()) {
      bot.has_mechanism = true;
      bot.params = *spec.mechanism_override;
    } else if (script_.mechanism.has_value()) {
      bot.has_mechanism = true;
      bot.params = *script_.mechanism;
    }
    if (spec.policy == PolicyKind::Rl) {
      if (spec.snapshot_path.has_value()) {
        std::ifstream in(*spec.snapshot_path);
        if (!in) {
          throw ScriptInvalid("cannot open policy snapshot: " + *spec.snapshot_path);
        }
        bot.qtable = agents::QTable::load(in);
      }
      if (slots_ != nullptr) {
        auto it = slots_->find(spec.user);
        if (it != slots_->end()) {
          const PolicySlot& slot = it->second;
          if (slot.initial != nullptr) {
            bot.qtable = *slot.initial;
          }
          if (slot.epsilon.has_value()) {
            bot.epsilon = *slot.epsilon;
          }
          if (slot.train.has_value()) {
            bot.train = *slot.train;
          }
        }
      }
    }
    // A bot first wakes after one full action cost (its cheapest action).
    std::uint32_t min_cost = 1;
    if (bot.has_mechanism && !spec.repertoire.empty()) {
      min_cost = std::numeric_limits<std::uint32_t>::max();
      for (int ord : spec.repertoire) {
        min_cost = std::min(min_cost, bot.params.action_cost[ord]);
      }
      min_cost = std::max<std::uint32_t>(min_cost, 1);
    }
    bot.next_ready = min_cost;
    bots_.push_back(std::move(bot));
  }

  // Replay agents drive the protected users, origin = real user.
  for (std::uint32_t i = 0; i < script_.protected_users; ++i) {
    BotRuntime bot;
    bot.spec.user = prot_lo + i;
    bot.spec.bot_class = BotClass::Writer;
    bot.spec.role = Role::None;
    bot.is_replay = true;
    bot.rng = Rng(split_seed(seed_, "bot", bot.spec.user));
    bot.next_ready = std::max<Tick>(1, script_.protected_message_interval);
    bots_.push_back(std::move(bot));
  }
}

bool EpisodeExecutor::objective_reached(Tick now) const {
  const Objective& obj = script_.objective;
  switch (obj.kind) {
    case ObjectiveKind::Time:
      return now >= obj.value;
    case ObjectiveKind::Steps:
      return steps_ >= obj.value;
    case ObjectiveKind::Episodes:
      return false;  // orchestrator-level objective
    case ObjectiveKind::Results:
      return monitor_.counter(obj.predicate) >= static_cast<double>(obj.value);
  }
  return false;
}

// Bot with the minimal next-ready tick, ties broken by ascending user id.
std::size_t EpisodeExecutor::next_bot(Tick& tick) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < bots_.size(); ++i) {
    const BotRuntime& a = bots_[i];
    const BotRuntime& b = bots_[best];
    if (a.next_ready < b.next_ready ||
        (a.next_ready == b.next_ready && a.spec.user < b.spec.user)) {
      best = i;
    }
  }
  tick = bots_[best].next_ready;
  return best;
}

std::vector<UserId> EpisodeExecutor::pending_in(UserId user) const {
  std::vector<UserId> from;
  for (const auto& [f, t] : world_.pending) {
    if (t == user) {
      from.push_back(f);
    }
  }
  std::sort(from.begin(), from.end());
  return from;
}

std::vector<UserId> EpisodeExecutor::friends_of(UserId user) const {
  auto it = world_.adjacency.find(user);
  if (it == world_.adjacency.end()) {
    return {};
  }
  return {it->second.begin(), it->second.end()};
}

void EpisodeExecutor::consume_notifications(BotRuntime& bot) {
  auto it = world_.notifications.find(bot.spec.user);
  if (it == world_.notifications.end()) {
    return;
  }
  const auto& queue = it->second;
  for (; bot.notif_watermark < queue.size(); ++bot.notif_watermark) {
    const platform::Notification& n = queue[bot.notif_watermark];
    if (faults_->notification_loss_p > 0.0 &&
        fault_rng_.bernoulli(faults_->notification_loss_p)) {
      continue;  // delivery-layer loss; the state itself is intact
    }
    switch (n.kind) {
      case NotificationKind::NewMessage:
        bot.unfetched.push_back(n.entity);
        bot.msg_sender[n.entity] = n.from;
        bot.known.try_emplace(n.from, false);
        break;
      case NotificationKind::Share:
        bot.known_posts.insert(n.entity);
        bot.known.try_emplace(n.from, false);
        break;
      case NotificationKind::FriendRequest:
      case NotificationKind::RequestAccepted:
      case NotificationKind::MessageRead:
        bot.known.try_emplace(n.from, false);
        break;
    }
  }
}

void EpisodeExecutor::run_observation(BotRuntime& bot, const ObservationQuery& query,
                                      Tick now) {
  ObservationQuery effective = query;
  if (bot.has_mechanism) {
    const MechanismDecision decision =
        mechanism::mediate_observation(bot.params, bot.spec.user, query);
    if (decision.kind == mechanism::DecisionKind::Transform) {
      effective = decision.transformed;
    }
  }
  const ObservationResult result =
      platform::observe(world_, bot.spec.user, bot.spec.bot_class, effective, faults_);

  ObservationRecord record;
  record.tick = now;
  record.actor = bot.spec.user;
  record.kind = effective.kind;
  record.ok = result.ok;
  record.reason = result.reason;
  record.query_user = effective.user;
  record.query_post = effective.post;
  record.query_message = effective.message;
  if (result.ok) {
    switch (effective.kind) {
      case QueryKind::SearchUsers:
      case QueryKind::ListFriends:
        record.returned_users = result.users;
        break;
      case QueryKind::ViewPost:
        record.post_author = result.post->author;
        record.post_visibility = result.post->visibility;
        break;
      default:
        break;
    }
  }

  // Memory updates.
  if (result.ok) {
    switch (effective.kind) {
      case QueryKind::SearchUsers: {
        const bool vulnerable_filter = effective.filter.vulnerable.value_or(false);
        for (UserId u : result.users) {
          if (vulnerable_filter) {
            bot.known[u] = true;
          } else {
            bot.known.try_emplace(u, false);
          }
        }
        break;
      }
      case QueryKind::ListFriends:
        for (UserId u : result.users) {
          bot.known.try_emplace(u, false);
        }
        break;
      case QueryKind::ViewProfile:
        bot.known[effective.user] = result.profile->vulnerable;
        break;
      case QueryKind::ViewPost:
        bot.known_posts.insert(effective.post);
        break;
      case QueryKind::ReadMessage:
        break;
    }
  }

  // Role-specific incremental rewards over observation results.
  if (bot.spec.role == Role::PrivacyBreaker && result.ok) {
    double violations = 0.0;
    if (effective.kind == QueryKind::SearchUsers) {
      for (UserId u : record.returned_users) {
        if (agents::observation_should_be_denied(*initial_world_, record, u)) {
          violations += 1.0;
        }
      }
    } else if (agents::observation_should_be_denied(*initial_world_, record, 0)) {
      violations += 1.0;
    }
    if (violations > 0.0) {
      bot.reward_total += violations;
      monitor_.increment("privacy_violations", now, violations);
    }
  }
  if (bot.spec.role == Role::DataAcquirer && result.ok) {
    // Distinctness is tracked via known sets; recompute incrementally.
    char tag = 0;
    std::uint64_t id = 0;
    switch (effective.kind) {
      case QueryKind::ViewProfile:
      case QueryKind::ListFriends:
        tag = 'u';
        id = effective.user;
        break;
      case QueryKind::ViewPost: tag = 'p'; id = effective.post; break;
      case QueryKind::ReadMessage: tag = 'm'; id = effective.message; break;
      case QueryKind::SearchUsers: break;
    }
    if (tag != 0 && acquired_.insert({bot.spec.user, tag, id}).second) {
      bot.reward_total += 1.0;
      monitor_.increment("data_observed", now, 1.0);
    }
  }

  monitor_.add_observation(std::move(record));
}

void EpisodeExecutor::observation_phase(BotRuntime& bot, Tick now) {
  std::vector<ObservationQuery> queries;
  const UserId max_id = world_.max_user_id();
  switch (bot.spec.role) {
    case Role::Scammer:
      queries.push_back(
          ObservationQuery::search_users({.vulnerable = true}, 10));
      break;
    case Role::PrivacyBreaker: {
      queries.push_back(ObservationQuery::view_profile(
          static_cast<UserId>(bot.rng.uniform_index(max_id + 1))));
      if (world_.next_post_id > 1) {
        queries.push_back(ObservationQuery::view_post(
            1 + bot.rng.uniform_index(world_.next_post_id - 1)));
      }
      queries.push_back(ObservationQuery::list_friends(
          static_cast<UserId>(bot.rng.uniform_index(max_id + 1))));
      break;
    }
    case Role::DataAcquirer: {
      const UserId subject = bot.probe_cursor;
      bot.probe_cursor = static_cast<UserId>((bot.probe_cursor + 1) % (max_id + 1));
      queries.push_back(ObservationQuery::view_profile(subject));
      queries.push_back(ObservationQuery::list_friends(subject));
      if (world_.next_post_id > 1) {
        queries.push_back(ObservationQuery::view_post(
            1 + bot.rng.uniform_index(world_.next_post_id - 1)));
      }
      break;
    }
    default:
      break;
  }
  const std::size_t limit =
      std::min<std::size_t>(queries.size(), script_.observations_per_turn);
  for (std::size_t i = 0; i < limit; ++i) {
    run_observation(bot, queries[i], now);
  }
}

agents::FeatureInputs EpisodeExecutor::feature_inputs(const BotRuntime& bot,
                                                      Tick now) const {
  agents::FeatureInputs inputs;
  const UserId me = bot.spec.user;
  if (bot.spec.role == Role::Scammer) {
    std::uint32_t in_flight = 0;
    for (UserId u : bot.requested) {
      if (!world_.are_friends(me, u)) {
        ++in_flight;
      }
    }
    inputs.pending_requests = in_flight;
    std::uint32_t ready = 0;
    for (const auto& [u, vulnerable] : bot.known) {
      if (vulnerable && world_.are_friends(me, u) && bot.contacted.count(u) == 0) {
        ++ready;
      }
    }
    inputs.visible_vulnerable = ready;
  } else {
    inputs.pending_requests = static_cast<std::uint32_t>(pending_in(me).size());
    std::uint32_t known_vulnerable = 0;
    for (const auto& [u, vulnerable] : bot.known) {
      if (vulnerable && bot.contacted.count(u) == 0) {
        ++known_vulnerable;
      }
    }
    inputs.visible_vulnerable = known_vulnerable;
  }
  if (bot.has_mechanism) {
    const int msg = static_cast<int>(ActionKind::SendMessage);
    const auto& limit = bot.params.rate[msg];
    const std::uint32_t used =
        ledger_.count_in_window(me, msg, now, limit.window);
    inputs.remaining_budget = limit.max > used ? limit.max - used : 0;
  } else {
    inputs.remaining_budget = 3;
  }
  inputs.contacted = static_cast<std::uint32_t>(bot.contacted.size());
  return inputs;
}

std::optional<Action> EpisodeExecutor::concretize(BotRuntime& bot, int ordinal) {
  const UserId me = bot.spec.user;
  const UserId max_id = world_.max_user_id();
  switch (static_cast<ActionKind>(ordinal)) {
    case ActionKind::SendFriendRequest: {
      for (const auto& [u, vulnerable] : bot.known) {
        if (vulnerable && u != me && !world_.are_friends(me, u) &&
            bot.requested.count(u) == 0) {
          return Action::send_friend_request(u);
        }
      }
      for (const auto& [u, _] : bot.known) {
        if (u != me && !world_.are_friends(me, u) && bot.requested.count(u) == 0) {
          return Action::send_friend_request(u);
        }
      }
      // Blind guess over the public id space.
      for (int tries = 0; tries < 4; ++tries) {
        const UserId guess = static_cast<UserId>(bot.rng.uniform_index(max_id + 1));
        if (guess != me && !world_.are_friends(me, guess) &&
            bot.requested.count(guess) == 0) {
          return Action::send_friend_request(guess);
        }
      }
      return std::nullopt;
    }
    case ActionKind::SendMessage: {
      for (const auto& [u, vulnerable] : bot.known) {
        if (vulnerable && world_.are_friends(me, u) && bot.contacted.count(u) == 0) {
          return Action::send_message(u, 0);
        }
      }
      const std::vector<UserId> friends = friends_of(me);
      for (UserId u : friends) {
        if (bot.contacted.count(u) == 0) {
          return Action::send_message(u, 0);
        }
      }
      if (!friends.empty()) {
        return Action::send_message(
            friends[bot.rng.uniform_index(friends.size())], 0);
      }
      return std::nullopt;
    }
    case ActionKind::CreatePost: {
      if (bot.spec.role == Role::Scammer) {
        return Action::create_post(platform::kViolatingTag,
                                   platform::Visibility::Public);
      }
      const auto tag = static_cast<platform::ContentTag>(bot.rng.uniform_index(7));
      const double roll = bot.rng.uniform_real();
      const platform::Visibility vis = roll < 0.5   ? platform::Visibility::Public
                                       : roll < 0.9 ? platform::Visibility::FriendsOnly
                                                    : platform::Visibility::OwnerOnly;
      return Action::create_post(tag, vis);
    }
    case ActionKind::JoinGroup: {
      for (const auto& [g, members] : world_.groups) {
        if (members.count(me) == 0) {
          return Action::join_group(g);
        }
      }
      return std::nullopt;
    }
    case ActionKind::AcceptFriendRequest: {
      const auto incoming = pending_in(me);
      if (!incoming.empty()) {
        return Action::accept_friend_request(incoming.front());
      }
      return std::nullopt;
    }
    case ActionKind::GetMessage: {
      if (!bot.unfetched.empty()) {
        return Action::get_message(bot.unfetched.front());
      }
      return std::nullopt;
    }
    case ActionKind::ShareData: {
      if (bot.known_posts.empty()) {
        return std::nullopt;
      }
      const std::vector<UserId> friends = friends_of(me);
      if (friends.empty()) {
        return std::nullopt;
      }
      return Action::share_data(*bot.known_posts.begin(),
                                friends[bot.rng.uniform_index(friends.size())]);
    }
  }
  return std::nullopt;
}

std::optional<Action> EpisodeExecutor::rules_pick(BotRuntime& bot) {
  const UserId me = bot.spec.user;
  const auto in_rep = [&](ActionKind kind) {
    return std::find(bot.spec.repertoire.begin(), bot.spec.repertoire.end(),
                     static_cast<int>(kind)) != bot.spec.repertoire.end();
  };
  if (in_rep(ActionKind::AcceptFriendRequest)) {
    const auto incoming = pending_in(me);
    if (!incoming.empty()) {
      return Action::accept_friend_request(incoming.front());
    }
  }
  if (in_rep(ActionKind::GetMessage) && !bot.unfetched.empty()) {
    return Action::get_message(bot.unfetched.front());
  }
  if (!bot.reply_ready.empty()) {
    const auto [sender, msg] = bot.reply_ready.front();
    bot.reply_ready.pop_front();
    if (in_rep(ActionKind::SendMessage) &&
        bot.rng.bernoulli(bot.spec.reply_probability)) {
      return Action::send_message(sender, 0);
    }
    if (bot.spec.rules == RuleSet::Target) {
      return std::nullopt;  // target bots idle when not replying
    }
  }
  if (bot.spec.rules == RuleSet::Target) {
    return std::nullopt;
  }

  // Normal routine: mostly messages to friends, some posts, the occasional
  // friend request toward a friend-of-friend, joins and shares. Branches the
  // repertoire does not cover fall back to posting, then to idling.
  const auto post_or_idle = [&]() -> std::optional<Action> {
    if (in_rep(ActionKind::CreatePost)) {
      return concretize(bot, static_cast<int>(ActionKind::CreatePost));
    }
    return std::nullopt;
  };
  const double roll = bot.rng.uniform_real();
  const std::vector<UserId> friends = friends_of(me);
  if (roll < 0.55) {
    if (in_rep(ActionKind::SendMessage) && !friends.empty()) {
      const UserId to = friends[bot.rng.uniform_index(friends.size())];
      return Action::send_message(to, static_cast<platform::ContentTag>(
                                          bot.rng.uniform_index(7)));
    }
    return post_or_idle();
  }
  if (roll < 0.75) {
    return post_or_idle();
  }
  if (roll < 0.87) {
    // Triadic closure: request a random friend-of-a-friend.
    if (in_rep(ActionKind::SendFriendRequest) && !friends.empty()) {
      const UserId via = friends[bot.rng.uniform_index(friends.size())];
      for (UserId candidate : friends_of(via)) {
        if (candidate != me && !world_.are_friends(me, candidate) &&
            world_.pending.count({me, candidate}) == 0 &&
            world_.pending.count({candidate, me}) == 0) {
          return Action::send_friend_request(candidate);
        }
      }
    }
    return post_or_idle();
  }
  if (roll < 0.94) {
    if (in_rep(ActionKind::JoinGroup)) {
      auto join = concretize(bot, static_cast<int>(ActionKind::JoinGroup));
      if (join.has_value()) {
        return join;
      }
    }
    return post_or_idle();
  }
  if (in_rep(ActionKind::ShareData)) {
    auto share = concretize(bot, static_cast<int>(ActionKind::ShareData));
    if (share.has_value()) {
      return share;
    }
  }
  return post_or_idle();
}

void EpisodeExecutor::note_applied_metrics(const BotRuntime& bot, const Action& action,
                                           const ActionOutcome& outcome, Tick now) {
  switch (action.kind) {
    case ActionKind::SendMessage:
      monitor_.increment("messages_sent", now);
      break;
    case ActionKind::SendFriendRequest:
      monitor_.increment("requests_sent", now);
      break;
    case ActionKind::AcceptFriendRequest:
      monitor_.increment("requests_accepted", now);
      break;
    case ActionKind::CreatePost:
      monitor_.increment("posts_created", now);
      break;
    case ActionKind::JoinGroup:
      monitor_.increment("groups_joined", now);
      break;
    case ActionKind::ShareData:
      monitor_.increment("shares_sent", now);
      break;
    case ActionKind::GetMessage:
      monitor_.increment("messages_fetched", now);
      break;
  }
  (void)bot;
  (void)outcome;
}

void EpisodeExecutor::execute_action(BotRuntime& bot, const Action& action, Tick now,
                                     double& step_reward, std::uint32_t& cost) {
  const UserId me = bot.spec.user;
  const bool routine =
      bot.spec.role == Role::Normal && agents::routine_action(action.ordinal());
  cost = 1;

  if (bot.has_mechanism && !bot.is_replay) {
    const MechanismDecision decision =
        mechanism::mediate_action(bot.params, ledger_, me, action, now);
    if (decision.kind == mechanism::DecisionKind::Deny) {
      monitor_.add_audit({now, me, action.ordinal(), decision.reason, true});
      monitor_.increment("actions_denied", now);
      if (bot.spec.role == Role::Scammer) {
        step_reward -= script_.denial_penalty;
      }
      if (routine) {
        bot.routine_attempts += 1;
      }
      return;
    }
    cost = std::max<std::uint32_t>(decision.cost, 1);
  }

  const ActionOutcome outcome =
      platform::apply_action(world_, me, bot.spec.bot_class, action, now,
                             bot.is_replay ? Origin::RealUser : Origin::Bot, faults_,
                             &fault_rng_);
  if (outcome.applied) {
    note_applied_metrics(bot, action, outcome, now);
    if (routine) {
      bot.routine_attempts += 1;
      bot.routine_allowed += 1;
    }
    switch (action.kind) {
      case ActionKind::SendFriendRequest:
        bot.requested.insert(action.peer);
        break;
      case ActionKind::SendMessage: {
        const bool fresh = bot.contacted.insert(action.peer).second;
        if (bot.spec.role == Role::Scammer && fresh &&
            world_.users.at(action.peer).vulnerable) {
          step_reward += 1.0;
          monitor_.increment("scam_contacts", now);
        }
        break;
      }
      case ActionKind::GetMessage: {
        if (!bot.unfetched.empty() && bot.unfetched.front() == action.message) {
          bot.unfetched.pop_front();
        }
        auto it = bot.msg_sender.find(action.message);
        if (it != bot.msg_sender.end()) {
          bot.reply_ready.push_back({it->second, action.message});
        }
        break;
      }
      default:
        break;
    }
  } else {
    monitor_.add_audit({now, me, action.ordinal(), outcome.reason, false});
    monitor_.increment("actions_denied", now);
    if (routine) {
      // The mechanism allowed it; the platform (or a fault) rejected it.
      bot.routine_attempts += 1;
      bot.routine_allowed += 1;
    }
    if (action.kind == ActionKind::GetMessage &&
        outcome.reason == platform::DenyReason::AlreadyFetched &&
        !bot.unfetched.empty() && bot.unfetched.front() == action.message) {
      bot.unfetched.pop_front();
    }
  }
}

void EpisodeExecutor::replay_turn(BotRuntime& bot, Tick now) {
  const std::vector<UserId> friends = friends_of(bot.spec.user);
  if (!friends.empty()) {
    const UserId to = friends[bot.replay_cursor % friends.size()];
    bot.replay_cursor += 1;
    double unused_reward = 0.0;
    std::uint32_t unused_cost = 1;
    execute_action(bot, Action::send_message(to, 0), now, unused_reward, unused_cost);
  }
  bot.next_ready = now + std::max<Tick>(1, script_.protected_message_interval);
}

void EpisodeExecutor::take_turn(BotRuntime& bot, Tick now) {
  if (bot.is_replay) {
    replay_turn(bot, now);
    return;
  }
  consume_notifications(bot);
  observation_phase(bot, now);

  std::optional<Action> action;
  int chosen_ordinal = -1;
  agents::StateFeatures features{};
  const bool rl = bot.spec.policy == PolicyKind::Rl;

  if (bot.spec.bot_class == BotClass::ReadOnly || bot.spec.repertoire.empty()) {
    // Observation-only turn.
  } else if (bot.spec.policy == PolicyKind::RuleBased) {
    action = rules_pick(bot);
  } else {
    features = agents::featurize(feature_inputs(bot, now));
    chosen_ordinal = agents::select_action_ordinal(
        bot.spec.policy, rl ? &bot.qtable : nullptr, bot.epsilon, features,
        bot.spec.repertoire, bot.rng);
    action = concretize(bot, chosen_ordinal);
  }

  double step_reward = 0.0;
  std::uint32_t cost = 1;
  if (action.has_value()) {
    steps_ += 1;
    execute_action(bot, *action, now, step_reward, cost);
  }

  if (rl && chosen_ordinal >= 0) {
    if (bot.train && bot.has_prev) {
      if (bot.spec.rl.rule == agents::UpdateRule::Sarsa) {
        bot.qtable.update_sarsa(bot.prev_state, bot.prev_action, bot.prev_reward,
                                features.index(), chosen_ordinal, bot.spec.rl.alpha,
                                bot.spec.rl.gamma);
      } else {
        bot.qtable.update_qlearning(bot.prev_state, bot.prev_action, bot.prev_reward,
                                    features.index(), bot.spec.repertoire,
                                    bot.spec.rl.alpha, bot.spec.rl.gamma);
      }
    }
    bot.has_prev = true;
    bot.prev_state = features.index();
    bot.prev_action = chosen_ordinal;
    bot.prev_reward = step_reward;
  }

  bot.reward_total += step_reward;
  bot.next_ready = now + std::max<std::uint32_t>(cost, 1);
}

EpisodeResult EpisodeExecutor::run() {
  setup();

  Tick now = 0;
  bool reached = objective_reached(now);
  while (!reached && !bots_.empty()) {
    Tick tick = 0;
    const std::size_t idx = next_bot(tick);
    if (tick > script_.max_ticks) {
      now = script_.max_ticks;
      break;
    }
    now = tick;
    take_turn(bots_[idx], now);
    reached = objective_reached(now);
  }

  // Finalize: flush terminal RL transitions, assemble the result.
  for (BotRuntime& bot : bots_) {
    if (bot.spec.policy == PolicyKind::Rl && bot.train && bot.has_prev) {
      bot.qtable.update_terminal(bot.prev_state, bot.prev_action, bot.prev_reward,
                                 bot.spec.rl.alpha);
    }
    if (slots_ != nullptr) {
      auto it = slots_->find(bot.spec.user);
      if (it != slots_->end() && it->second.out != nullptr) {
        *it->second.out = bot.qtable;
      }
    }
  }

  EpisodeResult result;
  result.seed = seed_;
  result.final_world_hash = platform::state_hash(world_);
  result.ticks_elapsed = now;
  result.objective_reached = reached;
  result.steps = steps_;
  for (const BotRuntime& bot : bots_) {
    if (bot.is_replay) {
      continue;
    }
    result.rewards[bot.spec.user] = bot.reward_total;
    if (bot.spec.role == Role::Normal) {
      result.utilities[bot.spec.user] =
          bot.routine_attempts == 0
              ? 1.0
              : static_cast<double>(bot.routine_allowed) /
                    static_cast<double>(bot.routine_attempts);
    }
  }
  for (const std::string& id : kBuiltinMetrics) {
    result.metric_finals[id] = monitor_.counter(id);
  }
  if (script_.keep_artifacts) {
    result.initial_world = initial_world_;
    result.final_world = std::make_shared<WorldState>(std::move(world_));
    result.monitor = std::make_shared<Monitor>(std::move(monitor_));
  }
  return result;
}

}  // namespace

EpisodeResult run_script(const Script& script, std::uint64_t seed) {
  return run_script(script, seed, PolicySlots{});
}

EpisodeResult run_script(const Script& script, std::uint64_t seed,
                         const PolicySlots& slots) {
  validate(script);
  EpisodeExecutor executor(script, seed, &slots);
  return executor.run();
}

std::vector<EpisodeResult> run_batch(const Script& script,
                                     std::span<const std::uint64_t> seeds,
                                     int workers) {
  validate(script);
  std::vector<EpisodeResult> results(seeds.size());
  parallel::for_each_index(seeds.size(), workers, [&](std::size_t i) {
    EpisodeExecutor executor(script, seeds[i], nullptr);
    results[i] = executor.run();
  });
  return results;
}

}  // namespace wes::runner
