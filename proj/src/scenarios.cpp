#include "wes/scenarios.hpp"

#include <algorithm>
#include <stdexcept>

namespace wes::scenarios {

using agents::BotSpec;
using agents::PolicyKind;
using agents::Role;
using agents::RuleSet;
using platform::ActionKind;
using platform::BotClass;
using runner::Objective;
using runner::Script;

namespace {

std::vector<int> all_ordinals() {
  std::vector<int> r;
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    r.push_back(i);
  }
  return r;
}

std::vector<int> routine_ordinals() {
  return {
      static_cast<int>(ActionKind::SendFriendRequest),
      static_cast<int>(ActionKind::AcceptFriendRequest),
      static_cast<int>(ActionKind::CreatePost),
      static_cast<int>(ActionKind::SendMessage),
      static_cast<int>(ActionKind::GetMessage),
      static_cast<int>(ActionKind::JoinGroup),
      static_cast<int>(ActionKind::ShareData),
  };
}

BotSpec target_bot(platform::UserId user) {
  BotSpec bot;
  bot.user = user;
  bot.bind_existing = true;
  bot.vulnerable_override = true;
  bot.bot_class = BotClass::Writer;
  bot.policy = PolicyKind::RuleBased;
  bot.rules = RuleSet::Target;
  bot.role = Role::Target;
  bot.repertoire = {static_cast<int>(ActionKind::AcceptFriendRequest),
                    static_cast<int>(ActionKind::GetMessage),
                    static_cast<int>(ActionKind::SendMessage)};
  bot.reply_probability = 0.5;
  return bot;
}

BotSpec normal_bot(platform::UserId user, bool bind) {
  BotSpec bot;
  bot.user = user;
  bot.bind_existing = bind;
  bot.bot_class = BotClass::Writer;
  bot.policy = PolicyKind::RuleBased;
  bot.rules = RuleSet::Normal;
  bot.role = Role::Normal;
  bot.repertoire = routine_ordinals();
  return bot;
}

}  // namespace

Script scam_scenario(std::uint32_t n_users, std::uint32_t targets,
                     std::uint32_t normals, std::uint64_t graph_seed,
                     platform::Tick episode_ticks) {
  if (targets + normals >= n_users) {
    throw std::invalid_argument("scam_scenario: too many bound bots for the graph");
  }
  Script script;
  script.graph.n_users = n_users;
  script.graph.model = graphgen::GraphModel::PreferentialAttachment;
  script.graph.pa_edges_per_arrival = 3;
  script.graph.vulnerable_prob = 0.0;  // targets are marked explicitly
  script.graph.groups = {2, 0.1};
  script.graph.seed = graph_seed;
  script.objective = Objective::time(episode_ticks);
  script.max_ticks = episode_ticks + 50;
  script.observations_per_turn = 2;
  script.mechanism = mechanism::identity_params();

  // Targets bound to spread-out generated users.
  for (std::uint32_t i = 0; i < targets; ++i) {
    const platform::UserId user = 3 + i * (n_users - 4) / std::max(1u, targets);
    script.roster.push_back(target_bot(user));
  }
  // Normal users bound between the targets.
  for (std::uint32_t i = 0; i < normals; ++i) {
    platform::UserId user = 1 + i * (n_users - 2) / std::max(1u, normals);
    while (std::any_of(script.roster.begin(), script.roster.end(),
                       [&](const BotSpec& b) { return b.user == user; })) {
      user += 1;
    }
    script.roster.push_back(normal_bot(user, true));
  }

  BotSpec scammer;
  scammer.user = n_users;  // first fresh test-user id (no protected range)
  scammer.bot_class = BotClass::Writer;
  scammer.policy = PolicyKind::Rl;
  scammer.role = Role::Scammer;
  scammer.repertoire = all_ordinals();
  scammer.rl = {0.2, 0.9, 0.1, agents::UpdateRule::Sarsa};
  script.roster.push_back(scammer);
  return script;
}

platform::UserId scam_scenario_scammer(const Script& script) {
  for (const BotSpec& bot : script.roster) {
    if (bot.role == Role::Scammer) {
      return bot.user;
    }
  }
  throw std::invalid_argument("no scammer in roster");
}

Script messenger_scenario(std::uint32_t n_users, std::uint32_t bots,
                          std::uint64_t graph_seed, platform::Tick episode_ticks) {
  if (bots > n_users) {
    throw std::invalid_argument("messenger_scenario: more bots than users");
  }
  Script script;
  script.graph.n_users = n_users;
  script.graph.model = graphgen::GraphModel::ErdosRenyi;
  script.graph.er_edge_prob = 0.15;
  script.graph.groups = {2, 0.2};
  script.graph.seed = graph_seed;
  script.world_per_episode = true;
  script.objective = Objective::time(episode_ticks);
  script.max_ticks = episode_ticks + 50;
  script.observations_per_turn = 1;
  script.mechanism = mechanism::identity_params();
  for (std::uint32_t i = 0; i < bots; ++i) {
    script.roster.push_back(normal_bot(i * (n_users / std::max(1u, bots)), true));
  }
  return script;
}

Script privacy_scenario(std::uint32_t n_users, std::uint32_t posters,
                        std::uint64_t graph_seed, platform::Tick episode_ticks) {
  if (posters >= n_users) {
    throw std::invalid_argument("privacy_scenario: too many posters");
  }
  Script script;
  script.graph.n_users = n_users;
  script.graph.model = graphgen::GraphModel::ErdosRenyi;
  script.graph.er_edge_prob = 0.2;
  script.graph.seed = graph_seed;
  script.objective = Objective::time(episode_ticks);
  script.max_ticks = episode_ticks + 50;
  script.observations_per_turn = 3;
  script.mechanism = mechanism::identity_params();

  // Posters only create posts, so the social graph stays static and the
  // policy checker is exact.
  for (std::uint32_t i = 0; i < posters; ++i) {
    BotSpec poster = normal_bot(i, true);
    poster.repertoire = {static_cast<int>(ActionKind::CreatePost)};
    script.roster.push_back(poster);
  }

  BotSpec breaker;
  breaker.user = n_users;
  breaker.bot_class = BotClass::ReadOnly;
  breaker.policy = PolicyKind::RuleBased;
  breaker.rules = RuleSet::Normal;  // unused; read-only bots never act
  breaker.role = Role::PrivacyBreaker;
  script.roster.push_back(breaker);
  return script;
}

platform::UserId privacy_scenario_breaker(const Script& script) {
  for (const BotSpec& bot : script.roster) {
    if (bot.role == Role::PrivacyBreaker) {
      return bot.user;
    }
  }
  throw std::invalid_argument("no privacy breaker in roster");
}

Script data_acquisition_scenario(std::uint32_t n_users, std::uint64_t graph_seed,
                                 platform::Tick episode_ticks) {
  Script script;
  script.graph.n_users = n_users;
  script.graph.model = graphgen::GraphModel::ErdosRenyi;
  script.graph.er_edge_prob = 0.0;
  script.graph.profile_visibility = platform::Visibility::OwnerOnly;
  script.graph.seed = graph_seed;
  script.objective = Objective::time(episode_ticks);
  script.max_ticks = episode_ticks + 50;
  script.observations_per_turn = 3;

  agents::BotSpec acquirer;
  acquirer.user = n_users;
  acquirer.bot_class = BotClass::ReadOnly;
  acquirer.policy = PolicyKind::RuleBased;
  acquirer.role = Role::DataAcquirer;
  script.roster.push_back(acquirer);
  return script;
}

}  // namespace wes::scenarios
