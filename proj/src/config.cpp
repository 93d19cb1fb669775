#include "wes/config.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace wes::config {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_text(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
}

// Strict field policy: every object spells out its allowed keys.
void expect_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown field '" + key + "' in " + where);
    }
  }
}

template <typename T>
T require(const ordered_json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError("missing field '" + key + "' in " + where);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "' in " + where + " has the wrong type");
  }
}

template <typename T>
T optional_field(const ordered_json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    return fallback;
  }
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type");
  }
}

void check_schema_version(const ordered_json& doc) {
  const int version = require<int>(doc, "schema_version", "document");
  if (version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version));
  }
}

// --- graph ---------------------------------------------------------------------

graphgen::GraphSpec parse_graph(const ordered_json& j) {
  expect_keys(j,
              {"n_users", "model", "vulnerable_prob", "bad_actor_count", "groups",
               "profile_visibility", "seed"},
              "graph");
  graphgen::GraphSpec spec;
  spec.n_users = require<std::uint32_t>(j, "n_users", "graph");
  const ordered_json& model = j.contains("model") ? j.at("model") : ordered_json{};
  if (!model.is_object()) {
    throw ConfigError("graph.model must be an object");
  }
  const std::string kind = require<std::string>(model, "kind", "graph.model");
  if (kind == "preferential_attachment") {
    expect_keys(model, {"kind", "m"}, "graph.model");
    spec.model = graphgen::GraphModel::PreferentialAttachment;
    spec.pa_edges_per_arrival = require<std::uint32_t>(model, "m", "graph.model");
  } else if (kind == "erdos_renyi") {
    expect_keys(model, {"kind", "p"}, "graph.model");
    spec.model = graphgen::GraphModel::ErdosRenyi;
    spec.er_edge_prob = require<double>(model, "p", "graph.model");
  } else if (kind == "ring") {
    expect_keys(model, {"kind", "k"}, "graph.model");
    spec.model = graphgen::GraphModel::Ring;
    spec.ring_neighbors = require<std::uint32_t>(model, "k", "graph.model");
  } else {
    throw ConfigError("unknown graph model kind: " + kind);
  }
  spec.vulnerable_prob = optional_field<double>(j, "vulnerable_prob", 0.0);
  spec.bad_actor_count = optional_field<std::uint32_t>(j, "bad_actor_count", 0);
  if (j.contains("groups")) {
    const ordered_json& groups = j.at("groups");
    expect_keys(groups, {"count", "membership_prob"}, "graph.groups");
    spec.groups.count = require<std::uint32_t>(groups, "count", "graph.groups");
    spec.groups.membership_prob =
        require<double>(groups, "membership_prob", "graph.groups");
  }
  if (j.contains("profile_visibility")) {
    const auto vis = platform::visibility_from_string(
        require<std::string>(j, "profile_visibility", "graph"));
    if (!vis.has_value()) {
      throw ConfigError("bad graph.profile_visibility");
    }
    spec.profile_visibility = *vis;
  }
  spec.seed = optional_field<std::uint64_t>(j, "seed", 0);
  return spec;
}

// --- mechanism -------------------------------------------------------------------

mechanism::MechanismParams parse_mechanism_params(const ordered_json& j,
                                                  const std::string& where) {
  expect_keys(j, {"rate", "mask", "cost", "search_result_cap", "visibility_hops"},
              where);
  mechanism::MechanismParams params = mechanism::identity_params();
  if (j.contains("rate")) {
    const auto& rate = j.at("rate");
    if (!rate.is_array() || rate.size() != platform::kActionKindCount) {
      throw ConfigError(where + ".rate must list one entry per action ordinal");
    }
    for (int i = 0; i < platform::kActionKindCount; ++i) {
      expect_keys(rate.at(i), {"window", "max"}, where + ".rate[]");
      params.rate[i].window =
          require<std::uint32_t>(rate.at(i), "window", where + ".rate[]");
      params.rate[i].max = require<std::uint32_t>(rate.at(i), "max", where + ".rate[]");
    }
  }
  if (j.contains("mask")) {
    const auto mask = require<std::vector<bool>>(j, "mask", where);
    if (mask.size() != platform::kActionKindCount) {
      throw ConfigError(where + ".mask must list one flag per action ordinal");
    }
    for (int i = 0; i < platform::kActionKindCount; ++i) {
      params.action_mask[i] = mask[i];
    }
  }
  if (j.contains("cost")) {
    const auto cost = require<std::vector<std::uint32_t>>(j, "cost", where);
    if (cost.size() != platform::kActionKindCount) {
      throw ConfigError(where + ".cost must list one entry per action ordinal");
    }
    for (int i = 0; i < platform::kActionKindCount; ++i) {
      params.action_cost[i] = cost[i];
    }
  }
  params.search_result_cap = optional_field<std::uint32_t>(j, "search_result_cap",
                                                           mechanism::kMaxSearchCap);
  params.visibility_hops = optional_field<std::uint32_t>(j, "visibility_hops",
                                                         mechanism::kMaxVisibilityHops);
  try {
    mechanism::validate(params);
  } catch (const mechanism::OutOfBounds& ex) {
    throw ConfigError(where + ": " + ex.what());
  }
  return params;
}

std::optional<mechanism::MechanismParams> parse_mechanism_choice(
    const ordered_json& j, const std::string& where) {
  expect_keys(j, {"kind", "params", "genes"}, where);
  const std::string kind = require<std::string>(j, "kind", where);
  if (kind == "none") {
    return std::nullopt;
  }
  if (kind == "identity") {
    return mechanism::identity_params();
  }
  if (kind == "params") {
    if (!j.contains("params")) {
      throw ConfigError(where + ": kind 'params' needs a params object");
    }
    return parse_mechanism_params(j.at("params"), where + ".params");
  }
  if (kind == "genome") {
    const auto genes = require<std::vector<double>>(j, "genes", where);
    try {
      return mechanism::decode(genes);
    } catch (const mechanism::OutOfBounds& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  }
  throw ConfigError(where + ": unknown mechanism kind " + kind);
}

// --- roster ---------------------------------------------------------------------

agents::BotSpec parse_bot(const ordered_json& j) {
  expect_keys(j,
              {"user", "bind_existing", "vulnerable", "class", "policy", "rules",
               "role", "repertoire", "rl", "train", "reply_probability", "mechanism",
               "snapshot"},
              "roster[]");
  agents::BotSpec bot;
  bot.user = require<platform::UserId>(j, "user", "roster[]");
  bot.bind_existing = optional_field<bool>(j, "bind_existing", false);
  if (j.contains("vulnerable") && !j.at("vulnerable").is_null()) {
    bot.vulnerable_override = j.at("vulnerable").get<bool>();
  }

  const std::string cls = optional_field<std::string>(j, "class", "writer");
  if (cls == "read_only") {
    bot.bot_class = platform::BotClass::ReadOnly;
  } else if (cls == "writer") {
    bot.bot_class = platform::BotClass::Writer;
  } else if (cls == "fully_isolated") {
    bot.bot_class = platform::BotClass::FullyIsolated;
  } else {
    throw ConfigError("unknown bot class: " + cls);
  }

  const std::string policy = optional_field<std::string>(j, "policy", "rule_based");
  if (policy == "random") {
    bot.policy = agents::PolicyKind::Random;
  } else if (policy == "rule_based") {
    bot.policy = agents::PolicyKind::RuleBased;
  } else if (policy == "rl") {
    bot.policy = agents::PolicyKind::Rl;
  } else {
    throw ConfigError("unknown policy kind: " + policy);
  }

  const std::string rules = optional_field<std::string>(j, "rules", "normal");
  if (rules == "target") {
    bot.rules = agents::RuleSet::Target;
  } else if (rules == "normal") {
    bot.rules = agents::RuleSet::Normal;
  } else {
    throw ConfigError("unknown rule set: " + rules);
  }

  const auto role = agents::role_from_string(
      optional_field<std::string>(j, "role", "none"));
  if (!role.has_value()) {
    throw ConfigError("unknown role");
  }
  bot.role = *role;

  if (j.contains("repertoire")) {
    for (const auto& entry : j.at("repertoire")) {
      const auto kind = platform::action_kind_from_string(entry.get<std::string>());
      if (!kind.has_value()) {
        throw ConfigError("unknown repertoire action");
      }
      bot.repertoire.push_back(static_cast<int>(*kind));
    }
  }

  if (j.contains("rl")) {
    const ordered_json& rl = j.at("rl");
    expect_keys(rl, {"alpha", "gamma", "epsilon", "rule"}, "roster[].rl");
    bot.rl.alpha = optional_field<double>(rl, "alpha", bot.rl.alpha);
    bot.rl.gamma = optional_field<double>(rl, "gamma", bot.rl.gamma);
    bot.rl.epsilon = optional_field<double>(rl, "epsilon", bot.rl.epsilon);
    const std::string rule = optional_field<std::string>(rl, "rule", "sarsa");
    if (rule == "sarsa") {
      bot.rl.rule = agents::UpdateRule::Sarsa;
    } else if (rule == "qlearning") {
      bot.rl.rule = agents::UpdateRule::QLearning;
    } else {
      throw ConfigError("unknown rl update rule: " + rule);
    }
  }
  bot.train = optional_field<bool>(j, "train", false);
  bot.reply_probability = optional_field<double>(j, "reply_probability", 0.5);
  if (j.contains("mechanism") && !j.at("mechanism").is_null()) {
    bot.mechanism_override = parse_mechanism_choice(j.at("mechanism"),
                                                    "roster[].mechanism");
  }
  if (j.contains("snapshot") && !j.at("snapshot").is_null()) {
    bot.snapshot_path = j.at("snapshot").get<std::string>();
  }
  return bot;
}

runner::Objective parse_objective(const ordered_json& j) {
  expect_keys(j, {"kind", "ticks", "count", "predicate", "threshold"}, "objective");
  const std::string kind = require<std::string>(j, "kind", "objective");
  if (kind == "time") {
    return runner::Objective::time(require<std::uint64_t>(j, "ticks", "objective"));
  }
  if (kind == "steps") {
    return runner::Objective::steps(require<std::uint64_t>(j, "count", "objective"));
  }
  if (kind == "episodes") {
    return runner::Objective::episodes(require<std::uint64_t>(j, "count", "objective"));
  }
  if (kind == "results") {
    return runner::Objective::results(
        require<std::string>(j, "predicate", "objective"),
        require<std::uint64_t>(j, "threshold", "objective"));
  }
  throw ConfigError("unknown objective kind: " + kind);
}

runner::Script parse_script_json(const ordered_json& j) {
  expect_keys(j,
              {"graph", "protected_users", "protected_message_interval", "roster",
               "mechanism", "objective", "metrics", "max_ticks", "seed",
               "observations_per_turn", "world_per_episode", "fault",
               "denial_penalty"},
              "script");
  runner::Script script;
  if (!j.contains("graph")) {
    throw ConfigError("script needs a graph");
  }
  script.graph = parse_graph(j.at("graph"));
  script.protected_users = optional_field<std::uint32_t>(j, "protected_users", 0);
  script.protected_message_interval =
      optional_field<std::uint32_t>(j, "protected_message_interval", 4);
  if (j.contains("roster")) {
    for (const auto& entry : j.at("roster")) {
      script.roster.push_back(parse_bot(entry));
    }
  }
  if (j.contains("mechanism") && !j.at("mechanism").is_null()) {
    script.mechanism = parse_mechanism_choice(j.at("mechanism"), "script.mechanism");
  }
  if (!j.contains("objective")) {
    throw ConfigError("script needs an objective");
  }
  script.objective = parse_objective(j.at("objective"));
  script.metrics = optional_field<std::vector<std::string>>(j, "metrics", {});
  script.max_ticks = optional_field<std::uint64_t>(j, "max_ticks", 1000);
  script.master_seed = optional_field<std::uint64_t>(j, "seed", 0);
  script.observations_per_turn =
      optional_field<std::uint32_t>(j, "observations_per_turn", 3);
  script.world_per_episode = optional_field<bool>(j, "world_per_episode", false);
  if (j.contains("fault") && !j.at("fault").is_null()) {
    try {
      script.faults = socialtest::inject_fault(j.at("fault").get<std::string>());
    } catch (const socialtest::UnknownFault& ex) {
      throw ConfigError(ex.what());
    }
  }
  script.denial_penalty = optional_field<double>(j, "denial_penalty",
                                                 agents::kDefaultDenialPenalty);
  try {
    runner::validate(script);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("invalid script: ") + ex.what());
  }
  return script;
}

socialtest::ArmSpec parse_arm(const ordered_json& j, const std::string& where) {
  expect_keys(j, {"label", "mechanism", "fault"}, where);
  socialtest::ArmSpec arm;
  arm.label = optional_field<std::string>(j, "label", "");
  if (j.contains("mechanism") && !j.at("mechanism").is_null()) {
    arm.mechanism = parse_mechanism_choice(j.at("mechanism"), where + ".mechanism");
  }
  if (j.contains("fault") && !j.at("fault").is_null()) {
    const std::string id = j.at("fault").get<std::string>();
    if (id != "none") {
      try {
        arm.fault = socialtest::inject_fault(id);
      } catch (const socialtest::UnknownFault& ex) {
        throw ConfigError(ex.what());
      }
    }
  }
  return arm;
}

socialtest::OracleSpec parse_oracle(const ordered_json& j) {
  expect_keys(j, {"metric", "aggregation", "direction", "theta", "alpha"},
              "oracles[]");
  socialtest::OracleSpec spec;
  spec.metric = require<std::string>(j, "metric", "oracles[]");
  const std::string agg =
      optional_field<std::string>(j, "aggregation", "final_cumulative");
  if (agg == "final_cumulative") {
    spec.aggregation = socialtest::Aggregation::FinalCumulative;
  } else if (agg == "per_tick_mean") {
    spec.aggregation = socialtest::Aggregation::PerTickMean;
  } else {
    throw ConfigError("unknown aggregation: " + agg);
  }
  const std::string dir = optional_field<std::string>(j, "direction", "drop");
  if (dir == "drop") {
    spec.direction = socialtest::Direction::Drop;
  } else if (dir == "rise") {
    spec.direction = socialtest::Direction::Rise;
  } else {
    throw ConfigError("unknown direction: " + dir);
  }
  spec.theta = require<double>(j, "theta", "oracles[]");
  spec.alpha = require<double>(j, "alpha", "oracles[]");
  try {
    socialtest::validate(spec);
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  return spec;
}

}  // namespace

GenGraphConfig parse_gen_graph(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc, {"schema_version", "graph"}, "document");
  check_schema_version(doc);
  GenGraphConfig config;
  if (!doc.contains("graph")) {
    throw ConfigError("gen-graph config needs a graph");
  }
  config.graph = parse_graph(doc.at("graph"));
  try {
    graphgen::validate(config.graph);
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  return config;
}

RunConfig parse_run(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc, {"schema_version", "script"}, "document");
  check_schema_version(doc);
  if (!doc.contains("script")) {
    throw ConfigError("run config needs a script");
  }
  return {parse_script_json(doc.at("script"))};
}

TrainFileConfig parse_train(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc,
              {"schema_version", "script", "trainee", "episodes", "epsilon_start",
               "epsilon_decay", "epsilon_min"},
              "document");
  check_schema_version(doc);
  TrainFileConfig config;
  if (!doc.contains("script")) {
    throw ConfigError("train config needs a script");
  }
  config.script = parse_script_json(doc.at("script"));
  config.trainee = require<platform::UserId>(doc, "trainee", "document");
  config.train.episodes = optional_field<std::uint32_t>(doc, "episodes", 500);
  config.train.epsilon_start = optional_field<double>(doc, "epsilon_start", 0.5);
  config.train.epsilon_decay = optional_field<double>(doc, "epsilon_decay", 0.99);
  config.train.epsilon_min = optional_field<double>(doc, "epsilon_min", 0.02);
  return config;
}

OptimizeConfig parse_optimize(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc,
              {"schema_version", "script", "scammer", "generations", "population",
               "seeds_per_eval", "pretrain_episodes", "policy_snapshot", "f2_metric"},
              "document");
  check_schema_version(doc);
  OptimizeConfig config;
  if (!doc.contains("script")) {
    throw ConfigError("optimize config needs a script");
  }
  config.script = parse_script_json(doc.at("script"));
  config.scammer = require<platform::UserId>(doc, "scammer", "document");
  config.generations = optional_field<std::uint32_t>(doc, "generations", 20);
  config.population = optional_field<std::uint32_t>(doc, "population", 16);
  config.seeds_per_eval = optional_field<std::uint32_t>(doc, "seeds_per_eval", 5);
  config.pretrain_episodes = optional_field<std::uint32_t>(doc, "pretrain_episodes", 300);
  if (doc.contains("policy_snapshot") && !doc.at("policy_snapshot").is_null()) {
    config.policy_snapshot = doc.at("policy_snapshot").get<std::string>();
  }
  config.f2_metric = optional_field<std::string>(doc, "f2_metric", "utility_loss");
  if (config.f2_metric != "utility_loss" && !runner::is_builtin_metric(config.f2_metric)) {
    throw ConfigError("unknown f2 metric: " + config.f2_metric);
  }
  return config;
}

CoevolveFileConfig parse_coevolve(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc,
              {"schema_version", "script", "scammer", "rounds", "mech_generations",
               "retrain_episodes", "population", "seeds_per_eval",
               "pretrain_episodes", "policy_snapshot"},
              "document");
  check_schema_version(doc);
  CoevolveFileConfig config;
  if (!doc.contains("script")) {
    throw ConfigError("coevolve config needs a script");
  }
  config.script = parse_script_json(doc.at("script"));
  config.scammer = require<platform::UserId>(doc, "scammer", "document");
  config.coevolution.rounds = optional_field<std::uint32_t>(doc, "rounds", 3);
  config.coevolution.mech_generations =
      optional_field<std::uint32_t>(doc, "mech_generations", 6);
  config.coevolution.retrain_episodes =
      optional_field<std::uint32_t>(doc, "retrain_episodes", 120);
  config.coevolution.population = optional_field<std::uint32_t>(doc, "population", 12);
  config.coevolution.seeds_per_eval =
      optional_field<std::uint32_t>(doc, "seeds_per_eval", 3);
  config.pretrain_episodes = optional_field<std::uint32_t>(doc, "pretrain_episodes", 300);
  if (doc.contains("policy_snapshot") && !doc.at("policy_snapshot").is_null()) {
    config.policy_snapshot = doc.at("policy_snapshot").get<std::string>();
  }
  return config;
}

AbtestConfig parse_abtest(const std::string& text) {
  const ordered_json doc = parse_text(text);
  expect_keys(doc, {"schema_version", "script", "n_seeds", "arm_a", "arm_b", "oracles"},
              "document");
  check_schema_version(doc);
  AbtestConfig config;
  if (!doc.contains("script")) {
    throw ConfigError("abtest config needs a script");
  }
  config.script = parse_script_json(doc.at("script"));
  config.n_seeds = optional_field<std::uint32_t>(doc, "n_seeds", 20);
  if (!doc.contains("arm_a") || !doc.contains("arm_b")) {
    throw ConfigError("abtest config needs arm_a and arm_b");
  }
  config.arm_a = parse_arm(doc.at("arm_a"), "arm_a");
  config.arm_b = parse_arm(doc.at("arm_b"), "arm_b");
  if (doc.contains("oracles")) {
    for (const auto& entry : doc.at("oracles")) {
      config.oracles.push_back(parse_oracle(entry));
    }
  }
  if (config.oracles.empty()) {
    throw ConfigError("abtest config needs at least one oracle");
  }
  return config;
}

// --- serialization ---------------------------------------------------------------

namespace {

ordered_json graph_json(const graphgen::GraphSpec& spec) {
  ordered_json j;
  j["n_users"] = spec.n_users;
  ordered_json model;
  switch (spec.model) {
    case graphgen::GraphModel::PreferentialAttachment:
      model["kind"] = "preferential_attachment";
      model["m"] = spec.pa_edges_per_arrival;
      break;
    case graphgen::GraphModel::ErdosRenyi:
      model["kind"] = "erdos_renyi";
      model["p"] = spec.er_edge_prob;
      break;
    case graphgen::GraphModel::Ring:
      model["kind"] = "ring";
      model["k"] = spec.ring_neighbors;
      break;
  }
  j["model"] = model;
  j["vulnerable_prob"] = spec.vulnerable_prob;
  j["bad_actor_count"] = spec.bad_actor_count;
  j["groups"] = {{"count", spec.groups.count},
                 {"membership_prob", spec.groups.membership_prob}};
  j["profile_visibility"] = platform::to_string(spec.profile_visibility);
  j["seed"] = spec.seed;
  return j;
}

ordered_json mechanism_json(const mechanism::MechanismParams& params) {
  ordered_json j;
  ordered_json rate = ordered_json::array();
  ordered_json mask = ordered_json::array();
  ordered_json cost = ordered_json::array();
  for (int i = 0; i < platform::kActionKindCount; ++i) {
    rate.push_back({{"window", params.rate[i].window}, {"max", params.rate[i].max}});
    mask.push_back(params.action_mask[i]);
    cost.push_back(params.action_cost[i]);
  }
  j["rate"] = rate;
  j["mask"] = mask;
  j["cost"] = cost;
  j["search_result_cap"] = params.search_result_cap;
  j["visibility_hops"] = params.visibility_hops;
  return j;
}

ordered_json bot_json(const agents::BotSpec& bot) {
  ordered_json j;
  j["user"] = bot.user;
  j["bind_existing"] = bot.bind_existing;
  if (bot.vulnerable_override.has_value()) {
    j["vulnerable"] = *bot.vulnerable_override;
  }
  switch (bot.bot_class) {
    case platform::BotClass::ReadOnly: j["class"] = "read_only"; break;
    case platform::BotClass::Writer: j["class"] = "writer"; break;
    case platform::BotClass::FullyIsolated: j["class"] = "fully_isolated"; break;
  }
  switch (bot.policy) {
    case agents::PolicyKind::Random: j["policy"] = "random"; break;
    case agents::PolicyKind::RuleBased: j["policy"] = "rule_based"; break;
    case agents::PolicyKind::Rl: j["policy"] = "rl"; break;
  }
  j["rules"] = bot.rules == agents::RuleSet::Target ? "target" : "normal";
  j["role"] = agents::to_string(bot.role);
  ordered_json repertoire = ordered_json::array();
  for (int ordinal : bot.repertoire) {
    repertoire.push_back(
        platform::to_string(static_cast<platform::ActionKind>(ordinal)));
  }
  j["repertoire"] = repertoire;
  if (bot.policy == agents::PolicyKind::Rl) {
    j["rl"] = {{"alpha", bot.rl.alpha},
               {"gamma", bot.rl.gamma},
               {"epsilon", bot.rl.epsilon},
               {"rule", bot.rl.rule == agents::UpdateRule::Sarsa ? "sarsa"
                                                                 : "qlearning"}};
    j["train"] = bot.train;
  }
  j["reply_probability"] = bot.reply_probability;
  if (bot.mechanism_override.has_value()) {
    j["mechanism"] = {{"kind", "params"},
                      {"params", mechanism_json(*bot.mechanism_override)}};
  }
  if (bot.snapshot_path.has_value()) {
    j["snapshot"] = *bot.snapshot_path;
  }
  return j;
}

ordered_json objective_json(const runner::Objective& objective) {
  ordered_json j;
  switch (objective.kind) {
    case runner::ObjectiveKind::Time:
      j["kind"] = "time";
      j["ticks"] = objective.value;
      break;
    case runner::ObjectiveKind::Steps:
      j["kind"] = "steps";
      j["count"] = objective.value;
      break;
    case runner::ObjectiveKind::Episodes:
      j["kind"] = "episodes";
      j["count"] = objective.value;
      break;
    case runner::ObjectiveKind::Results:
      j["kind"] = "results";
      j["predicate"] = objective.predicate;
      j["threshold"] = objective.value;
      break;
  }
  return j;
}

std::string fault_id(const platform::FaultConfig& fault) {
  char buf[64];
  if (fault.privacy_downgrade) {
    return "privacy-policy-downgrade";
  }
  if (fault.message_drop_p > 0.0) {
    std::snprintf(buf, sizeof(buf), "message-drop(%g)", fault.message_drop_p);
    return buf;
  }
  if (fault.notification_loss_p > 0.0) {
    std::snprintf(buf, sizeof(buf), "notification-loss(%g)", fault.notification_loss_p);
    return buf;
  }
  return "";
}

ordered_json script_json(const runner::Script& script) {
  ordered_json j;
  j["graph"] = graph_json(script.graph);
  j["protected_users"] = script.protected_users;
  j["protected_message_interval"] = script.protected_message_interval;
  ordered_json roster = ordered_json::array();
  for (const auto& bot : script.roster) {
    roster.push_back(bot_json(bot));
  }
  j["roster"] = roster;
  if (script.mechanism.has_value()) {
    if (mechanism::is_identity(*script.mechanism)) {
      j["mechanism"] = {{"kind", "identity"}};
    } else {
      j["mechanism"] = {{"kind", "params"}, {"params", mechanism_json(*script.mechanism)}};
    }
  } else {
    j["mechanism"] = {{"kind", "none"}};
  }
  j["objective"] = objective_json(script.objective);
  j["metrics"] = script.metrics;
  j["max_ticks"] = script.max_ticks;
  j["seed"] = script.master_seed;
  j["observations_per_turn"] = script.observations_per_turn;
  j["world_per_episode"] = script.world_per_episode;
  const std::string fault = fault_id(script.faults);
  if (!fault.empty()) {
    j["fault"] = fault;
  }
  j["denial_penalty"] = script.denial_penalty;
  return j;
}

}  // namespace

std::string script_to_json(const runner::Script& script) {
  return script_json(script).dump(2);
}

std::string graph_to_json(const graphgen::GraphSpec& spec) {
  return graph_json(spec).dump(2);
}

std::string mechanism_to_json(const mechanism::MechanismParams& params) {
  return mechanism_json(params).dump(2);
}

std::string world_to_json(const platform::WorldState& world) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(platform::state_hash(world)));
  j["state_hash"] = hash_hex;
  ordered_json users = ordered_json::array();
  for (const auto& [id, profile] : world.users) {
    users.push_back({{"id", id},
                     {"partition", profile.partition == platform::Partition::Protected
                                       ? "protected"
                                       : "synthetic"},
                     {"vulnerable", profile.vulnerable},
                     {"bad_actor", profile.bad_actor},
                     {"profile_visibility",
                      platform::to_string(profile.profile_visibility)}});
  }
  j["users"] = users;
  ordered_json edges = ordered_json::array();
  for (const auto& [user, neighbors] : world.adjacency) {
    for (platform::UserId n : neighbors) {
      if (user < n) {
        edges.push_back({user, n});
      }
    }
  }
  j["edges"] = edges;
  ordered_json groups = ordered_json::array();
  for (const auto& [id, members] : world.groups) {
    groups.push_back({{"id", id}, {"members", members}});
  }
  j["groups"] = groups;
  const graphgen::DegreeStats stats = graphgen::degree_stats(world);
  j["degree_stats"] = {{"min", stats.min},
                       {"max", stats.max},
                       {"mean", stats.mean},
                       {"histogram", stats.histogram}};
  return j.dump(2);
}

}  // namespace wes::config
