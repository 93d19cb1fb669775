#include "wes/script.hpp"

#include <set>

namespace wes::runner {

Objective Objective::time(std::uint64_t ticks) {
  return {ObjectiveKind::Time, ticks, {}};
}

Objective Objective::steps(std::uint64_t count) {
  return {ObjectiveKind::Steps, count, {}};
}

Objective Objective::episodes(std::uint64_t count) {
  return {ObjectiveKind::Episodes, count, {}};
}

Objective Objective::results(std::string predicate, std::uint64_t threshold) {
  return {ObjectiveKind::Results, threshold, std::move(predicate)};
}

platform::UserId protected_base(const Script& script) {
  return script.graph.n_users;
}

platform::UserId bot_user_base(const Script& script) {
  return script.graph.n_users + script.protected_users;
}

void validate(const Script& script) {
  try {
    graphgen::validate(script.graph);
  } catch (const graphgen::InvalidSpec& ex) {
    throw ScriptInvalid(std::string("graph: ") + ex.what());
  }
  if (script.max_ticks < 1) {
    throw ScriptInvalid("max_ticks must be >= 1");
  }
  if (script.objective.kind == ObjectiveKind::Results) {
    if (script.objective.value == 0) {
      throw ScriptInvalid("results threshold must be positive");
    }
    if (!is_builtin_metric(script.objective.predicate)) {
      throw UnknownPredicate("unknown results predicate: " + script.objective.predicate);
    }
  }
  for (const std::string& metric : script.metrics) {
    if (!is_builtin_metric(metric)) {
      throw ScriptInvalid("unknown metric id: " + metric);
    }
  }

  if (script.mechanism.has_value()) {
    try {
      mechanism::validate(*script.mechanism);
    } catch (const mechanism::OutOfBounds& ex) {
      throw ScriptInvalid(std::string("mechanism: ") + ex.what());
    }
  }

  const platform::UserId prot_lo = protected_base(script);
  const platform::UserId prot_hi = bot_user_base(script);
  std::set<platform::UserId> roster_ids;
  for (const auto& bot : script.roster) {
    try {
      agents::validate(bot);
      if (bot.mechanism_override.has_value()) {
        mechanism::validate(*bot.mechanism_override);
      }
    } catch (const std::invalid_argument& ex) {
      throw ScriptInvalid(std::string("bot ") + std::to_string(bot.user) + ": " +
                          ex.what());
    } catch (const mechanism::OutOfBounds& ex) {
      throw ScriptInvalid(std::string("bot ") + std::to_string(bot.user) +
                          " mechanism: " + ex.what());
    }
    if (!roster_ids.insert(bot.user).second) {
      throw ScriptInvalid("duplicate roster user id");
    }
    if (bot.user >= prot_lo && bot.user < prot_hi) {
      throw ScriptInvalid("roster user id collides with the protected replay range");
    }
    if (bot.bind_existing) {
      if (bot.user >= script.graph.n_users) {
        throw ScriptInvalid("bind_existing requires a generated graph user id");
      }
    } else if (bot.user < prot_hi) {
      throw ScriptInvalid("fresh bot user ids must follow the replay range");
    }
  }
  if (script.denial_penalty < 0.0) {
    throw ScriptInvalid("denial penalty must be >= 0");
  }
  if (script.faults.message_drop_p < 0.0 || script.faults.message_drop_p > 1.0 ||
      script.faults.notification_loss_p < 0.0 ||
      script.faults.notification_loss_p > 1.0) {
    throw ScriptInvalid("fault probabilities must be in [0,1]");
  }
}

}  // namespace wes::runner
