#include "wes/agents.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace wes::agents {

const char* to_string(Role role) {
  switch (role) {
    case Role::Scammer: return "scammer";
    case Role::Normal: return "normal";
    case Role::Target: return "target";
    case Role::PrivacyBreaker: return "privacy_breaker";
    case Role::DataAcquirer: return "data_acquirer";
    case Role::None: return "none";
  }
  return "unknown";
}

std::optional<Role> role_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Role::None); ++i) {
    const auto role = static_cast<Role>(i);
    if (name == to_string(role)) {
      return role;
    }
  }
  return std::nullopt;
}

StateFeatures featurize(const FeatureInputs& inputs) {
  auto bucket = [](std::uint32_t v) {
    return static_cast<std::uint8_t>(std::min<std::uint32_t>(v, kFeatureBuckets - 1));
  };
  StateFeatures f;
  f.bucket[0] = bucket(inputs.pending_requests);
  f.bucket[1] = bucket(inputs.visible_vulnerable);
  f.bucket[2] = bucket(inputs.remaining_budget);
  f.bucket[3] = bucket(inputs.contacted);
  return f;
}

void QTable::update_sarsa(int s, int a, double r, int s2, int a2, double alpha,
                          double gamma) {
  const double target = r + gamma * get(s2, a2);
  values_[slot(s, a)] += alpha * (target - get(s, a));
}

void QTable::update_qlearning(int s, int a, double r, int s2,
                              std::span<const int> repertoire, double alpha,
                              double gamma) {
  const double target = r + gamma * max_value(s2, repertoire);
  values_[slot(s, a)] += alpha * (target - get(s, a));
}

void QTable::update_terminal(int s, int a, double r, double alpha) {
  values_[slot(s, a)] += alpha * (r - get(s, a));
}

int QTable::greedy_action(int state, std::span<const int> repertoire) const {
  if (repertoire.empty()) {
    throw EmptyRepertoire("greedy_action: empty repertoire");
  }
  int best = repertoire.front();
  double best_value = get(state, best);
  for (int a : repertoire) {
    const double v = get(state, a);
    if (v > best_value || (v == best_value && a < best)) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double QTable::max_value(int state, std::span<const int> repertoire) const {
  if (repertoire.empty()) {
    throw EmptyRepertoire("max_value: empty repertoire");
  }
  double best = get(state, repertoire.front());
  for (int a : repertoire) {
    best = std::max(best, get(state, a));
  }
  return best;
}

void QTable::save(std::ostream& out) const {
  out << "wes-policy 1\n";
  out << "states " << kStateCount << " actions " << platform::kActionKindCount << "\n";
  for (int s = 0; s < kStateCount; ++s) {
    for (int a = 0; a < platform::kActionKindCount; ++a) {
      const double v = get(s, a);
      if (v != 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", s, a, v);
        out << buf;
      }
    }
  }
}

QTable QTable::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "wes-policy" || version != 1) {
    throw std::runtime_error("QTable::load: not a wes-policy v1 snapshot");
  }
  std::string key;
  int states = 0, actions = 0;
  in >> key >> states;
  in >> key >> actions;
  if (states != kStateCount || actions != platform::kActionKindCount) {
    throw std::runtime_error("QTable::load: table shape mismatch");
  }
  QTable table;
  int s = 0, a = 0;
  double v = 0.0;
  while (in >> s >> a >> v) {
    if (s < 0 || s >= kStateCount || a < 0 || a >= platform::kActionKindCount) {
      throw std::runtime_error("QTable::load: cell out of range");
    }
    table.set(s, a, v);
  }
  return table;
}

int select_action_ordinal(PolicyKind kind, const QTable* table, double epsilon,
                          const StateFeatures& features,
                          std::span<const int> repertoire, Rng& rng) {
  if (repertoire.empty()) {
    throw EmptyRepertoire("select_action_ordinal: empty repertoire");
  }
  switch (kind) {
    case PolicyKind::Random:
      return repertoire[rng.uniform_index(repertoire.size())];
    case PolicyKind::Rl: {
      if (epsilon > 0.0 && rng.bernoulli(epsilon)) {
        return repertoire[rng.uniform_index(repertoire.size())];
      }
      return table->greedy_action(features.index(), repertoire);
    }
    case PolicyKind::RuleBased:
      // Rule-based bots pick concrete actions directly; the executor never
      // routes them through ordinal selection.
      throw std::logic_error("select_action_ordinal: rule-based policy");
  }
  throw std::logic_error("select_action_ordinal: unknown policy kind");
}

void validate(const BotSpec& spec) {
  if (spec.bot_class == platform::BotClass::ReadOnly) {
    if (!spec.repertoire.empty()) {
      throw std::invalid_argument("read-only bots must have an empty repertoire");
    }
  } else if (spec.repertoire.empty()) {
    throw std::invalid_argument("writer bots must have a non-empty repertoire");
  }
  for (int ordinal : spec.repertoire) {
    if (ordinal < 0 || ordinal >= platform::kActionKindCount) {
      throw std::invalid_argument("repertoire ordinal out of range");
    }
  }
  if (spec.rl.epsilon < 0.0 || spec.rl.epsilon > 1.0) {
    throw std::invalid_argument("epsilon must be in [0,1]");
  }
  if (spec.reply_probability < 0.0 || spec.reply_probability > 1.0) {
    throw std::invalid_argument("reply probability must be in [0,1]");
  }
}

}  // namespace wes::agents
