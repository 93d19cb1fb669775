#pragma once
// Bot behavior: discretized state features, tabular SARSA / Q-learning
// policies, random and rule-based policies, and the bot roster types. The
// feature space is deliberately tiny (4 buckets ^ 4 dims = 256 states) so
// tabular methods are exact and convergence is checkable at desk scale.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "wes/mechanism.hpp"
#include "wes/platform.hpp"
#include "wes/rng.hpp"

namespace wes::agents {

using platform::UserId;

enum class PolicyKind : std::uint8_t { Random, RuleBased, Rl };

enum class UpdateRule : std::uint8_t { Sarsa, QLearning };

enum class Role : std::uint8_t {
  Scammer,
  Normal,
  Target,
  PrivacyBreaker,
  DataAcquirer,
  None,
};

enum class RuleSet : std::uint8_t { Target, Normal, Replay };

const char* to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

struct RlHyperparams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  UpdateRule rule = UpdateRule::Sarsa;
};

// --- Features ----------------------------------------------------------------

inline constexpr int kFeatureBuckets = 4;  // 0, 1, 2, 3+
inline constexpr int kFeatureDims = 4;
inline constexpr int kStateCount = 256;    // 4^4

struct FeatureInputs {
  std::uint32_t pending_requests = 0;
  std::uint32_t visible_vulnerable = 0;
  std::uint32_t remaining_budget = 0;
  std::uint32_t contacted = 0;
};

struct StateFeatures {
  std::array<std::uint8_t, kFeatureDims> bucket{};

  int index() const {
    return bucket[0] + kFeatureBuckets * bucket[1] +
           kFeatureBuckets * kFeatureBuckets * bucket[2] +
           kFeatureBuckets * kFeatureBuckets * kFeatureBuckets * bucket[3];
  }
};

StateFeatures featurize(const FeatureInputs& inputs);

// --- Tabular policy ------------------------------------------------------------

class QTable {
 public:
  QTable() : values_(kStateCount * platform::kActionKindCount, 0.0) {}

  double get(int state, int action) const { return values_[slot(state, action)]; }
  void set(int state, int action, double v) { values_[slot(state, action)] = v; }

  // Q(s,a) += alpha * (r + gamma * Q(s',a') - Q(s,a))
  void update_sarsa(int s, int a, double r, int s2, int a2, double alpha, double gamma);

  // Same with max over the repertoire at s' in place of Q(s',a').
  void update_qlearning(int s, int a, double r, int s2,
                        std::span<const int> repertoire, double alpha, double gamma);

  // Terminal transition: no successor value.
  void update_terminal(int s, int a, double r, double alpha);

  // Argmax over the repertoire; ties break toward the lowest ordinal.
  int greedy_action(int state, std::span<const int> repertoire) const;

  double max_value(int state, std::span<const int> repertoire) const;

  bool operator==(const QTable& other) const { return values_ == other.values_; }

  // Versioned flat snapshot: "wes-policy 1" header then (state, action,
  // value) rows for nonzero cells.
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

 private:
  static std::size_t slot(int state, int action) {
    return static_cast<std::size_t>(state) * platform::kActionKindCount +
           static_cast<std::size_t>(action);
  }

  std::vector<double> values_;
};

struct EmptyRepertoire : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Epsilon-greedy for RL policies, uniform for Random. Returns the chosen
// action ordinal. Throws EmptyRepertoire when there is nothing to choose.
int select_action_ordinal(PolicyKind kind, const QTable* table, double epsilon,
                          const StateFeatures& features,
                          std::span<const int> repertoire, Rng& rng);

// --- Roster ---------------------------------------------------------------------

struct BotSpec {
  UserId user = 0;
  // True when the id refers to a generated graph user instead of a fresh
  // test user appended to the world.
  bool bind_existing = false;
  std::optional<bool> vulnerable_override;

  platform::BotClass bot_class = platform::BotClass::Writer;
  PolicyKind policy = PolicyKind::RuleBased;
  RuleSet rules = RuleSet::Normal;
  RlHyperparams rl;
  bool train = false;  // RL updates enabled during the episode
  Role role = Role::Normal;
  std::vector<int> repertoire;  // action ordinals; empty for ReadOnly bots
  std::optional<mechanism::MechanismParams> mechanism_override;
  double reply_probability = 0.5;  // Target rule set
  std::optional<std::string> snapshot_path;  // initial Q-table for RL bots
};

void validate(const BotSpec& spec);

}  // namespace wes::agents
