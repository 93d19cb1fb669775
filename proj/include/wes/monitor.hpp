#pragma once
// The Monitor records everything an episode produces besides the world's own
// event log: metric time series, mechanism/platform denial audits, and
// observation records. Oracles and reward functions are pure functions over
// this trace.

#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wes/platform.hpp"

namespace wes::runner {

using platform::Tick;
using platform::UserId;

struct AuditRecord {
  Tick tick = 0;
  UserId actor = 0;
  int ordinal = 0;
  platform::DenyReason reason = platform::DenyReason::None;
  bool mechanism_stage = false;  // false: denied by the platform itself
};

struct ObservationRecord {
  Tick tick = 0;
  UserId actor = 0;
  platform::QueryKind kind = platform::QueryKind::ViewProfile;
  bool ok = false;
  platform::DenyReason reason = platform::DenyReason::None;
  // Query arguments (union-style, per kind).
  UserId query_user = 0;
  platform::PostId query_post = 0;
  platform::MessageId query_message = 0;
  // Result payload needed by reward functions and oracles.
  std::vector<UserId> returned_users;          // SearchUsers / ListFriends
  UserId post_author = 0;                      // ViewPost
  platform::Visibility post_visibility = platform::Visibility::Public;
};

struct NonMonotoneTick : std::runtime_error {
  using std::runtime_error::runtime_error;
};

extern const std::vector<std::string> kBuiltinMetrics;

bool is_builtin_metric(const std::string& id);

class Monitor {
 public:
  // `recorded` selects which metric series are kept; empty means all
  // built-ins. Counters for every built-in metric are always maintained.
  explicit Monitor(std::vector<std::string> recorded = {});

  // Appends one sample. Ticks must be non-decreasing per metric.
  void record_metric(const std::string& id, Tick tick, double value);

  // Bumps the named counter and appends the new cumulative value when the
  // metric is recorded.
  void increment(const std::string& id, Tick tick, double delta = 1.0);

  double counter(const std::string& id) const;

  void add_audit(AuditRecord record) { audits_.push_back(std::move(record)); }
  void add_observation(ObservationRecord record) {
    observations_.push_back(std::move(record));
  }

  const std::vector<AuditRecord>& audits() const { return audits_; }
  const std::vector<ObservationRecord>& observations() const { return observations_; }
  const std::map<std::string, std::vector<std::pair<Tick, double>>>& series() const {
    return series_;
  }

  // CSV rows "metric,tick,value", metrics in ascending name order.
  std::string series_csv() const;

 private:
  bool records(const std::string& id) const;

  std::set<std::string> recorded_;
  bool record_all_ = true;
  std::map<std::string, std::vector<std::pair<Tick, double>>> series_;
  std::map<std::string, double> counters_;
  std::vector<AuditRecord> audits_;
  std::vector<ObservationRecord> observations_;
};

// A completed episode's artifacts, bundled for reward recomputation and
// oracle checks.
struct EpisodeTrace {
  const platform::WorldState* initial_world = nullptr;
  std::span<const platform::Event> events;
  std::span<const AuditRecord> audits;
  std::span<const ObservationRecord> observations;
};

}  // namespace wes::runner
