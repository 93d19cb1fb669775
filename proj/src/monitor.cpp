#include "wes/monitor.hpp"

#include <algorithm>
#include <cstdio>

namespace wes::runner {

const std::vector<std::string> kBuiltinMetrics = {
    "messages_sent",   "requests_sent",     "requests_accepted", "posts_created",
    "groups_joined",   "shares_sent",       "messages_fetched",  "actions_denied",
    "scam_contacts",   "privacy_violations", "data_observed",
};

bool is_builtin_metric(const std::string& id) {
  return std::find(kBuiltinMetrics.begin(), kBuiltinMetrics.end(), id) !=
         kBuiltinMetrics.end();
}

Monitor::Monitor(std::vector<std::string> recorded) {
  if (!recorded.empty()) {
    record_all_ = false;
    recorded_.insert(recorded.begin(), recorded.end());
  }
}

bool Monitor::records(const std::string& id) const {
  return record_all_ || recorded_.count(id) > 0;
}

void Monitor::record_metric(const std::string& id, Tick tick, double value) {
  auto& series = series_[id];
  if (!series.empty() && tick < series.back().first) {
    throw NonMonotoneTick("record_metric: tick went backwards for " + id);
  }
  series.emplace_back(tick, value);
}

void Monitor::increment(const std::string& id, Tick tick, double delta) {
  const double value = (counters_[id] += delta);
  if (records(id)) {
    record_metric(id, tick, value);
  }
}

double Monitor::counter(const std::string& id) const {
  auto it = counters_.find(id);
  return it == counters_.end() ? 0.0 : it->second;
}

std::string Monitor::series_csv() const {
  std::string out = "metric,tick,value\n";
  char row[128];
  for (const auto& [id, samples] : series_) {
    for (const auto& [tick, value] : samples) {
      std::snprintf(row, sizeof(row), "%s,%llu,%.17g\n", id.c_str(),
                    static_cast<unsigned long long>(tick), value);
      out += row;
    }
  }
  return out;
}

}  // namespace wes::runner
