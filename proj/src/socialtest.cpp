#include "wes/socialtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wes/parallel.hpp"

namespace wes::socialtest {

namespace {

constexpr std::size_t kExactLimit = 10;

bool has_ties(std::vector<double> combined) {
  std::sort(combined.begin(), combined.end());
  return std::adjacent_find(combined.begin(), combined.end()) != combined.end();
}

// Number of rank assignments with statistic u, for sample sizes m and n.
// f(m, n, u) = f(m-1, n, u-n) + f(m, n-1, u)
double exact_count(std::size_t m, std::size_t n, long long u,
                   std::vector<std::vector<std::vector<double>>>& memo) {
  if (u < 0) {
    return 0.0;
  }
  if (m == 0) {
    return u == 0 ? 1.0 : 0.0;
  }
  if (n == 0) {
    return u == 0 ? 1.0 : 0.0;
  }
  double& slot = memo[m][n][static_cast<std::size_t>(u)];
  if (slot >= 0.0) {
    return slot;
  }
  slot = exact_count(m - 1, n, u - static_cast<long long>(n), memo) +
         exact_count(m, n - 1, u, memo);
  return slot;
}

double exact_two_sided_p(std::size_t m, std::size_t n, double u_obs) {
  const std::size_t max_u = m * n;
  std::vector<std::vector<std::vector<double>>> memo(
      m + 1, std::vector<std::vector<double>>(
                 n + 1, std::vector<double>(max_u + 1, -1.0)));
  double total = 0.0;
  std::vector<double> pmf(max_u + 1, 0.0);
  for (std::size_t u = 0; u <= max_u; ++u) {
    pmf[u] = exact_count(m, n, static_cast<long long>(u), memo);
    total += pmf[u];
  }
  const auto u_lo = static_cast<std::size_t>(std::floor(u_obs));
  const auto u_hi = static_cast<std::size_t>(std::ceil(u_obs));
  double below = 0.0;
  double above = 0.0;
  for (std::size_t u = 0; u <= max_u; ++u) {
    if (u <= u_lo) {
      below += pmf[u];
    }
    if (u >= u_hi) {
      above += pmf[u];
    }
  }
  return std::min(1.0, 2.0 * std::min(below / total, above / total));
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

RankSumResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  RankSumResult result;
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  if (n1 == 0 || n2 == 0) {
    return result;
  }

  struct Tagged {
    double value;
    bool first_sample;
  };
  std::vector<Tagged> combined;
  combined.reserve(n1 + n2);
  for (double v : a) {
    combined.push_back({v, true});
  }
  for (double v : b) {
    combined.push_back({v, false});
  }
  std::sort(combined.begin(), combined.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  // Midranks with tie bookkeeping.
  const std::size_t total = combined.size();
  std::vector<double> ranks(total, 0.0);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j + 1 < total && combined[j + 1].value == combined[i].value) {
      ++j;
    }
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[k] = midrank;
    }
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  double rank_sum_a = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    if (combined[k].first_sample) {
      rank_sum_a += ranks[k];
    }
  }
  const double u1 =
      rank_sum_a - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
  result.u_statistic = u1;

  std::vector<double> merged(a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  if (n1 <= kExactLimit && n2 <= kExactLimit && !has_ties(merged)) {
    result.exact = true;
    result.p_value = exact_two_sided_p(n1, n2, u1);
    return result;
  }

  const double nn = static_cast<double>(n1) * static_cast<double>(n2);
  const double big_n = static_cast<double>(total);
  const double variance =
      nn / 12.0 * (big_n + 1.0 - tie_term / (big_n * (big_n - 1.0)));
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double mean = nn / 2.0;
  double z = u1 - mean;
  // Continuity correction toward the mean.
  z += z > 0.0 ? -0.5 : (z < 0.0 ? 0.5 : 0.0);
  z /= std::sqrt(variance);
  result.p_value = normal_two_sided_p(z);
  return result;
}

const char* to_string(Aggregation agg) {
  return agg == Aggregation::FinalCumulative ? "final_cumulative" : "per_tick_mean";
}

const char* to_string(Direction dir) {
  return dir == Direction::Drop ? "drop" : "rise";
}

void validate(const OracleSpec& spec) {
  if (!runner::is_builtin_metric(spec.metric)) {
    throw std::invalid_argument("oracle metric unknown: " + spec.metric);
  }
  if (spec.theta <= 0.0 || spec.theta >= 1.0) {
    throw std::invalid_argument("oracle theta must be in (0,1)");
  }
  if (spec.alpha <= 0.0 || spec.alpha >= 1.0) {
    throw std::invalid_argument("oracle alpha must be in (0,1)");
  }
}

namespace {

double mean_of(std::span<const double> xs) {
  if (xs.empty()) {
    return 0.0;
  }
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

Verdict evaluate_oracle(std::span<const double> baseline,
                        std::span<const double> candidate, const OracleSpec& spec) {
  validate(spec);
  if (baseline.empty() || candidate.empty()) {
    throw std::invalid_argument("evaluate_oracle: empty sample");
  }
  const double mean_baseline = mean_of(baseline);
  if (mean_baseline == 0.0) {
    throw DegenerateBaseline("baseline mean is zero for metric " + spec.metric);
  }
  Verdict verdict;
  verdict.n_baseline = baseline.size();
  verdict.n_candidate = candidate.size();
  verdict.relative_change = (mean_of(candidate) - mean_baseline) / mean_baseline;
  verdict.p_value = mann_whitney(baseline, candidate).p_value;

  const bool threshold_tripped = spec.direction == Direction::Drop
                                     ? verdict.relative_change <= -spec.theta
                                     : verdict.relative_change >= spec.theta;
  verdict.pass = !(threshold_tripped && verdict.p_value <= spec.alpha);
  return verdict;
}

double extract_metric(const runner::EpisodeResult& result, const std::string& metric,
                      Aggregation aggregation) {
  const double final_value = result.metric_finals.at(metric);
  if (aggregation == Aggregation::FinalCumulative) {
    return final_value;
  }
  return result.ticks_elapsed == 0
             ? 0.0
             : final_value / static_cast<double>(result.ticks_elapsed);
}

platform::FaultConfig inject_fault(const std::string& fault_id) {
  platform::FaultConfig fault;
  auto parse_prob = [&](const std::string& prefix) -> std::optional<double> {
    if (fault_id.rfind(prefix + "(", 0) != 0 || fault_id.back() != ')') {
      return std::nullopt;
    }
    const std::string inner =
        fault_id.substr(prefix.size() + 1, fault_id.size() - prefix.size() - 2);
    try {
      const double p = std::stod(inner);
      if (p < 0.0 || p > 1.0) {
        throw UnknownFault("fault probability out of range: " + fault_id);
      }
      return p;
    } catch (const UnknownFault&) {
      throw;
    } catch (const std::exception&) {
      throw UnknownFault("malformed fault id: " + fault_id);
    }
  };

  if (fault_id == "privacy-policy-downgrade") {
    fault.privacy_downgrade = true;
    return fault;
  }
  if (auto p = parse_prob("message-drop")) {
    fault.message_drop_p = *p;
    return fault;
  }
  if (auto p = parse_prob("notification-loss")) {
    fault.notification_loss_p = *p;
    return fault;
  }
  throw UnknownFault("unknown fault id: " + fault_id);
}

bool ABTestReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const MetricVerdict& v) { return v.verdict.pass; });
}

namespace {

RoleRewardSummary summarize(const std::vector<double>& values) {
  RoleRewardSummary summary;
  summary.n = values.size();
  if (values.empty()) {
    return summary;
  }
  summary.mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - summary.mean;
    ss += d * d;
  }
  summary.stddev = values.size() > 1
                       ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                       : 0.0;
  return summary;
}

}  // namespace

ABTestReport ab_test(const runner::Script& scenario, const ArmSpec& arm_a,
                     const ArmSpec& arm_b, std::uint32_t n_seeds,
                     std::span<const OracleSpec> oracles, std::uint64_t master_seed,
                     int workers) {
  if (n_seeds < 2) {
    throw std::invalid_argument("ab_test: need at least 2 seeds per arm");
  }
  for (const OracleSpec& spec : oracles) {
    validate(spec);
  }

  ABTestReport report;
  report.arm_a = arm_a.label.empty() ? "A" : arm_a.label;
  report.arm_b = arm_b.label.empty() ? "B" : arm_b.label;
  for (std::uint32_t i = 0; i < n_seeds; ++i) {
    report.seeds.push_back(split_seed(master_seed, "abtest-seed", i));
  }

  auto make_script = [&](const ArmSpec& arm) {
    runner::Script script = scenario;
    script.mechanism =
        arm.mechanism.has_value() ? *arm.mechanism : mechanism::identity_params();
    script.faults = arm.fault;
    script.keep_artifacts = false;
    return script;
  };
  const runner::Script script_a = make_script(arm_a);
  const runner::Script script_b = make_script(arm_b);

  std::vector<runner::EpisodeResult> results_a(n_seeds);
  std::vector<runner::EpisodeResult> results_b(n_seeds);
  parallel::for_each_index(2 * static_cast<std::size_t>(n_seeds), workers,
                           [&](std::size_t i) {
                             if (i < n_seeds) {
                               results_a[i] = runner::run_script(script_a,
                                                                 report.seeds[i]);
                             } else {
                               results_b[i - n_seeds] =
                                   runner::run_script(script_b,
                                                      report.seeds[i - n_seeds]);
                             }
                           });

  for (const OracleSpec& spec : oracles) {
    std::vector<double> baseline;
    std::vector<double> candidate;
    for (std::uint32_t i = 0; i < n_seeds; ++i) {
      baseline.push_back(extract_metric(results_a[i], spec.metric, spec.aggregation));
      candidate.push_back(extract_metric(results_b[i], spec.metric, spec.aggregation));
    }
    MetricVerdict mv;
    mv.spec = spec;
    try {
      mv.verdict = evaluate_oracle(baseline, candidate, spec);
    } catch (const DegenerateBaseline&) {
      // No baseline signal: pass only if the candidate is silent too.
      mv.degenerate = true;
      mv.verdict.pass = mean_of(candidate) == 0.0;
      mv.verdict.n_baseline = baseline.size();
      mv.verdict.n_candidate = candidate.size();
    }
    report.verdicts.push_back(std::move(mv));
  }

  // Per-role reward summaries.
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_role;
  for (const auto& bot : scenario.roster) {
    const std::string role = agents::to_string(bot.role);
    for (std::uint32_t i = 0; i < n_seeds; ++i) {
      by_role[role].first.push_back(results_a[i].rewards.at(bot.user));
      by_role[role].second.push_back(results_b[i].rewards.at(bot.user));
    }
  }
  for (const auto& [role, samples] : by_role) {
    report.role_rewards[role] = {summarize(samples.first), summarize(samples.second)};
  }
  return report;
}

std::vector<CalibrationRow> run_calibration(const runner::Script& scenario,
                                            const OracleSpec& spec,
                                            std::uint32_t repetitions,
                                            std::uint32_t n_per_arm,
                                            const platform::FaultConfig& fault,
                                            std::uint64_t master_seed, int workers) {
  validate(spec);
  std::vector<CalibrationRow> rows;
  rows.reserve(repetitions);
  const bool faulted = fault.any();

  runner::Script base_script = scenario;
  base_script.mechanism = scenario.mechanism.has_value() ? scenario.mechanism
                                                         : std::make_optional(
                                                               mechanism::identity_params());
  base_script.keep_artifacts = false;
  runner::Script cand_script = base_script;
  cand_script.faults = fault;

  for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
    std::vector<std::uint64_t> base_seeds;
    std::vector<std::uint64_t> cand_seeds;
    for (std::uint32_t i = 0; i < n_per_arm; ++i) {
      const std::uint64_t index =
          static_cast<std::uint64_t>(rep) * 10000 + i;
      base_seeds.push_back(split_seed(master_seed, "cal-base", index));
      // Faulted runs pair seeds across arms; healthy calibration draws
      // independent samples so the false-failure rate is measurable.
      cand_seeds.push_back(faulted ? base_seeds.back()
                                   : split_seed(master_seed, "cal-cand", index));
    }
    const auto base = runner::run_batch(base_script, base_seeds, workers);
    const auto cand = runner::run_batch(cand_script, cand_seeds, workers);
    std::vector<double> base_samples;
    std::vector<double> cand_samples;
    for (std::uint32_t i = 0; i < n_per_arm; ++i) {
      base_samples.push_back(extract_metric(base[i], spec.metric, spec.aggregation));
      cand_samples.push_back(extract_metric(cand[i], spec.metric, spec.aggregation));
    }
    CalibrationRow row;
    row.repetition = rep;
    row.metric = spec.metric;
    const Verdict verdict = evaluate_oracle(base_samples, cand_samples, spec);
    row.relative_change = verdict.relative_change;
    row.p_value = verdict.p_value;
    row.fail = !verdict.pass;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string calibration_csv(std::span<const CalibrationRow> rows) {
  std::string out = "repetition,metric,change,p,verdict\n";
  char buf[160];
  for (const CalibrationRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%u,%s,%.17g,%.17g,%s\n", row.repetition,
                  row.metric.c_str(), row.relative_change, row.p_value,
                  row.fail ? "fail" : "pass");
    out += buf;
  }
  return out;
}

}  // namespace wes::socialtest
