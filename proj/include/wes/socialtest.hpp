#pragma once
// Social testing: percentage-based metric oracles over episode populations,
// Mann-Whitney rank-sum significance, mechanism/fault A/B tests, and the
// injectable-fault registry.

#include <optional>
#include <string>
#include <vector>

#include "wes/runner.hpp"

namespace wes::socialtest {

struct RankSumResult {
  double u_statistic = 0.0;  // U for the first sample
  double p_value = 1.0;      // two-sided
  bool exact = false;        // exact enumeration vs normal approximation
};

// Wilcoxon-Mann-Whitney two-sided test. Exact null distribution for
// tie-free samples up to 10 per arm, midrank normal approximation with tie
// correction otherwise.
RankSumResult mann_whitney(std::span<const double> a, std::span<const double> b);

enum class Aggregation : std::uint8_t { FinalCumulative, PerTickMean };
enum class Direction : std::uint8_t { Drop, Rise };

const char* to_string(Aggregation agg);
const char* to_string(Direction dir);

struct OracleSpec {
  std::string metric;
  Aggregation aggregation = Aggregation::FinalCumulative;
  Direction direction = Direction::Drop;
  double theta = 0.2;   // relative change threshold, in (0,1)
  double alpha = 0.05;  // significance level, in (0,1)
};

void validate(const OracleSpec& spec);

struct Verdict {
  bool pass = true;
  double relative_change = 0.0;  // (mean_candidate - mean_baseline) / mean_baseline
  double p_value = 1.0;
  std::size_t n_baseline = 0;
  std::size_t n_candidate = 0;
};

struct DegenerateBaseline : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// fail iff the relative change clears theta in the flagged direction AND the
// rank-sum p-value clears alpha. Throws DegenerateBaseline when the baseline
// mean is zero.
Verdict evaluate_oracle(std::span<const double> baseline,
                        std::span<const double> candidate, const OracleSpec& spec);

// Metric sample for one episode under the given aggregation.
double extract_metric(const runner::EpisodeResult& result, const std::string& metric,
                      Aggregation aggregation);

// Fault registry: "message-drop(p)", "privacy-policy-downgrade",
// "notification-loss(p)". Throws UnknownFault otherwise.
platform::FaultConfig inject_fault(const std::string& fault_id);

struct ArmSpec {
  std::string label;
  std::optional<mechanism::MechanismParams> mechanism;  // nullopt = identity
  platform::FaultConfig fault;
};

struct RoleRewardSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

struct MetricVerdict {
  OracleSpec spec;
  Verdict verdict;
  bool degenerate = false;  // baseline mean was zero; no verdict possible
};

struct ABTestReport {
  std::string arm_a;
  std::string arm_b;
  std::vector<std::uint64_t> seeds;  // identical for both arms
  std::vector<MetricVerdict> verdicts;
  // role -> (arm A summary, arm B summary)
  std::map<std::string, std::pair<RoleRewardSummary, RoleRewardSummary>> role_rewards;

  bool all_pass() const;
};

// Runs n seeded episodes per arm with identical seed lists (common random
// numbers), applies every oracle with A as baseline, and summarizes per-role
// rewards.
ABTestReport ab_test(const runner::Script& scenario, const ArmSpec& arm_a,
                     const ArmSpec& arm_b, std::uint32_t n_seeds,
                     std::span<const OracleSpec> oracles, std::uint64_t master_seed,
                     int workers);

// --- Calibration harness -----------------------------------------------------

struct CalibrationRow {
  std::uint32_t repetition = 0;
  std::string metric;
  double relative_change = 0.0;
  double p_value = 1.0;
  bool fail = false;  // oracle verdict (fail = change detected)
};

// Repeats the oracle experiment. With a fault, arms share seeds (common
// random numbers) and the fault is injected into the candidate arm. Without
// one, the arms draw independent seed lists, which measures the oracle's
// false-failure rate on a healthy platform.
std::vector<CalibrationRow> run_calibration(const runner::Script& scenario,
                                            const OracleSpec& spec,
                                            std::uint32_t repetitions,
                                            std::uint32_t n_per_arm,
                                            const platform::FaultConfig& fault,
                                            std::uint64_t master_seed, int workers);

// CSV rows: repetition,metric,change,p,verdict.
std::string calibration_csv(std::span<const CalibrationRow> rows);

}  // namespace wes::socialtest
