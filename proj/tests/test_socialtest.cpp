#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wes/platform_log.hpp"
#include "wes/scenarios.hpp"
#include "wes/socialtest.hpp"

using namespace wes;
using namespace wes::socialtest;

TEST_CASE("exact rank-sum p-value on an enumerable case") {
  // a = {1,2}, b = {3,4}: U = 0, the most extreme of C(4,2)=6 assignments.
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {3, 4};
  const auto result = mann_whitney(a, b);
  CHECK(result.exact);
  CHECK(result.u_statistic == doctest::Approx(0.0));
  CHECK(result.p_value == doctest::Approx(2.0 / 6.0));

  // Perfectly interleaved: no evidence at all.
  const std::vector<double> x = {1, 3};
  const std::vector<double> y = {2, 4};
  const auto balanced = mann_whitney(x, y);
  CHECK(balanced.exact);
  CHECK(balanced.p_value > 0.6);
}

TEST_CASE("identical samples give the central U and no significance") {
  const std::vector<double> a = {5, 5, 5, 5};
  const std::vector<double> b = {5, 5, 5, 5};
  const auto result = mann_whitney(a, b);
  CHECK(result.u_statistic == doctest::Approx(8.0));  // n1*n2/2
  CHECK(result.p_value == doctest::Approx(1.0));
}

TEST_CASE("normal approximation detects a clear shift at n=20") {
  std::vector<double> baseline;
  std::vector<double> candidate;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    baseline.push_back(100.0 + rng.uniform_real(-5, 5));
    candidate.push_back(50.0 + rng.uniform_real(-5, 5));
  }
  const auto result = mann_whitney(baseline, candidate);
  CHECK_FALSE(result.exact);
  CHECK(result.p_value < 1e-6);
}

TEST_CASE("exact and normal paths agree on moderate separations") {
  const std::vector<double> a = {1.2, 3.4, 5.1, 7.9, 9.0, 11.5, 13.1, 2.2, 6.6, 8.8};
  const std::vector<double> b = {4.5, 10.1, 12.7, 14.2, 15.5, 16.1, 17.0, 18.3, 19.9,
                                 20.4};
  const auto exact = mann_whitney(a, b);
  REQUIRE(exact.exact);
  // Force the approximation path by widening one sample with distinct values.
  std::vector<double> a_wide = a;
  a_wide.push_back(21.7);
  const auto approx = mann_whitney(a_wide, b);
  CHECK_FALSE(approx.exact);
  CHECK(exact.p_value == doctest::Approx(approx.p_value).epsilon(0.5));
}

TEST_CASE("oracle verdicts require both threshold and significance") {
  OracleSpec spec;
  spec.metric = "messages_sent";
  spec.direction = Direction::Drop;
  spec.theta = 0.2;
  spec.alpha = 0.05;

  std::vector<double> baseline;
  std::vector<double> small_drop;
  std::vector<double> big_drop;
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const double base = 200.0 + rng.uniform_real(-10, 10);
    baseline.push_back(base);
    small_drop.push_back(base * 0.95);  // 5%: below theta, however significant
    big_drop.push_back(base * 0.5);     // 50%: both gates trip
  }
  const Verdict ok = evaluate_oracle(baseline, small_drop, spec);
  CHECK(ok.pass);
  CHECK(ok.relative_change == doctest::Approx(-0.05).epsilon(0.02));

  const Verdict fail = evaluate_oracle(baseline, big_drop, spec);
  CHECK_FALSE(fail.pass);
  CHECK(fail.relative_change == doctest::Approx(-0.5).epsilon(0.02));
  CHECK(fail.p_value <= 0.05);

  // Rise direction ignores drops.
  OracleSpec rise = spec;
  rise.direction = Direction::Rise;
  CHECK(evaluate_oracle(baseline, big_drop, rise).pass);
  CHECK_FALSE(evaluate_oracle(big_drop, baseline, rise).pass);
}

TEST_CASE("identical arms pass with zero change") {
  OracleSpec spec;
  spec.metric = "messages_sent";
  const std::vector<double> arm = {10, 12, 9, 14, 11};
  const Verdict verdict = evaluate_oracle(arm, arm, spec);
  CHECK(verdict.pass);
  CHECK(verdict.relative_change == doctest::Approx(0.0));
}

TEST_CASE("zero-baseline oracles raise DegenerateBaseline") {
  OracleSpec spec;
  spec.metric = "messages_sent";
  const std::vector<double> zeros = {0, 0, 0};
  const std::vector<double> ones = {1, 1, 1};
  CHECK_THROWS_AS(evaluate_oracle(zeros, ones, spec), DegenerateBaseline);
}

TEST_CASE("swapping arms flips sign and direction with equal significance") {
  OracleSpec drop;
  drop.metric = "messages_sent";
  drop.direction = Direction::Drop;
  drop.theta = 0.2;
  drop.alpha = 0.05;
  OracleSpec rise = drop;
  rise.direction = Direction::Rise;

  std::vector<double> high;
  std::vector<double> low;
  Rng rng(21);
  for (int i = 0; i < 15; ++i) {
    high.push_back(100 + rng.uniform_real(-4, 4));
    low.push_back(55 + rng.uniform_real(-4, 4));
  }
  const Verdict forward = evaluate_oracle(high, low, drop);
  const Verdict swapped = evaluate_oracle(low, high, rise);
  CHECK(forward.relative_change < 0.0);
  CHECK(swapped.relative_change > 0.0);
  CHECK(forward.p_value == doctest::Approx(swapped.p_value).epsilon(1e-9));
  CHECK(forward.pass == swapped.pass);
}

TEST_CASE("fault registry parses ids and rejects unknown ones") {
  const auto drop = inject_fault("message-drop(0.5)");
  CHECK(drop.message_drop_p == doctest::Approx(0.5));
  const auto downgrade = inject_fault("privacy-policy-downgrade");
  CHECK(downgrade.privacy_downgrade);
  const auto loss = inject_fault("notification-loss(0.25)");
  CHECK(loss.notification_loss_p == doctest::Approx(0.25));
  CHECK_THROWS_AS(inject_fault("unknown-fault"), UnknownFault);
  CHECK_THROWS_AS(inject_fault("message-drop(1.5)"), UnknownFault);
  CHECK_THROWS_AS(inject_fault("message-drop(x)"), UnknownFault);
}

TEST_CASE("total message drop zeroes the messages_sent metric") {
  runner::Script script = scenarios::messenger_scenario(30, 10, 5, 120);
  script.faults = inject_fault("message-drop(1.0)");
  const auto result = runner::run_script(script, 4);
  CHECK(result.metric_finals.at("messages_sent") == doctest::Approx(0.0));
  CHECK(result.metric_finals.at("actions_denied") > 0.0);
}

TEST_CASE("null faults leave episode logs byte-identical") {
  runner::Script clean = scenarios::messenger_scenario(30, 10, 5, 120);
  runner::Script nulled = clean;
  nulled.faults = inject_fault("message-drop(0.0)");
  const auto a = runner::run_script(clean, 9);
  const auto b = runner::run_script(nulled, 9);
  CHECK(platform::log_to_string(a.final_world->events) ==
        platform::log_to_string(b.final_world->events));
}

TEST_CASE("ab_test with identical arms passes every oracle on shared seeds") {
  const runner::Script scenario = scenarios::messenger_scenario(30, 10, 5, 120);
  ArmSpec arm_a;
  arm_a.label = "identity";
  ArmSpec arm_b = arm_a;
  arm_b.label = "identity-clone";
  std::vector<OracleSpec> oracles;
  for (const char* metric : {"messages_sent", "posts_created", "requests_sent"}) {
    OracleSpec spec;
    spec.metric = metric;
    oracles.push_back(spec);
  }
  const ABTestReport report = ab_test(scenario, arm_a, arm_b, 6, oracles, 77, 2);
  CHECK(report.all_pass());
  CHECK(report.seeds.size() == 6);
  for (const auto& mv : report.verdicts) {
    CHECK(mv.verdict.pass);
    if (!mv.degenerate) {
      CHECK(mv.verdict.relative_change == doctest::Approx(0.0));
    }
  }
  CHECK(report.role_rewards.count("normal") == 1);
}

TEST_CASE("ab_test flags an injected heavy message drop") {
  const runner::Script scenario = scenarios::messenger_scenario(30, 10, 5, 120);
  ArmSpec healthy;
  healthy.label = "baseline";
  ArmSpec faulty;
  faulty.label = "candidate";
  faulty.fault = inject_fault("message-drop(0.5)");
  OracleSpec spec;
  spec.metric = "messages_sent";
  spec.theta = 0.2;
  spec.alpha = 0.05;
  const ABTestReport report =
      ab_test(scenario, healthy, faulty, 10, std::vector<OracleSpec>{spec}, 31, 2);
  REQUIRE(report.verdicts.size() == 1);
  CHECK_FALSE(report.verdicts[0].verdict.pass);
  CHECK(report.verdicts[0].verdict.relative_change ==
        doctest::Approx(-0.5).epsilon(0.15));
  CHECK_FALSE(report.all_pass());
}

TEST_CASE("rate-limited scammers trip the scam_contacts oracle but not messaging") {
  runner::Script scenario = scenarios::scam_scenario(80, 5, 8, 42, 60);
  // A random-policy scammer completes enough funnels to give the baseline a
  // signal without pretraining.
  for (auto& bot : scenario.roster) {
    if (bot.role == agents::Role::Scammer) {
      bot.policy = agents::PolicyKind::Random;
    }
  }
  ArmSpec identity_arm;
  identity_arm.label = "identity";
  ArmSpec limited_arm;
  limited_arm.label = "request-limited";
  mechanism::MechanismParams limited = mechanism::identity_params();
  limited.search_result_cap = 0;  // hide targets from search
  limited_arm.mechanism = limited;

  OracleSpec scam;
  scam.metric = "scam_contacts";
  scam.theta = 0.4;
  scam.alpha = 0.05;
  OracleSpec msg;
  msg.metric = "messages_sent";
  msg.theta = 0.4;
  msg.alpha = 0.05;
  const ABTestReport report = ab_test(
      scenario, identity_arm, limited_arm, 8,
      std::vector<OracleSpec>{scam, msg}, 13, 2);
  REQUIRE(report.verdicts.size() == 2);
  CHECK_FALSE(report.verdicts[0].verdict.pass);  // scam contacts collapse
  CHECK(report.verdicts[1].verdict.pass);        // community messaging survives
}

TEST_CASE("aggregation modes extract the expected samples") {
  const runner::Script scenario = scenarios::messenger_scenario(25, 8, 5, 100);
  const auto result = runner::run_script(scenario, 3);
  const double final_cumulative =
      extract_metric(result, "messages_sent", Aggregation::FinalCumulative);
  const double per_tick =
      extract_metric(result, "messages_sent", Aggregation::PerTickMean);
  CHECK(final_cumulative == result.metric_finals.at("messages_sent"));
  CHECK(per_tick == doctest::Approx(final_cumulative /
                                    static_cast<double>(result.ticks_elapsed)));
}

TEST_CASE("calibration harness pairs seeds for faults and emits CSV") {
  const runner::Script scenario = scenarios::messenger_scenario(25, 8, 5, 100);
  OracleSpec spec;
  spec.metric = "messages_sent";
  spec.theta = 0.2;
  spec.alpha = 0.05;

  const auto faulted = run_calibration(scenario, spec, 3, 8,
                                       inject_fault("message-drop(0.5)"), 42, 2);
  REQUIRE(faulted.size() == 3);
  for (const auto& row : faulted) {
    CHECK(row.fail);  // a 50% drop at theta=0.2 must be detected
    CHECK(row.relative_change < -0.2);
  }

  const auto healthy =
      run_calibration(scenario, spec, 3, 8, platform::FaultConfig{}, 42, 2);
  for (const auto& row : healthy) {
    // Independent same-distribution arms sit well inside the threshold.
    CHECK(std::abs(row.relative_change) < 0.2);
  }

  const std::string csv = calibration_csv(faulted);
  CHECK(csv.rfind("repetition,metric,change,p,verdict\n", 0) == 0);
  CHECK(csv.find(",messages_sent,") != std::string::npos);
  CHECK(csv.find(",fail\n") != std::string::npos);
}

TEST_CASE("oracle spec validation rejects bad thresholds") {
  OracleSpec spec;
  spec.metric = "messages_sent";
  spec.theta = 0.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.theta = 0.2;
  spec.alpha = 1.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.alpha = 0.05;
  spec.metric = "nope";
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}
