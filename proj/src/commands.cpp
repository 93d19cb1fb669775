#include "wes/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "wes/config.hpp"
#include "wes/parallel.hpp"
#include "wes/platform_log.hpp"
#include "wes/runner.hpp"
#include "wes/scenarios.hpp"
#include "wes/version.hpp"

namespace wes::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitInvalid = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw config::ConfigError("cannot read config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Atomic write: temp file in the same directory, then rename.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << content;
  }
  fs::rename(tmp, path);
}

std::string hash_hex(std::uint64_t hash) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

class ManifestWriter {
 public:
  ManifestWriter(std::string subcommand, const GlobalOptions& options,
                 std::uint64_t master_seed, ordered_json resolved_config)
      : start_(std::chrono::steady_clock::now()) {
    manifest_["schema_version"] = config::kSchemaVersion;
    manifest_["tool_version"] = kToolVersion;
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["master_seed"] = master_seed;
    manifest_["workers"] = parallel::resolve_workers(options.workers);
    manifest_["config"] = std::move(resolved_config);
    manifest_["outputs"] = ordered_json::array();
  }

  void add_output(const std::string& name) { manifest_["outputs"].push_back(name); }

  void write(const fs::path& out_dir) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    manifest_["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    write_file(out_dir / "manifest.json", manifest_.dump(2) + "\n");
  }

 private:
  ordered_json manifest_;
  std::chrono::steady_clock::time_point start_;
};

ordered_json parse_back(const std::string& json_text) {
  return ordered_json::parse(json_text);
}

ordered_json episode_summary_json(const runner::EpisodeResult& result) {
  ordered_json j;
  j["seed"] = result.seed;
  j["final_world_hash"] = hash_hex(result.final_world_hash);
  j["ticks_elapsed"] = result.ticks_elapsed;
  j["objective_reached"] = result.objective_reached;
  j["steps"] = result.steps;
  ordered_json rewards;
  for (const auto& [user, reward] : result.rewards) {
    rewards[std::to_string(user)] = reward;
  }
  j["rewards"] = rewards;
  ordered_json utilities;
  for (const auto& [user, utility] : result.utilities) {
    utilities[std::to_string(user)] = utility;
  }
  j["utilities"] = utilities;
  ordered_json metrics;
  for (const auto& [id, value] : result.metric_finals) {
    metrics[id] = value;
  }
  j["metrics"] = metrics;
  if (result.final_world) {
    j["event_count"] = result.final_world->events.size();
  }
  if (result.monitor) {
    std::map<std::string, std::uint64_t> denials;
    for (const auto& audit : result.monitor->audits()) {
      denials[platform::to_string(audit.reason)] += 1;
    }
    ordered_json audit_counts;
    for (const auto& [reason, count] : denials) {
      audit_counts[reason] = count;
    }
    j["audit_counts"] = audit_counts;
  }
  return j;
}

std::string reward_curve_csv(const std::vector<double>& rewards) {
  std::string csv = "episode,reward\n";
  char row[64];
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    std::snprintf(row, sizeof(row), "%zu,%.17g\n", i, rewards[i]);
    csv += row;
  }
  return csv;
}

agents::QTable pretrained_policy(const runner::Script& scenario,
                                 platform::UserId scammer,
                                 const std::optional<std::string>& snapshot,
                                 std::uint32_t episodes, std::uint64_t seed) {
  if (snapshot.has_value()) {
    std::ifstream in(*snapshot);
    if (!in) {
      throw config::ConfigError("cannot open policy snapshot: " + *snapshot);
    }
    return agents::QTable::load(in);
  }
  runner::TrainConfig train;
  train.episodes = episodes;
  return runner::train_policy(scenario, scammer, train, split_seed(seed, "pretrain"))
      .policy;
}

ordered_json front_json(const std::vector<optimize::Individual>& front,
                        const optimize::EvalContext& ctx,
                        const std::vector<std::uint64_t>& seeds) {
  ordered_json arr = ordered_json::array();
  for (const auto& individual : front) {
    ordered_json entry;
    entry["genome"] = individual.genome;
    entry["params"] = parse_back(config::mechanism_to_json(
        ctx.decode_genome(individual.genome)));
    entry["objectives"] = {{"f1_scammer_success", individual.objectives[0]},
                           {"f2_utility_loss", individual.objectives[1]}};
    entry["seeds"] = seeds;
    arr.push_back(std::move(entry));
  }
  return arr;
}

std::string policy_snapshot_string(const agents::QTable& table) {
  std::ostringstream out;
  table.save(out);
  return out.str();
}

int run_command(const std::string& name, const std::function<int()>& body) {
  try {
    return body();
  } catch (const config::ConfigError& ex) {
    std::cerr << "wes_sim " << name << ": " << ex.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "wes_sim " << name << ": " << ex.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& ex) {
    std::cerr << "wes_sim " << name << ": " << ex.what() << "\n";
    return kExitFailures;
  }
}

}  // namespace

int cmd_gen_graph(const GlobalOptions& options) {
  return run_command("gen-graph", [&]() {
    config::GenGraphConfig cfg = config::parse_gen_graph(read_file(options.config_path));
    if (options.seed.has_value()) {
      cfg.graph.seed = *options.seed;
    }
    const platform::WorldState world = graphgen::generate(cfg.graph);

    fs::create_directories(options.out_dir);
    ManifestWriter manifest("gen-graph", options, cfg.graph.seed,
                            parse_back(config::graph_to_json(cfg.graph)));
    write_file(fs::path(options.out_dir) / "world.json",
               config::world_to_json(world) + "\n");
    manifest.add_output("world.json");
    manifest.write(options.out_dir);
    return kExitOk;
  });
}

int cmd_run(const GlobalOptions& options) {
  return run_command("run", [&]() {
    config::RunConfig cfg = config::parse_run(read_file(options.config_path));
    const std::uint64_t seed = options.seed.value_or(cfg.script.master_seed);
    cfg.script.master_seed = seed;

    fs::create_directories(options.out_dir);
    ManifestWriter manifest("run", options, seed,
                            parse_back(config::script_to_json(cfg.script)));
    const fs::path out_dir(options.out_dir);

    if (cfg.script.objective.kind == runner::ObjectiveKind::Episodes) {
      // Orchestrator-level objective: run N max_ticks-bounded episodes.
      const std::uint64_t episodes = cfg.script.objective.value;
      ordered_json summaries = ordered_json::array();
      for (std::uint64_t e = 0; e < episodes; ++e) {
        const runner::EpisodeResult result =
            runner::run_script(cfg.script, split_seed(seed, "episode", e));
        char stem[64];
        std::snprintf(stem, sizeof(stem), "events_%03llu.jsonl",
                      static_cast<unsigned long long>(e));
        write_file(out_dir / stem,
                   platform::log_to_string(result.final_world->events));
        manifest.add_output(stem);
        std::snprintf(stem, sizeof(stem), "metrics_%03llu.csv",
                      static_cast<unsigned long long>(e));
        write_file(out_dir / stem, result.monitor->series_csv());
        manifest.add_output(stem);
        summaries.push_back(episode_summary_json(result));
      }
      ordered_json summary;
      summary["schema_version"] = config::kSchemaVersion;
      summary["episodes"] = summaries;
      write_file(out_dir / "summary.json", summary.dump(2) + "\n");
      manifest.add_output("summary.json");
      manifest.write(out_dir);
      return kExitOk;
    }

    const runner::EpisodeResult result = runner::run_script(cfg.script, seed);
    write_file(out_dir / "events.jsonl",
               platform::log_to_string(result.final_world->events));
    manifest.add_output("events.jsonl");
    write_file(out_dir / "metrics.csv", result.monitor->series_csv());
    manifest.add_output("metrics.csv");
    ordered_json summary = episode_summary_json(result);
    summary["schema_version"] = config::kSchemaVersion;
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    manifest.add_output("summary.json");
    manifest.write(out_dir);
    return result.objective_reached ? kExitOk : kExitFailures;
  });
}

int cmd_train(const GlobalOptions& options,
              std::optional<std::uint32_t> episodes_override) {
  return run_command("train", [&]() {
    config::TrainFileConfig cfg = config::parse_train(read_file(options.config_path));
    const std::uint64_t seed = options.seed.value_or(cfg.script.master_seed);
    cfg.script.master_seed = seed;
    if (episodes_override.has_value()) {
      cfg.train.episodes = *episodes_override;
    }

    const runner::TrainResult trained =
        runner::train_policy(cfg.script, cfg.trainee, cfg.train, seed);

    fs::create_directories(options.out_dir);
    ordered_json resolved = parse_back(config::script_to_json(cfg.script));
    ordered_json doc;
    doc["script"] = resolved;
    doc["trainee"] = cfg.trainee;
    doc["episodes"] = cfg.train.episodes;
    ManifestWriter manifest("train", options, seed, doc);
    const fs::path out_dir(options.out_dir);
    write_file(out_dir / "policy.txt", policy_snapshot_string(trained.policy));
    manifest.add_output("policy.txt");
    write_file(out_dir / "reward_curve.csv", reward_curve_csv(trained.episode_rewards));
    manifest.add_output("reward_curve.csv");
    manifest.write(out_dir);
    return kExitOk;
  });
}

int cmd_optimize(const GlobalOptions& options) {
  return run_command("optimize", [&]() {
    config::OptimizeConfig cfg = config::parse_optimize(read_file(options.config_path));
    const std::uint64_t seed = options.seed.value_or(cfg.script.master_seed);
    cfg.script.master_seed = seed;
    const int workers = parallel::resolve_workers(options.workers);

    optimize::EvalContext ctx;
    ctx.scenario = cfg.script;
    ctx.scammer = cfg.scammer;
    ctx.scammer_policy = pretrained_policy(cfg.script, cfg.scammer,
                                           cfg.policy_snapshot,
                                           cfg.pretrain_episodes, seed);
    ctx.workers = workers;
    ctx.f2_metric = cfg.f2_metric;
    for (std::uint32_t i = 0; i < cfg.seeds_per_eval; ++i) {
      ctx.seeds.push_back(split_seed(seed, "eval", i));
    }
    const std::vector<double> identity_objectives =
        optimize::evaluate_mechanism(mechanism::identity_params(), ctx);
    if (ctx.f2_metric != "utility_loss") {
      // Per-seed identity baselines for the metric-based loss.
      runner::Script identity_script = cfg.script;
      identity_script.mechanism = mechanism::identity_params();
      identity_script.keep_artifacts = false;
      const std::vector<runner::EpisodeResult> base =
          runner::run_batch(identity_script, ctx.seeds, workers);
      for (const auto& episode : base) {
        ctx.f2_identity_baseline.push_back(episode.metric_finals.at(ctx.f2_metric));
      }
    }

    optimize::SearchConfig search;
    search.generations = cfg.generations;
    search.nsga.population = cfg.population;
    search.seed = split_seed(seed, "search");
    const optimize::SearchResult result = optimize::search_mechanisms(search, ctx);

    fs::create_directories(options.out_dir);
    ordered_json doc;
    doc["script"] = parse_back(config::script_to_json(cfg.script));
    doc["scammer"] = cfg.scammer;
    doc["generations"] = cfg.generations;
    doc["population"] = cfg.population;
    doc["seeds_per_eval"] = cfg.seeds_per_eval;
    doc["f2_metric"] = cfg.f2_metric;
    ManifestWriter manifest("optimize", options, seed, doc);

    ordered_json pareto;
    pareto["schema_version"] = config::kSchemaVersion;
    pareto["evaluation_seeds"] = ctx.seeds;
    pareto["identity_objectives"] = {{"f1_scammer_success", identity_objectives[0]},
                                     {"f2_utility_loss", identity_objectives[1]}};
    pareto["front"] = front_json(result.front, ctx, ctx.seeds);
    pareto["knee_index"] = optimize::knee_point(result.front);
    pareto["distinct_genomes_evaluated"] = result.evaluations;
    write_file(fs::path(options.out_dir) / "pareto.json", pareto.dump(2) + "\n");
    manifest.add_output("pareto.json");
    manifest.write(options.out_dir);
    return kExitOk;
  });
}

int cmd_coevolve(const GlobalOptions& options) {
  return run_command("coevolve", [&]() {
    config::CoevolveFileConfig cfg =
        config::parse_coevolve(read_file(options.config_path));
    const std::uint64_t seed = options.seed.value_or(cfg.script.master_seed);
    cfg.script.master_seed = seed;
    const int workers = parallel::resolve_workers(options.workers);

    const agents::QTable initial = pretrained_policy(
        cfg.script, cfg.scammer, cfg.policy_snapshot, cfg.pretrain_episodes, seed);
    const optimize::CoevolveResult result = optimize::coevolve(
        cfg.coevolution, cfg.script, cfg.scammer, initial, seed, workers);

    fs::create_directories(options.out_dir);
    ordered_json doc;
    doc["script"] = parse_back(config::script_to_json(cfg.script));
    doc["scammer"] = cfg.scammer;
    doc["rounds"] = cfg.coevolution.rounds;
    doc["mech_generations"] = cfg.coevolution.mech_generations;
    doc["retrain_episodes"] = cfg.coevolution.retrain_episodes;
    doc["population"] = cfg.coevolution.population;
    doc["seeds_per_eval"] = cfg.coevolution.seeds_per_eval;
    ManifestWriter manifest("coevolve", options, seed, doc);

    std::string history = "round,f1_frozen,f1_retrained,f2\n";
    char row[128];
    for (const auto& record : result.history) {
      std::snprintf(row, sizeof(row), "%u,%.17g,%.17g,%.17g\n", record.round,
                    record.f1_frozen, record.f1_retrained, record.f2);
      history += row;
    }
    const fs::path out_dir(options.out_dir);
    write_file(out_dir / "history.csv", history);
    manifest.add_output("history.csv");

    optimize::EvalContext ctx;
    ctx.scenario = cfg.script;
    ordered_json front;
    front["schema_version"] = config::kSchemaVersion;
    front["front"] = front_json(result.final_front, ctx, result.final_eval_seeds);
    write_file(out_dir / "front.json", front.dump(2) + "\n");
    manifest.add_output("front.json");

    write_file(out_dir / "policy.txt", policy_snapshot_string(result.final_policy));
    manifest.add_output("policy.txt");
    manifest.write(out_dir);
    return kExitOk;
  });
}

int cmd_abtest(const GlobalOptions& options) {
  return run_command("abtest", [&]() {
    config::AbtestConfig cfg = config::parse_abtest(read_file(options.config_path));
    const std::uint64_t seed = options.seed.value_or(cfg.script.master_seed);
    cfg.script.master_seed = seed;
    const int workers = parallel::resolve_workers(options.workers);

    const socialtest::ABTestReport report =
        socialtest::ab_test(cfg.script, cfg.arm_a, cfg.arm_b, cfg.n_seeds,
                            cfg.oracles, seed, workers);

    fs::create_directories(options.out_dir);
    ordered_json doc;
    doc["script"] = parse_back(config::script_to_json(cfg.script));
    doc["n_seeds"] = cfg.n_seeds;
    ManifestWriter manifest("abtest", options, seed, doc);

    ordered_json j;
    j["schema_version"] = config::kSchemaVersion;
    j["arm_a"] = report.arm_a;
    j["arm_b"] = report.arm_b;
    j["seeds"] = report.seeds;
    ordered_json verdicts = ordered_json::array();
    for (const auto& mv : report.verdicts) {
      verdicts.push_back(
          {{"metric", mv.spec.metric},
           {"aggregation", socialtest::to_string(mv.spec.aggregation)},
           {"direction", socialtest::to_string(mv.spec.direction)},
           {"theta", mv.spec.theta},
           {"alpha", mv.spec.alpha},
           {"pass", mv.verdict.pass},
           {"relative_change", mv.verdict.relative_change},
           {"p_value", mv.verdict.p_value},
           {"n_baseline", mv.verdict.n_baseline},
           {"n_candidate", mv.verdict.n_candidate},
           {"degenerate", mv.degenerate}});
    }
    j["verdicts"] = verdicts;
    ordered_json roles;
    for (const auto& [role, pair] : report.role_rewards) {
      roles[role] = {{"a",
                      {{"mean", pair.first.mean},
                       {"stddev", pair.first.stddev},
                       {"n", pair.first.n}}},
                     {"b",
                      {{"mean", pair.second.mean},
                       {"stddev", pair.second.stddev},
                       {"n", pair.second.n}}}};
    }
    j["role_rewards"] = roles;
    j["all_pass"] = report.all_pass();
    write_file(fs::path(options.out_dir) / "report.json", j.dump(2) + "\n");
    manifest.add_output("report.json");
    manifest.write(options.out_dir);
    return report.all_pass() ? kExitOk : kExitFailures;
  });
}

}  // namespace wes::cli
