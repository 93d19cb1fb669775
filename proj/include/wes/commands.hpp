#pragma once
// CLI subcommand implementations. Each reads one strict-JSON config, runs,
// and writes its outputs plus a run manifest under --out. Exit codes:
// 0 success / objective met, 1 completed with failures, 2 invalid input.

#include <cstdint>
#include <optional>
#include <string>

namespace wes::cli {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;   // overrides the config's master seed
  int workers = 0;                     // 0: WES_SIM_WORKERS or hardware
};

int cmd_gen_graph(const GlobalOptions& options);
int cmd_run(const GlobalOptions& options);
int cmd_train(const GlobalOptions& options,
              std::optional<std::uint32_t> episodes_override);
int cmd_optimize(const GlobalOptions& options);
int cmd_coevolve(const GlobalOptions& options);
int cmd_abtest(const GlobalOptions& options);

}  // namespace wes::cli
