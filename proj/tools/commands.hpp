#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace haad::cli {

// Exit codes by error category.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kConfig = 3,
  kParse = 4,
  kIo = 5,
  kCompatibility = 6,
  kContract = 7,
  kDivergence = 8,
};

// Each command writes the resolved-config snapshot once its inputs are validated, with
// values fixed by loaded checkpoints filled in.
void cmd_synth(RunConfig config, std::ostream& log);
void cmd_pretrain_diffusion(RunConfig config, std::ostream& log);
void cmd_train(RunConfig config, std::ostream& log);
void cmd_eval(RunConfig config, std::ostream& log);
// Prints the anomaly score on `out`.
void cmd_score(RunConfig config, std::ostream& out, std::ostream& log);
void cmd_sweep(RunConfig config, std::ostream& log);
void cmd_export_embeddings(RunConfig config, std::ostream& log);

// Parses argv, resolves the config, dispatches and maps errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace haad::cli
