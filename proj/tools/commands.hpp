#pragma once

#include <string>

#include "config.hpp"

namespace loadcast::cli {

/// Commands print a short summary to stdout and write their artifacts under
/// cfg.out_dir. They throw loadcast::Error on failure; main maps the error
/// kind onto the exit code.
void cmd_synth_data(const RunConfig& cfg);
void cmd_pso_search(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path,
                  const std::string& split);
void cmd_forecast(const RunConfig& cfg, const std::string& checkpoint_path);
void cmd_compare(const RunConfig& cfg);

}  // namespace loadcast::cli
