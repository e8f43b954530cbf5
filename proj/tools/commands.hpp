#pragma once

#include <optional>
#include <string>

namespace qik::cli {

enum ExitCode { kOk = 0, kInputError = 1, kPrecondition = 2, kInconclusive = 3 };

struct RunConfig {
  std::string command;
  std::string input = "-";
  std::string output = "-";
  std::optional<double> tol;  // per-command default when unset
  unsigned long long seed = 0;
  std::string format = "json";
  int jobs = 1;
  int samples = 0;     // classify: stability sampling, 0 skips it
  int maxIter = 5000;  // solve
  double tmax = 50;    // nahm
  double step = 0.01;
  double c = 1.0;
  int stride = 10;      // nahm: keep every stride-th sample in the written solution
  std::string plotDir;  // nahm: SVG output directory, empty for none
};

struct CommandResult {
  int code = kOk;
  std::string output;
};

CommandResult cmdClassify(const RunConfig& cfg, const std::string& text);
CommandResult cmdSolve(const RunConfig& cfg, const std::string& text);
CommandResult cmdNahm(const RunConfig& cfg, const std::string& text);

// trace, debug, info, warn, error or off.
void setLogLevel(const std::string& level);

// Dispatches on cfg.command; reads cfg.input, writes cfg.output and returns
// the exit code. Messages go to the log.
int run(const RunConfig& cfg);

}  // namespace qik::cli
