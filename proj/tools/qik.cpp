#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

#include "commands.hpp"

int main(int argc, char** argv) {
  auto log = spdlog::stderr_color_mt("qik");
  spdlog::set_default_logger(log);
  spdlog::set_pattern("qik: %l: %v");
  const char* lvl = std::getenv("QIK_LOG");
  qik::cli::setLogLevel(lvl ? lvl : "warn");

  qik::cli::RunConfig cfg;
  cfg.jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  double tol = 0;

  CLI::App app{"Numerics for hyperkähler implosion quivers and Nahm data"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "input JSON file, - for stdin")->default_val("-");
    sub->add_option("-o,--output", cfg.output, "output file, - for stdout");
    sub->add_option("--tol", tol, "tolerance (classify 1e-7, solve 1e-10)");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* classify = app.add_subcommand("classify", "stratum label of solved quivers");
  common(classify);
  classify->add_option("--samples", cfg.samples, "rotations sampled for the stability verdict");
  classify->add_option("--jobs", cfg.jobs, "worker threads for array input")->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "flow quivers to the real moment level");
  common(solve);
  solve->add_option("--max-iter", cfg.maxIter, "iteration cap");
  solve->add_option("--jobs", cfg.jobs, "worker threads for array input")->check(CLI::PositiveNumber);

  auto* nahm = app.add_subcommand("nahm", "integrate Nahm's equations and fit the asymptotics");
  common(nahm);
  nahm->add_option("--tmax", cfg.tmax, "integration end");
  nahm->add_option("--step", cfg.step, "RK4 step");
  nahm->add_option("--c", cfg.c, "constant in the Bielawski pseudometric");
  nahm->add_option("--stride", cfg.stride, "keep every k-th sample in the output")->check(CLI::PositiveNumber);
  nahm->add_option("--plots", cfg.plotDir, "directory for SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qik::cli::kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--tol")) cfg.tol = tol;
  return qik::cli::run(cfg);
}
