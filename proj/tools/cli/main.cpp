#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"torus-lab: random hyperbolic toral maps, cones, measures and curves"};
  std::string command;
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  std::string names;
  for (const auto& n : torus_lab::cli::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "One of: " + names)->required()->check(
      CLI::IsMember(torus_lab::cli::command_names()));
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Overrides the config seed");
  app.add_option("--threads", threads, "Worker threads (0 = TORUS_LAB_THREADS or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  torus_lab::cli::RunOptions options;
  if (seed_opt->count() > 0) options.seed = seed;
  options.threads = threads;
  return torus_lab::cli::run(command, config, out, options, std::cerr);
}
