#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "glucolab/cli/commands.hpp"
#include "glucolab/util/errors.hpp"

namespace {

using namespace glucolab;

int run(int argc, char** argv) {
  CLI::App app{"glucolab: offline reinforcement learning for basal insulin control"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "run";
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (INI)")->required();
    cmd->add_option("--out", out_dir, "run directory for artifacts and manifests");
    cmd->add_option("--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber);
    cmd->add_option("--seed-override", seed_override, "replace the training seeds with one seed");
  };

  struct Command {
    const char* name;
    const char* help;
    cli::Manifest (*fn)(const cli::RunConfig&, const cli::CommandOptions&);
  };
  const Command commands[] = {
      {"tune-pid", "grid-search PID gains per patient", cli::cmd_tune_pid},
      {"generate", "collect demonstrator datasets", cli::cmd_generate},
      {"train", "train offline policies", cli::cmd_train},
      {"evaluate", "evaluate the tuned PID and trained policies", cli::cmd_evaluate},
      {"scenario", "run a scenario experiment over its grid", cli::cmd_scenario},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }
  auto* verify = app.add_subcommand("verify", "re-hash a run directory against its manifests");
  verify->add_option("--out", out_dir, "run directory to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (verify->parsed()) {
    cli::cmd_verify(out_dir, &std::cout);
    return 0;
  }
  for (const auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    cli::RunConfig config = cli::load_run_config(config_path);
    if (seed_override) cli::apply_seed_override(config, *seed_override);
    cli::CommandOptions options;
    options.out_dir = out_dir;
    options.jobs = jobs;
    options.log = &std::cerr;
    const auto manifest = command->fn(config, options);
    std::cout << command->name << ": wrote " << manifest.outputs.size() << " file(s) to " << out_dir
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const glucolab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
