#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cryf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CR Yamabe flow on the Heisenberg nilmanifold"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool overwrite = false;
  for (const char* name : {"run-flow", "check-identities", "convergence-study", "soliton-check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_flag("--overwrite", overwrite, "replace existing output files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    // Help is a success; every other parse failure is a usage error.
    return code == 0 ? cryf::kExitOk : cryf::kExitEnvironmentFailure;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return cryf::run_command(command, config_path, {out_dir, overwrite}, std::cout);
}
