#include "beamid/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Load identification for a damped Euler-Bernoulli beam from its end slopes"};
  app.set_version_flag("--version", beamid::kVersion);
  app.require_subcommand(1);

  beamid::CommandOptions opt;
  std::string config, out, ct;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"forward", "Solve the forward problem and write outputs, energy balance and field"},
      {"verify", "Run the randomized inequality, duality and gradient checks"},
      {"invert", "Reconstruct the load from end-slope measurements"},
      {"scenario", "Generate a load scenario and its (optionally noisy) measurements"},
  };
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (default: output.dir or ./out)");
    cmd->add_option("--seed", seed, "random seed (overrides run.seed)");
    cmd->add_option("--ct-variant", ct, "C_T reading used for C_0 and L_G")
        ->check(CLI::IsMember({"literal", "corrected"}));
    cmd->add_option("--set", sets, "extra key=value override, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : beamid::kExitConfigError;
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--config")) opt.config_path = config;
  if (active->count("--out")) opt.out_dir = out;
  if (active->count("--seed")) opt.seed = seed;
  if (active->count("--ct-variant")) opt.ct_variant = ct;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "config error: --set expects key=value, got '" << kv << "'\n";
      return beamid::kExitConfigError;
    }
    opt.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return beamid::run_command(active->get_name(), opt, std::cout, std::cerr);
}
