// Command-line front end: ringform <verb> --config <file> --out <dir> [--seed N] [--quiet]
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ringform/errors.hpp"
#include "ringform/experiment.hpp"

namespace {
constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formation control of reduced attitudes on ring graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  const std::vector<std::pair<const char*, const char*>> verbs = {
      {"simulate", "integrate one closed-loop trajectory"},
      {"sweep", "run simulate over a range of seeds"},
      {"classify-eq", "linearize a great-circle equilibrium and classify its spectrum"},
      {"bound-audit", "check the distance/W inequalities on random states"},
  };
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file (flat JSON object)")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    const auto verb = ringform::app::parse_verb(app.get_subcommands().front()->get_name());
    const auto config = ringform::app::load_config(config_path);
    const auto spec = ringform::app::parse_spec(verb, config, seed);
    ringform::app::run(spec, out_dir, quiet ? nullptr : &std::cout);
  } catch (const ringform::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const ringform::SamplingError& e) {
    std::cerr << "sampling error: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const ringform::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const ringform::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
