#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "heislift/errors.hpp"
#include "heislift/pipeline.hpp"

using namespace heislift;

namespace {

int jobs_from_env() {
  if (const char* env = std::getenv("HEISLIFT_JOBS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "heislift: ignoring HEISLIFT_JOBS='" << env << "'\n";
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobolev extension of Lipschitz maps into the Heisenberg group"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "build the extension and run the enabled checks");
  run->add_option("--config", config_path, "JSON config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override analysis.seed");
  auto* jobs_opt = run->add_option("--jobs", jobs, "worker threads (default: HEISLIFT_JOBS or 1)");
  auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides config)");

  auto* check = app.add_subcommand("check", "validate config and input without building");
  check->add_option("--config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (check->parsed()) {
    const CheckReport r = check_config(config_path);
    std::cout << nlohmann::json(r).dump(2) << "\n";
    if (r.ok) return kExitOk;
    for (const auto& e : r.errors) {
      if (e.rfind("extend:", 0) == 0) return kExitUnsupportedFill;
    }
    return kExitConfig;
  }

  try {
    RunConfig config = load_config(config_path);
    if (*seed_opt) config.analysis.seed = seed;
    if (*out_opt) config.output = out_dir;
    if (!*jobs_opt) jobs = jobs_from_env();
    const RunResult result = run_pipeline(config, jobs);
    for (const auto& c : result.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    std::cout << "artifacts in " << config.output.string() << "\n";
    return result.all_passed() ? kExitOk : kExitChecksFailed;
  } catch (const ConfigError& e) {
    std::cerr << "heislift: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedFill& e) {
    std::cerr << "heislift: extend: " << e.what() << "\n";
    return kExitUnsupportedFill;
  } catch (const ConstructionError& e) {
    std::cerr << "heislift: triangulate: " << e.what() << "\n";
    return kExitConstruction;
  } catch (const std::exception& e) {
    std::cerr << "heislift: " << e.what() << "\n";
    return kExitOther;
  }
}
