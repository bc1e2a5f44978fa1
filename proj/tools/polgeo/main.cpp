#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Policy optimization over stabilizing feedback controllers"};
  std::string task;
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("task", task,
                 "lqr_gd | hewer | structured_gd | lqg_gd | lqg_rgd | hinf_eval | hinf_descent | zo_gd | landscape | "
                 "connectivity | dare")
      ->required();
  app.add_option("--config", config, "experiment config (JSON)")->required();
  app.add_option("--out", out, "output directory (created if missing)");
  app.add_option("--seed", seed, "overrides the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : polgeo::cli::kExitConfig;
  }
  return polgeo::cli::run_command(task, config, out, seed);
}
