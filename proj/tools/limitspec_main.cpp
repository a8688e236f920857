#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "limitspec/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectra, essential spectra and pseudospectra of band operators"};
  std::string config;
  std::string out_dir = ".";
  std::optional<int> threads;
  app.add_option("--config", config, "job config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (falls back to LIMITSPEC_THREADS)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : limitspec::kExitConfig;
  }

  if (!threads) {
    if (const char* env = std::getenv("LIMITSPEC_THREADS"); env && *env) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        std::cerr << "config error: LIMITSPEC_THREADS must be an integer\n";
        return limitspec::kExitConfig;
      }
    }
  }
  return limitspec::run_cli(config, out_dir, threads, std::cout, std::cerr);
}
