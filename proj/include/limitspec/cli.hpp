#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "limitspec/io.hpp"
#include "limitspec/limitops.hpp"

namespace limitspec {

enum class Command { spectrum, essential, pseudospectrum, random_spec, limitops, verify };

/// A fully validated job. parse_job_config() checks every field the command
/// needs, so nothing is computed for a malformed document.
struct JobConfig {
  Command command = Command::spectrum;
  std::optional<BandOperator> op;
  std::optional<Grid> grid;

  int theta_samples = 256;
  std::optional<std::int64_t> period;  // spectrum
  double eps = 0.0;                    // pseudospectrum, random-spec
  std::int64_t n = 0;                  // pseudospectrum
  EssentialOptions essential;
  std::vector<cplx> sigma;             // random-spec alphabet

  // limitops
  std::optional<IntegerSequenceSpec> h;
  std::int64_t window = 10;
  std::int64_t steps = 5;
  double tol = 1e-12;
  std::size_t favard_samples = 0;
  std::int64_t favard_n = 100;
  std::uint64_t seed = 0;

  // verify
  bool verify_randprod = false;
  std::optional<BandOperator> limit;
  std::int64_t m = 10;
  cplx lambda, sigma_value, tau;
  std::int64_t radius = 200;

  // file names inside the output directory; empty disables
  std::string json_name, csv_name, svg_name;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitVerifyFailed = 4;

Command parse_command(const std::string& name);
std::string command_name(Command c);

/// Throws ConfigError with the offending field path.
JobConfig parse_job_config(const Json& doc);

struct JobResult {
  int exit_code = kExitOk;
  std::string summary;
  std::optional<SpectralRegion> region;
  nlohmann::ordered_json report;  // limitops and verify
};

/// Computes the job without touching the filesystem.
JobResult compute_job(const JobConfig& config);

/// Computes and writes the artifacts atomically into out_dir.
JobResult run_job(const JobConfig& config, const std::filesystem::path& out_dir);

/// Whole front end: read, validate, run, print the summary line or the
/// diagnostic, and map failures to exit codes.
int run_cli(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<int> threads, std::ostream& out, std::ostream& err);

}  // namespace limitspec
