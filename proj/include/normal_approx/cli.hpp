#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "normal_approx/gen.hpp"
#include "normal_approx/spectra.hpp"
#include "normal_approx/triangular.hpp"

namespace normal_approx::cli {

enum class Command { certify, fraas, split, spread, counterexample, generate };
enum class OutputFormat { csv, json };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

// Inclusive integer range; each trial draws its own value uniformly.
// Written "8" or "2:12".
struct IntRange {
  long lo = 1;
  long hi = 1;
};
IntRange parse_range(std::string_view text);
std::string to_string(const IntRange& r);

struct Tolerances {
  double commutation = kDefaultCommutationTolerance;
  double schur = kDefaultSchurTolerance;
  int spread_grid = kDefaultSpreadGrid;
  int spread_refinement = kDefaultSpreadRefinement;
  double normality = 1e-8;
  double kernel = kDefaultKernelTolerance;  // split: chained-kernel rank cut
};

struct ExperimentConfig {
  Command command = Command::certify;
  // Default depends on the command: poly_in_one for certify,
  // planted_normal_scalar_sum for fraas, nilpotent_plus_normal for split.
  std::optional<GeneratorKind> generator;
  std::string input;      // family file (matrix file for spread)
  std::string spec_file;  // generate: GeneratorSpec JSON
  IntRange n{8, 8};
  IntRange k{1, 1};
  IntRange n_qn{3, 3};
  IntRange n_n{2, 2};
  double scale = 1.0;
  std::uint64_t seed = 0;
  long trials = 1;
  Tolerances tolerances;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  bool suppress_timestamp = false;
  unsigned threads = 0;  // 0: available parallelism
};

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificationFailure = 1;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitSolverFailure = 3;

// Applies the fields present in a config-file object on top of `base`.
// Throws ParseError on unknown keys or bad values.
ExperimentConfig apply_config_json(const nlohmann::json& j, ExperimentConfig base);

// Throws ParseError when the config is unusable (trials < 1, missing input).
void validate(const ExperimentConfig& config);

// Pool size: the requested count (or available parallelism) capped by
// NORMAL_APPROX_THREADS and by the trial count.
unsigned worker_count(const ExperimentConfig& config);

// Executes the config, writing reports to config.output (or `out`) and the
// summary to `out`. Diagnostics go to `err`. Returns an exit status.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Full command line: parse, merge --config, run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace normal_approx::cli
