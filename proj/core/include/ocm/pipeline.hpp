#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocm/accidentals.hpp"
#include "ocm/event_sim.hpp"
#include "ocm/fit.hpp"

namespace ocm {

// Invalid configuration input (bad JSON, unknown keys, out-of-range
// values). The CLI maps this to its own exit code, distinct from runtime
// failures.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class K1Source {
  FromConfig,      // exact spatial frequency from the fringe settings
  FromSinglesFit,  // companion single-photon run, frequency left free
  Explicit,        // user supplied value
};

struct AnalysisOptions {
  bool accidental_subtraction = false;
  K1Source k1_source = K1Source::FromConfig;
  double k1_explicit = 0.0;  // rad per pixel pitch, used with K1Source::Explicit
  std::uint64_t singles_fit_events = 1'000'000;
  // Pulse count the acquisition is assumed to span; sets the per-pulse
  // background rates for the accidental estimate. Defaults to run.n_pulses
  // when the run is pulse-configured.
  double assumed_pulses = 0.0;
  // Pulses of the singles calibration exposure; defaults to assumed_pulses.
  double calibration_pulses = 0.0;
  bool write_events = true;
};

struct ExperimentConfig {
  std::string label = "run";
  SimRun run;
  AnalysisOptions analysis;
  std::filesystem::path output_dir = "out";
};

// Strict JSON parsers: unknown keys are rejected, dimensioned quantities
// carry their unit in the key name (wavelength_nm, pitch_um, ...). Throw
// ConfigError on any problem.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Output directory override through the environment.
inline constexpr const char* kOutputDirEnvVar = "OCMSIM_OUTPUT_DIR";
std::filesystem::path resolve_output_dir(const std::filesystem::path& configured);

struct RunArtifacts {
  std::filesystem::path directory;
  SimReport report;
  double k1 = 0.0;  // rad per pixel pitch used for the constrained fit
  CentroidHistogram raw;
  std::optional<CentroidHistogram> singles;
  std::optional<CentroidHistogram> accidentals;
  std::optional<CentroidHistogram> corrected;
  FitResult fit_raw;
  std::optional<FitResult> fit_singles;
  std::optional<FitResult> fit_corrected;
  std::vector<std::filesystem::path> files;
};

// Full simulate-project-fit-report chain. Artifacts are written under
// output_dir/label. Stage failures clean up partially written files and
// rethrow with the stage name prefixed; configuration problems surface as
// ConfigError before anything is written.
RunArtifacts run_experiment(const ExperimentConfig& config);

// Canned demonstration configurations. Overrides of 0 (or an empty path)
// keep the preset defaults.
std::vector<std::string> preset_names();

struct PresetResult {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
};

PresetResult run_preset(const std::string& name,
                        const std::filesystem::path& output_dir = {},
                        std::uint64_t seed = 0, std::uint64_t events = 0);

}  // namespace ocm
