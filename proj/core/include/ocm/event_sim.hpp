#pragma once

#include <cstdint>
#include <vector>

#include "ocm/fringe.hpp"
#include "ocm/projector.hpp"

namespace ocm {

// Detection chain model. efficiency applies per photon; a detector that is
// not number resolving loses events where two photons hit the same pixel.
// dark_rate_per_pulse is the mean number of dark fires per pixel per pulse
// and only enters the pulse-stream path.
struct DetectorModel {
  double efficiency = 1.0;
  bool number_resolving = false;
  double dark_rate_per_pulse = 0.0;

  void validate() const;
};

// Full description of one simulated acquisition. Exactly one of n_events
// and n_pulses must be nonzero; both count generated source states (one
// state per pulse), so with a lossless number-resolving detector n_events
// equals the number of detected events.
struct SimRun {
  SourceModel source;
  FringeConfig fringe;
  ArrayGeometry geometry;
  DetectorModel detector;
  std::uint64_t n_events = 0;
  std::uint64_t n_pulses = 0;
  std::uint64_t seed = 1;

  std::uint64_t generation_count() const { return n_events != 0 ? n_events : n_pulses; }
  void validate() const;
};

// Bookkeeping for one sampling pass. generated always equals
// detected + dropped_same_pixel + dropped_inefficiency.
struct SimReport {
  std::uint64_t generated = 0;
  std::uint64_t detected = 0;
  std::uint64_t dropped_same_pixel = 0;
  std::uint64_t dropped_inefficiency = 0;
  std::uint64_t partial_events = 0;
  std::uint64_t dark_fires = 0;

  bool consistent() const {
    return generated == detected + dropped_same_pixel + dropped_inefficiency;
  }
};

struct SampledEvents {
  std::vector<DetectionEvent> events;
  std::vector<DetectionEvent> partials;
  SimReport report;
};

// Samples detected N-photon events. Each generated state draws a pixel
// tuple from the exact joint distribution, thins photons by the detector
// efficiency, and applies the same-pixel rule. With keep_partials the
// surviving photons of incomplete events are returned too (collapsed to
// distinct pixels for non-number-resolving detectors). streams > 1 splits
// generation across independent RNG substreams; output is the
// concatenation in stream order and is deterministic for a given
// (seed, streams) pair. Dark counts are not part of this path; use
// sample_pulse_stream for them.
SampledEvents sample_events(const SimRun& run, bool keep_partials = false,
                            int streams = 1);

// Which constituent of the source a singles calibration looks at. Primary
// is the main beam; Background is the classical admixture of a Mixed
// source and requires background_fraction > 0.
enum class CalibrationBeam { Primary, Background };

// Per-pixel Poisson singles counts for a calibration exposure of the given
// expected photon number incident on the array. Counts follow the
// single-photon fringe pattern scaled by the detector efficiency.
std::vector<std::uint64_t> sample_singles_calibration(const SimRun& run,
                                                      CalibrationBeam beam,
                                                      double expected_photons);

// Raw per-pulse channel fires, the form a click camera delivers. fired
// lists the distinct channels that fired, sorted, possibly empty.
struct PulseRecord {
  std::uint64_t pulse_id = 0;
  std::vector<int> fired;
};

struct SampledPulses {
  std::vector<PulseRecord> records;
  SimReport report;
};

// Samples one source state per pulse and records which channels fired,
// including dark fires. Requires the run to be configured with n_pulses.
// Pulses with no fires are kept only when include_empty is set.
SampledPulses sample_pulse_stream(const SimRun& run, bool include_empty = false);

// Converts detected events to pulse records (one record per event).
// Events must carry distinct pixels and non-decreasing pulse ids.
std::vector<PulseRecord> to_pulse_records(const std::vector<DetectionEvent>& events);

}  // namespace ocm
