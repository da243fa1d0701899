#include "ocm/event_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ocm/rng.hpp"

namespace ocm {

void DetectorModel::validate() const {
  if (!(efficiency > 0.0) || efficiency > 1.0) {
    throw std::invalid_argument("DetectorModel: efficiency must be in (0, 1]");
  }
  if (!(dark_rate_per_pulse >= 0.0) || !std::isfinite(dark_rate_per_pulse)) {
    throw std::invalid_argument(
        "DetectorModel: dark_rate_per_pulse must be >= 0");
  }
}

void SimRun::validate() const {
  source.validate();
  fringe.validate();
  geometry.validate();
  detector.validate();
  if ((n_events == 0) == (n_pulses == 0)) {
    throw std::invalid_argument(
        "SimRun: exactly one of n_events and n_pulses must be nonzero");
  }
}

namespace {

// Draws ordered pixel tuples for one source state. Classical photons are
// independent singles draws; N00N and Mixed states need the full joint.
class TupleSampler {
 public:
  TupleSampler(const SimRun& run)
      : n_(run.source.photon_number), d_(run.geometry.pixel_count) {
    if (run.source.kind == SourceKind::Classical) {
      singles_.emplace(singles_distribution(run.fringe, run.geometry));
    } else {
      joint_probs_ = joint_distribution(run.source, run.fringe, run.geometry)
                         .probabilities;
      joint_.emplace(joint_probs_);
    }
  }

  void draw(Rng& rng, std::vector<int>& out) const {
    out.resize(static_cast<std::size_t>(n_));
    if (singles_) {
      for (int j = 0; j < n_; ++j) {
        out[static_cast<std::size_t>(j)] = static_cast<int>((*singles_)(rng));
      }
      return;
    }
    std::size_t flat = (*joint_)(rng);
    for (int j = n_ - 1; j >= 0; --j) {
      out[static_cast<std::size_t>(j)] =
          static_cast<int>(flat % static_cast<std::size_t>(d_));
      flat /= static_cast<std::size_t>(d_);
    }
  }

 private:
  int n_;
  int d_;
  std::vector<double> joint_probs_;
  std::optional<DiscreteSampler> joint_;
  std::optional<DiscreteSampler> singles_;
};

void thin_by_efficiency(Rng& rng, double efficiency,
                        const std::vector<int>& tuple,
                        std::vector<int>& survivors) {
  survivors.clear();
  if (efficiency >= 1.0) {
    survivors = tuple;
    return;
  }
  for (const int p : tuple) {
    if (rng.bernoulli(efficiency)) survivors.push_back(p);
  }
}

bool has_repeat(const std::vector<int>& sorted_pixels) {
  return std::adjacent_find(sorted_pixels.begin(), sorted_pixels.end()) !=
         sorted_pixels.end();
}

void collapse_to_distinct(std::vector<int>& sorted_pixels) {
  sorted_pixels.erase(
      std::unique(sorted_pixels.begin(), sorted_pixels.end()),
      sorted_pixels.end());
}

}  // namespace

SampledEvents sample_events(const SimRun& run, bool keep_partials, int streams) {
  run.validate();
  if (streams < 1) {
    throw std::invalid_argument("sample_events: streams must be >= 1");
  }

  const TupleSampler sampler(run);
  const int n = run.source.photon_number;
  const double efficiency = run.detector.efficiency;
  const bool resolving = run.detector.number_resolving;
  const std::uint64_t total = run.generation_count();

  SampledEvents out;
  if (efficiency >= 1.0 && resolving) out.events.reserve(total);

  std::vector<int> tuple;
  std::vector<int> survivors;
  std::uint64_t offset = 0;
  for (int stream = 0; stream < streams; ++stream) {
    const std::uint64_t share =
        total / static_cast<std::uint64_t>(streams) +
        (static_cast<std::uint64_t>(stream) <
                 total % static_cast<std::uint64_t>(streams)
             ? 1
             : 0);
    Rng rng(run.seed, static_cast<std::uint64_t>(stream));
    for (std::uint64_t local = 0; local < share; ++local) {
      const std::uint64_t pulse_id = offset + local;
      sampler.draw(rng, tuple);
      thin_by_efficiency(rng, efficiency, tuple, survivors);
      ++out.report.generated;
      std::sort(survivors.begin(), survivors.end());
      if (static_cast<int>(survivors.size()) == n) {
        if (!resolving && has_repeat(survivors)) {
          ++out.report.dropped_same_pixel;
          if (keep_partials) {
            collapse_to_distinct(survivors);
            out.partials.push_back({pulse_id, survivors});
            ++out.report.partial_events;
          }
        } else {
          ++out.report.detected;
          out.events.push_back({pulse_id, survivors});
        }
      } else {
        ++out.report.dropped_inefficiency;
        if (keep_partials && !survivors.empty()) {
          if (!resolving) collapse_to_distinct(survivors);
          out.partials.push_back({pulse_id, survivors});
          ++out.report.partial_events;
        }
      }
    }
    offset += share;
  }
  return out;
}

std::vector<std::uint64_t> sample_singles_calibration(const SimRun& run,
                                                      CalibrationBeam beam,
                                                      double expected_photons) {
  run.validate();
  if (!(expected_photons >= 0.0) || !std::isfinite(expected_photons)) {
    throw std::invalid_argument(
        "sample_singles_calibration: expected_photons must be >= 0");
  }
  if (beam == CalibrationBeam::Background &&
      (run.source.kind != SourceKind::Mixed ||
       run.source.background_fraction <= 0.0)) {
    throw std::invalid_argument(
        "sample_singles_calibration: source has no background constituent");
  }

  const std::vector<double> singles =
      singles_distribution(run.fringe, run.geometry);
  // Separate calibration stream per beam, away from the event streams.
  const std::uint64_t tag =
      0x9e3779b97f4a7c15ULL * (beam == CalibrationBeam::Primary ? 1ULL : 2ULL);
  Rng rng(run.seed ^ tag);
  std::vector<std::uint64_t> counts(singles.size());
  for (std::size_t i = 0; i < singles.size(); ++i) {
    counts[i] =
        rng.poisson(expected_photons * run.detector.efficiency * singles[i]);
  }
  return counts;
}

SampledPulses sample_pulse_stream(const SimRun& run, bool include_empty) {
  run.validate();
  if (run.n_pulses == 0) {
    throw std::invalid_argument(
        "sample_pulse_stream: run must be configured with n_pulses");
  }

  const TupleSampler sampler(run);
  const int n = run.source.photon_number;
  const double efficiency = run.detector.efficiency;
  const double dark_p = run.detector.dark_rate_per_pulse > 0.0
                            ? 1.0 - std::exp(-run.detector.dark_rate_per_pulse)
                            : 0.0;

  SampledPulses out;
  Rng rng(run.seed);
  std::vector<int> tuple;
  std::vector<int> survivors;
  for (std::uint64_t pulse = 0; pulse < run.n_pulses; ++pulse) {
    sampler.draw(rng, tuple);
    thin_by_efficiency(rng, efficiency, tuple, survivors);
    ++out.report.generated;
    std::sort(survivors.begin(), survivors.end());
    std::vector<int> fired = survivors;
    collapse_to_distinct(fired);
    if (static_cast<int>(survivors.size()) == n) {
      if (fired.size() == survivors.size()) {
        ++out.report.detected;
      } else {
        ++out.report.dropped_same_pixel;
      }
    } else {
      ++out.report.dropped_inefficiency;
    }
    if (dark_p > 0.0) {
      for (int pixel = 0; pixel < run.geometry.pixel_count; ++pixel) {
        if (rng.bernoulli(dark_p)) {
          ++out.report.dark_fires;
          const auto it = std::lower_bound(fired.begin(), fired.end(), pixel);
          if (it == fired.end() || *it != pixel) fired.insert(it, pixel);
        }
      }
    }
    if (!fired.empty() || include_empty) {
      out.records.push_back({pulse, std::move(fired)});
    }
  }
  return out;
}

std::vector<PulseRecord> to_pulse_records(const std::vector<DetectionEvent>& events) {
  std::vector<PulseRecord> records;
  records.reserve(events.size());
  std::uint64_t last_id = 0;
  bool first = true;
  for (const DetectionEvent& event : events) {
    if (!first && event.pulse_id < last_id) {
      throw std::invalid_argument(
          "to_pulse_records: pulse ids must be non-decreasing");
    }
    first = false;
    last_id = event.pulse_id;
    std::vector<int> fired = event.pixels;
    std::sort(fired.begin(), fired.end());
    if (has_repeat(fired)) {
      throw std::invalid_argument(
          "to_pulse_records: repeated pixel fires cannot be represented");
    }
    records.push_back({event.pulse_id, std::move(fired)});
  }
  return records;
}

}  // namespace ocm
