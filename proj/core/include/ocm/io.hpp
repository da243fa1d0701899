#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ocm/coincidence.hpp"
#include "ocm/event_sim.hpp"
#include "ocm/fit.hpp"
#include "ocm/projector.hpp"
#include "ocm/scaling.hpp"

// Plain-text artifact formats. All files are tab separated with '#' header
// lines, doubles are written in shortest round-trip form, and writers are
// deterministic: identical inputs give byte-identical files.
namespace ocm::io {

std::string format_double(double value);

struct EventStream {
  int photon_number = 0;
  int pixel_count = 0;
  std::vector<DetectionEvent> events;
};

void write_event_stream(const std::filesystem::path& path, const EventStream& stream);
EventStream read_event_stream(const std::filesystem::path& path);

struct PulseStream {
  int channel_count = 0;
  std::uint64_t n_pulses = 0;  // true pulse count; empty pulses may be omitted from records
  std::vector<PulseRecord> records;
};

void write_pulse_stream(const std::filesystem::path& path, const PulseStream& stream);
PulseStream read_pulse_stream(const std::filesystem::path& path);

void write_histogram(const std::filesystem::path& path, const CentroidHistogram& hist);
CentroidHistogram read_histogram(const std::filesystem::path& path);

void write_fit_report(const std::filesystem::path& path, const FitResult& fit);

void write_joint_map(const std::filesystem::path& path, const JointMap2D& map);
JointMap2D read_joint_map(const std::filesystem::path& path);

void write_scaling_table(const std::filesystem::path& path,
                         std::span<const VisibilityPoint> points);
std::vector<VisibilityPoint> read_scaling_table(const std::filesystem::path& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(const std::filesystem::path& path, const KeyValues& items);
KeyValues read_key_values(const std::filesystem::path& path);

}  // namespace ocm::io
