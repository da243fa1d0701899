#include "ocm/projector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocm {

double CentroidHistogram::total_counts() const {
  double total = 0.0;
  for (const double c : counts) total += c;
  return total;
}

void CentroidHistogram::validate() const {
  if (photon_number < 1) {
    throw std::invalid_argument("CentroidHistogram: photon_number must be >= 1");
  }
  if (pixel_count < 2) {
    throw std::invalid_argument("CentroidHistogram: pixel_count must be >= 2");
  }
  if (!(pitch > 0.0)) {
    throw std::invalid_argument("CentroidHistogram: pitch must be positive");
  }
  const std::size_t bins = static_cast<std::size_t>(bin_count());
  if (counts.size() != bins || sigma.size() != bins) {
    throw std::invalid_argument(
        "CentroidHistogram: counts/sigma size must equal "
        "photon_number * (pixel_count - 1) + 1");
  }
  for (const double s : sigma) {
    if (!(s >= 0.0)) {
      throw std::invalid_argument("CentroidHistogram: sigma must be >= 0");
    }
  }
}

namespace {

CentroidHistogram empty_histogram(int photon_number, const ArrayGeometry& geometry) {
  CentroidHistogram hist;
  hist.photon_number = photon_number;
  hist.pixel_count = geometry.pixel_count;
  hist.pitch = geometry.pitch;
  hist.origin = geometry.origin;
  hist.counts.assign(static_cast<std::size_t>(hist.bin_count()), 0.0);
  hist.sigma.assign(static_cast<std::size_t>(hist.bin_count()), 0.0);
  return hist;
}

}  // namespace

CentroidHistogram project_distribution(const JointDistribution& joint,
                                       const ArrayGeometry& geometry) {
  geometry.validate();
  if (joint.pixel_count != geometry.pixel_count) {
    throw std::invalid_argument(
        "project_distribution: joint distribution and geometry disagree on "
        "pixel_count");
  }
  CentroidHistogram hist = empty_histogram(joint.photon_number, geometry);
  for_each_tuple(joint.photon_number, joint.pixel_count,
                 [&](std::span<const int>, std::size_t flat, int sum) {
                   hist.counts[static_cast<std::size_t>(sum)] +=
                       joint.probabilities[flat];
                 });
  return hist;
}

CentroidHistogram project_events(std::span<const DetectionEvent> events,
                                 int photon_number,
                                 const ArrayGeometry& geometry) {
  geometry.validate();
  if (photon_number < 1) {
    throw std::invalid_argument("project_events: photon_number must be >= 1");
  }
  CentroidHistogram hist = empty_histogram(photon_number, geometry);
  for (const DetectionEvent& event : events) {
    if (static_cast<int>(event.pixels.size()) != photon_number) {
      throw std::invalid_argument(
          "project_events: event arity does not match photon_number");
    }
    int sum = 0;
    for (const int p : event.pixels) {
      if (p < 0 || p >= geometry.pixel_count) {
        throw std::invalid_argument("project_events: pixel index out of range");
      }
      sum += p;
    }
    hist.counts[static_cast<std::size_t>(sum)] += 1.0;
  }
  for (std::size_t s = 0; s < hist.counts.size(); ++s) {
    hist.sigma[s] = std::sqrt(hist.counts[s]);
  }
  return hist;
}

CentroidHistogram merge_histograms(const CentroidHistogram& a,
                                   const CentroidHistogram& b) {
  a.validate();
  b.validate();
  if (a.photon_number != b.photon_number || a.pixel_count != b.pixel_count ||
      a.pitch != b.pitch || a.origin != b.origin) {
    throw std::invalid_argument(
        "merge_histograms: histograms have incompatible binning");
  }
  CentroidHistogram merged = a;
  for (std::size_t s = 0; s < merged.counts.size(); ++s) {
    merged.counts[s] += b.counts[s];
    merged.sigma[s] = std::hypot(a.sigma[s], b.sigma[s]);
  }
  return merged;
}

AbsorberSelection absorber_diagonal(const JointDistribution& joint) {
  AbsorberSelection selection;
  selection.pixel_weights.assign(static_cast<std::size_t>(joint.pixel_count), 0.0);
  std::vector<int> diag(static_cast<std::size_t>(joint.photon_number));
  for (int i = 0; i < joint.pixel_count; ++i) {
    std::fill(diag.begin(), diag.end(), i);
    const double w = joint.at(diag);
    selection.pixel_weights[static_cast<std::size_t>(i)] = w;
    selection.efficiency += w;
  }
  return selection;
}

std::vector<DetectionEvent> absorber_select(std::span<const DetectionEvent> events) {
  std::vector<DetectionEvent> kept;
  for (const DetectionEvent& event : events) {
    if (event.pixels.empty()) continue;
    const bool same = std::all_of(
        event.pixels.begin(), event.pixels.end(),
        [&](int p) { return p == event.pixels.front(); });
    if (same) kept.push_back(event);
  }
  return kept;
}

JointMap2D joint_map_2d(const JointDistribution& joint) {
  if (joint.photon_number != 2) {
    throw std::invalid_argument("joint_map_2d: requires a two-photon joint");
  }
  JointMap2D map;
  map.pixel_count = joint.pixel_count;
  map.values = joint.probabilities;
  // Symmetrize so the map shows unordered-pair weight off the diagonal.
  for (int i = 0; i < map.pixel_count; ++i) {
    for (int j = i + 1; j < map.pixel_count; ++j) {
      const std::size_t ij = static_cast<std::size_t>(i) *
                                 static_cast<std::size_t>(map.pixel_count) +
                             static_cast<std::size_t>(j);
      const std::size_t ji = static_cast<std::size_t>(j) *
                                 static_cast<std::size_t>(map.pixel_count) +
                             static_cast<std::size_t>(i);
      const double w = map.values[ij] + map.values[ji];
      map.values[ij] = w;
      map.values[ji] = w;
    }
  }
  return map;
}

JointMap2D joint_map_2d(std::span<const DetectionEvent> events, int pixel_count) {
  if (pixel_count < 2) {
    throw std::invalid_argument("joint_map_2d: pixel_count must be >= 2");
  }
  JointMap2D map;
  map.pixel_count = pixel_count;
  map.values.assign(
      static_cast<std::size_t>(pixel_count) * static_cast<std::size_t>(pixel_count),
      0.0);
  for (const DetectionEvent& event : events) {
    if (event.pixels.size() != 2) {
      throw std::invalid_argument("joint_map_2d: events must be two-photon");
    }
    const int a = event.pixels[0];
    const int b = event.pixels[1];
    if (a < 0 || a >= pixel_count || b < 0 || b >= pixel_count) {
      throw std::invalid_argument("joint_map_2d: pixel index out of range");
    }
    map.values[static_cast<std::size_t>(a) * static_cast<std::size_t>(pixel_count) +
               static_cast<std::size_t>(b)] += 1.0;
    if (a != b) {
      map.values[static_cast<std::size_t>(b) *
                     static_cast<std::size_t>(pixel_count) +
                 static_cast<std::size_t>(a)] += 1.0;
    }
  }
  return map;
}

}  // namespace ocm
