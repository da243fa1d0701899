#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocm/fringe.hpp"

namespace ocm {

// One detected N-photon event: the pulse it came from and the pixel index
// of every photon, sorted non-decreasing. Repeated indices are legal only
// for number-resolving detectors.
struct DetectionEvent {
  std::uint64_t pulse_id = 0;
  std::vector<int> pixels;
};

// Histogram over the optical centroid coordinate. N-photon events with
// pixel sum s land in bin s, whose centroid sits at origin + pitch * s / N;
// there are photon_number * (pixel_count - 1) + 1 bins. counts may be
// non-integer (expected weights, or background-subtracted data) and sigma
// carries the per-bin uncertainty.
struct CentroidHistogram {
  int photon_number = 0;
  int pixel_count = 0;
  double pitch = 0.0;
  double origin = 0.0;
  std::vector<double> counts;
  std::vector<double> sigma;

  int bin_count() const { return photon_number * (pixel_count - 1) + 1; }
  // Physical centroid coordinate of bin s (meters).
  double centroid_coordinate(int s) const {
    return origin + pitch * static_cast<double>(s) / photon_number;
  }
  // Centroid of bin s in pixel-pitch units, the coordinate the fringe fits
  // work in.
  double pixel_coordinate(int s) const {
    return static_cast<double>(s) / photon_number;
  }
  double total_counts() const;
  void validate() const;
};

// Projects an exact joint distribution onto the centroid axis. counts are
// probability weights summing to 1 and sigma is zero.
CentroidHistogram project_distribution(const JointDistribution& joint,
                                       const ArrayGeometry& geometry);

// Bins detected events by pixel sum. sigma is the Poisson sqrt(counts).
// Every event must carry exactly photon_number in-range pixels; projection
// drops nothing.
CentroidHistogram project_events(std::span<const DetectionEvent> events,
                                 int photon_number,
                                 const ArrayGeometry& geometry);

// Adds histograms bin by bin with uncertainties combined in quadrature.
// Binning metadata must agree.
CentroidHistogram merge_histograms(const CentroidHistogram& a,
                                   const CentroidHistogram& b);

// N-photon absorber acting on the joint distribution: only tuples with all
// photons on one pixel are kept. efficiency is the total diagonal weight
// (D^(1-N) for a uniform array) and pixel_weights the unnormalized weight
// per pixel.
struct AbsorberSelection {
  double efficiency = 0.0;
  std::vector<double> pixel_weights;
};

AbsorberSelection absorber_diagonal(const JointDistribution& joint);

// Same absorber on sampled events: keeps events whose photons all share a
// pixel. Only meaningful for number-resolving event streams.
std::vector<DetectionEvent> absorber_select(std::span<const DetectionEvent> events);

// Symmetric pixel-vs-pixel coincidence map, the standard way to display a
// two-photon joint distribution.
struct JointMap2D {
  int pixel_count = 0;
  std::vector<double> values;  // row major pixel_count x pixel_count

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) *
                      static_cast<std::size_t>(pixel_count) +
                  static_cast<std::size_t>(j)];
  }
};

JointMap2D joint_map_2d(const JointDistribution& joint);
JointMap2D joint_map_2d(std::span<const DetectionEvent> events, int pixel_count);

}  // namespace ocm
