#pragma once

#include <cstdint>
#include <span>

#include "ocm/projector.hpp"

namespace ocm {

// Per-pixel singles firing rate (probability per pulse) with uncertainty,
// as obtained from a calibration exposure.
struct SinglesRates {
  std::vector<double> rate;
  std::vector<double> sigma;

  static SinglesRates from_counts(std::span<const std::uint64_t> counts,
                                  double pulses);
  void validate() const;
};

// Predicted accidental N-fold background on the centroid axis: uncorrelated
// singles from the two beams land together by chance, so bin s receives
// pulses * sum over ordered pixel tuples with sum s of the product of
// combined rates. Same-pixel tuples are excluded when the detector cannot
// resolve photon number. sigma propagates the calibration uncertainties to
// first order.
CentroidHistogram estimate_accidentals(const SinglesRates& beam_a,
                                       const SinglesRates& beam_b,
                                       int photon_number, double pulses,
                                       const ArrayGeometry& geometry,
                                       bool exclude_same_pixel);

// Bin-wise subtraction of the accidental prediction from a raw histogram.
// Negative corrected counts are preserved; uncertainties add in quadrature.
CentroidHistogram subtract_accidentals(const CentroidHistogram& raw,
                                       const CentroidHistogram& accidentals);

}  // namespace ocm
