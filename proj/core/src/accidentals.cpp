#include "ocm/accidentals.hpp"

#include <cmath>
#include <stdexcept>

#include "ocm/fringe.hpp"

namespace ocm {

SinglesRates SinglesRates::from_counts(std::span<const std::uint64_t> counts,
                                       double pulses) {
  if (!(pulses > 0.0)) {
    throw std::invalid_argument("SinglesRates: pulses must be positive");
  }
  SinglesRates rates;
  rates.rate.reserve(counts.size());
  rates.sigma.reserve(counts.size());
  for (const std::uint64_t c : counts) {
    rates.rate.push_back(static_cast<double>(c) / pulses);
    rates.sigma.push_back(std::sqrt(static_cast<double>(c)) / pulses);
  }
  return rates;
}

void SinglesRates::validate() const {
  if (rate.empty() || rate.size() != sigma.size()) {
    throw std::invalid_argument("SinglesRates: rate/sigma size mismatch");
  }
  for (std::size_t i = 0; i < rate.size(); ++i) {
    if (!(rate[i] >= 0.0) || rate[i] > 1.0) {
      throw std::invalid_argument("SinglesRates: rate must be in [0, 1]");
    }
    if (!(sigma[i] >= 0.0)) {
      throw std::invalid_argument("SinglesRates: sigma must be >= 0");
    }
  }
}

CentroidHistogram estimate_accidentals(const SinglesRates& beam_a,
                                       const SinglesRates& beam_b,
                                       int photon_number, double pulses,
                                       const ArrayGeometry& geometry,
                                       bool exclude_same_pixel) {
  beam_a.validate();
  beam_b.validate();
  geometry.validate();
  const int d = geometry.pixel_count;
  if (static_cast<int>(beam_a.rate.size()) != d ||
      static_cast<int>(beam_b.rate.size()) != d) {
    throw std::invalid_argument(
        "estimate_accidentals: rate vectors must match pixel_count");
  }
  if (photon_number < 1) {
    throw std::invalid_argument("estimate_accidentals: photon_number must be >= 1");
  }
  if (!(pulses > 0.0)) {
    throw std::invalid_argument("estimate_accidentals: pulses must be positive");
  }
  double entry_estimate = 1.0;
  for (int j = 0; j < photon_number; ++j) entry_estimate *= static_cast<double>(d);
  if (entry_estimate > static_cast<double>(kMaxJointEntries)) {
    throw std::invalid_argument(
        "estimate_accidentals: pixel_count^photon_number exceeds tuple bound");
  }

  std::vector<double> rate(static_cast<std::size_t>(d));
  std::vector<double> rate_var(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    rate[static_cast<std::size_t>(i)] = beam_a.rate[static_cast<std::size_t>(i)] +
                                        beam_b.rate[static_cast<std::size_t>(i)];
    rate_var[static_cast<std::size_t>(i)] =
        beam_a.sigma[static_cast<std::size_t>(i)] *
            beam_a.sigma[static_cast<std::size_t>(i)] +
        beam_b.sigma[static_cast<std::size_t>(i)] *
            beam_b.sigma[static_cast<std::size_t>(i)];
  }

  CentroidHistogram acc;
  acc.photon_number = photon_number;
  acc.pixel_count = d;
  acc.pitch = geometry.pitch;
  acc.origin = geometry.origin;
  const std::size_t bins = static_cast<std::size_t>(acc.bin_count());
  acc.counts.assign(bins, 0.0);
  acc.sigma.assign(bins, 0.0);

  // gradient[s * d + i]: derivative of the bin-s tuple sum with respect to
  // the combined rate on pixel i.
  std::vector<double> gradient(bins * static_cast<std::size_t>(d), 0.0);
  const std::size_t n = static_cast<std::size_t>(photon_number);
  std::vector<double> prefix(n + 1);
  std::vector<double> suffix(n + 1);
  for_each_tuple(photon_number, d, [&](std::span<const int> pixels, std::size_t,
                                       int sum) {
    if (exclude_same_pixel && photon_number > 1) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = j + 1; m < n; ++m) {
          if (pixels[j] == pixels[m]) return;
        }
      }
    }
    prefix[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      prefix[j + 1] = prefix[j] * rate[static_cast<std::size_t>(pixels[j])];
    }
    suffix[n] = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      suffix[j] = suffix[j + 1] * rate[static_cast<std::size_t>(pixels[j])];
    }
    acc.counts[static_cast<std::size_t>(sum)] += prefix[n];
    double* grad_row = gradient.data() + static_cast<std::size_t>(sum) * static_cast<std::size_t>(d);
    for (std::size_t j = 0; j < n; ++j) {
      grad_row[pixels[j]] += prefix[j] * suffix[j + 1];
    }
  });

  for (std::size_t s = 0; s < bins; ++s) {
    acc.counts[s] *= pulses;
    double var = 0.0;
    const double* grad_row = gradient.data() + s * static_cast<std::size_t>(d);
    for (int i = 0; i < d; ++i) {
      var += grad_row[i] * grad_row[i] * rate_var[static_cast<std::size_t>(i)];
    }
    acc.sigma[s] = pulses * std::sqrt(var);
  }
  return acc;
}

CentroidHistogram subtract_accidentals(const CentroidHistogram& raw,
                                       const CentroidHistogram& accidentals) {
  raw.validate();
  accidentals.validate();
  if (raw.photon_number != accidentals.photon_number ||
      raw.pixel_count != accidentals.pixel_count ||
      raw.pitch != accidentals.pitch || raw.origin != accidentals.origin) {
    throw std::invalid_argument(
        "subtract_accidentals: incompatible histogram binning");
  }
  CentroidHistogram corrected = raw;
  for (std::size_t s = 0; s < corrected.counts.size(); ++s) {
    corrected.counts[s] -= accidentals.counts[s];
    corrected.sigma[s] = std::hypot(raw.sigma[s], accidentals.sigma[s]);
  }
  return corrected;
}

}  // namespace ocm
