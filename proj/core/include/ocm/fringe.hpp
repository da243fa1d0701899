#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocm {

// Pixelated detector array along one transverse axis. Pixel i has its core
// centered at origin + i * pitch; only a strip of core_width within each
// pitch cell is sensitive. All lengths in meters.
struct ArrayGeometry {
  int pixel_count = 11;
  double pitch = 250e-6;
  double core_width = 62.5e-6;
  double origin = 0.0;

  double pixel_center(int i) const { return origin + pitch * i; }
  double fill_factor() const { return core_width / pitch; }
  void validate() const;
};

// Transverse intensity envelope of the illuminating beams.
struct Envelope {
  enum class Kind { Uniform, Gaussian };
  Kind kind = Kind::Uniform;
  double center = 0.0;
  double sigma = 0.0;

  double value(double x) const;
  void validate() const;
};

// Two-beam interference pattern: wavelength and full angle between the
// beams set the spatial frequency f = 4 pi sin(angle/2) / wavelength, so a
// single photon arrives with density env(x) * (1 + V1 cos(f x + phase0)).
struct FringeConfig {
  double wavelength = 808e-9;
  double beam_angle = 0.16e-3;
  double phase0 = 0.0;
  double singles_visibility = 1.0;
  Envelope envelope;

  double spatial_frequency() const;
  double fringe_period() const;
  // Attenuation of the fringe term from integrating over one detector
  // core: sinc(f * core_width / 2). Applies once per detected photon.
  double core_fringe_factor(double core_width) const;
  void validate() const;
};

enum class SourceKind { Classical, NoonState, Mixed };

// N-photon illumination model. Classical light gives independent photons,
// a N00N state modulates only the photon-number-N centroid, Mixed blends
// the two with background_fraction of classical events.
struct SourceModel {
  SourceKind kind = SourceKind::Classical;
  int photon_number = 2;
  double background_fraction = 0.0;

  void validate() const;
};

// Probability of a single photon landing on each pixel core, normalized
// over the array.
std::vector<double> singles_distribution(const FringeConfig& fringe,
                                         const ArrayGeometry& geometry);

inline constexpr std::size_t kMaxJointEntries = 2'000'000;

// Normalized probability over ordered pixel tuples (i_1, ..., i_N), stored
// row major with the last pixel index fastest.
struct JointDistribution {
  int photon_number = 0;
  int pixel_count = 0;
  std::vector<double> probabilities;

  std::size_t flat_index(std::span<const int> pixels) const;
  double at(std::span<const int> pixels) const {
    return probabilities[flat_index(pixels)];
  }
};

// Exact N-photon joint distribution for the given source. Refuses
// configurations with more than kMaxJointEntries tuples.
JointDistribution joint_distribution(const SourceModel& source,
                                     const FringeConfig& fringe,
                                     const ArrayGeometry& geometry);

// Visits every ordered pixel tuple in row-major order. The callback gets
// the tuple digits, its flat index, and the pixel-index sum.
template <typename F>
void for_each_tuple(int photon_number, int pixel_count, F&& f) {
  std::vector<int> digits(static_cast<std::size_t>(photon_number), 0);
  std::size_t flat = 0;
  int sum = 0;
  for (;;) {
    f(std::span<const int>(digits), flat, sum);
    ++flat;
    int pos = photon_number - 1;
    while (pos >= 0 && digits[pos] == pixel_count - 1) {
      sum -= pixel_count - 1;
      digits[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++digits[pos];
    ++sum;
  }
}

}  // namespace ocm
