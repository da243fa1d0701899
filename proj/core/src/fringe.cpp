#include "ocm/fringe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ocm {

void ArrayGeometry::validate() const {
  if (pixel_count < 2) {
    throw std::invalid_argument("ArrayGeometry: pixel_count must be >= 2");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    throw std::invalid_argument("ArrayGeometry: pitch must be positive");
  }
  if (!(core_width > 0.0) || core_width > pitch) {
    throw std::invalid_argument(
        "ArrayGeometry: core_width must be in (0, pitch]");
  }
  if (!std::isfinite(origin)) {
    throw std::invalid_argument("ArrayGeometry: origin must be finite");
  }
}

double Envelope::value(double x) const {
  if (kind == Kind::Uniform) return 1.0;
  const double u = (x - center) / sigma;
  return std::exp(-0.5 * u * u);
}

void Envelope::validate() const {
  if (kind == Kind::Gaussian) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("Envelope: gaussian sigma must be positive");
    }
    if (!std::isfinite(center)) {
      throw std::invalid_argument("Envelope: gaussian center must be finite");
    }
  }
}

double FringeConfig::spatial_frequency() const {
  return 4.0 * std::numbers::pi * std::sin(beam_angle / 2.0) / wavelength;
}

double FringeConfig::fringe_period() const {
  return 2.0 * std::numbers::pi / spatial_frequency();
}

double FringeConfig::core_fringe_factor(double core_width) const {
  const double u = spatial_frequency() * core_width / 2.0;
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

void FringeConfig::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw std::invalid_argument("FringeConfig: wavelength must be positive");
  }
  if (!(beam_angle > 0.0) || !(beam_angle < std::numbers::pi)) {
    throw std::invalid_argument(
        "FringeConfig: beam_angle must be in (0, pi) radians");
  }
  if (!std::isfinite(phase0)) {
    throw std::invalid_argument("FringeConfig: phase0 must be finite");
  }
  if (!(singles_visibility >= 0.0) || !(singles_visibility <= 1.0)) {
    throw std::invalid_argument(
        "FringeConfig: singles_visibility must be in [0, 1]");
  }
  envelope.validate();
}

void SourceModel::validate() const {
  if (photon_number < 1) {
    throw std::invalid_argument("SourceModel: photon_number must be >= 1");
  }
  if (kind == SourceKind::Mixed) {
    if (!(background_fraction >= 0.0) || !(background_fraction <= 1.0)) {
      throw std::invalid_argument(
          "SourceModel: background_fraction must be in [0, 1]");
    }
  } else if (background_fraction != 0.0) {
    throw std::invalid_argument(
        "SourceModel: background_fraction requires kind == Mixed");
  }
}

namespace {

// Per-pixel envelope weights and the fringe phase f * x_i + phase0 at each
// core center.
struct PixelTerms {
  std::vector<double> envelope;
  std::vector<double> phase;
  double fringe_attenuation = 1.0;
};

PixelTerms pixel_terms(const FringeConfig& fringe, const ArrayGeometry& geometry) {
  PixelTerms terms;
  const double f = fringe.spatial_frequency();
  terms.fringe_attenuation =
      fringe.singles_visibility * fringe.core_fringe_factor(geometry.core_width);
  terms.envelope.resize(static_cast<std::size_t>(geometry.pixel_count));
  terms.phase.resize(static_cast<std::size_t>(geometry.pixel_count));
  for (int i = 0; i < geometry.pixel_count; ++i) {
    const double x = geometry.pixel_center(i);
    terms.envelope[static_cast<std::size_t>(i)] = fringe.envelope.value(x);
    terms.phase[static_cast<std::size_t>(i)] = f * x + fringe.phase0;
  }
  return terms;
}

void normalize(std::vector<double>& weights, const char* what) {
  double total = 0.0;
  for (const double w : weights) total += w;
  if (!(total > 0.0)) {
    throw std::invalid_argument(std::string(what) +
                                ": distribution has zero total weight");
  }
  for (double& w : weights) w /= total;
}

std::vector<double> noon_joint(int n, const PixelTerms& terms) {
  const int d = static_cast<int>(terms.envelope.size());
  std::size_t entries = 1;
  for (int j = 0; j < n; ++j) entries *= static_cast<std::size_t>(d);
  std::vector<double> probs(entries);
  double modulation = 1.0;
  for (int j = 0; j < n; ++j) modulation *= terms.fringe_attenuation;
  for_each_tuple(n, d, [&](std::span<const int> pixels, std::size_t flat, int) {
    double env = 1.0;
    double phase = 0.0;
    for (const int p : pixels) {
      env *= terms.envelope[static_cast<std::size_t>(p)];
      phase += terms.phase[static_cast<std::size_t>(p)];
    }
    const double value = env * (1.0 + modulation * std::cos(phase));
    probs[flat] = value > 0.0 ? value : 0.0;
  });
  return probs;
}

std::vector<double> classical_joint(int n, const std::vector<double>& singles) {
  const int d = static_cast<int>(singles.size());
  std::size_t entries = 1;
  for (int j = 0; j < n; ++j) entries *= static_cast<std::size_t>(d);
  std::vector<double> probs(entries);
  for_each_tuple(n, d, [&](std::span<const int> pixels, std::size_t flat, int) {
    double value = 1.0;
    for (const int p : pixels) value *= singles[static_cast<std::size_t>(p)];
    probs[flat] = value;
  });
  return probs;
}

}  // namespace

std::vector<double> singles_distribution(const FringeConfig& fringe,
                                         const ArrayGeometry& geometry) {
  fringe.validate();
  geometry.validate();
  const PixelTerms terms = pixel_terms(fringe, geometry);
  std::vector<double> weights(static_cast<std::size_t>(geometry.pixel_count));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double value =
        terms.envelope[i] *
        (1.0 + terms.fringe_attenuation * std::cos(terms.phase[i]));
    weights[i] = value > 0.0 ? value : 0.0;
  }
  normalize(weights, "singles_distribution");
  return weights;
}

std::size_t JointDistribution::flat_index(std::span<const int> pixels) const {
  if (static_cast<int>(pixels.size()) != photon_number) {
    throw std::invalid_argument("JointDistribution: tuple arity mismatch");
  }
  std::size_t flat = 0;
  for (const int p : pixels) {
    if (p < 0 || p >= pixel_count) {
      throw std::invalid_argument("JointDistribution: pixel index out of range");
    }
    flat = flat * static_cast<std::size_t>(pixel_count) +
           static_cast<std::size_t>(p);
  }
  return flat;
}

JointDistribution joint_distribution(const SourceModel& source,
                                     const FringeConfig& fringe,
                                     const ArrayGeometry& geometry) {
  source.validate();
  fringe.validate();
  geometry.validate();

  const int n = source.photon_number;
  const int d = geometry.pixel_count;
  double entry_estimate = 1.0;
  for (int j = 0; j < n; ++j) entry_estimate *= static_cast<double>(d);
  if (entry_estimate > static_cast<double>(kMaxJointEntries)) {
    throw std::invalid_argument(
        "joint_distribution: pixel_count^photon_number exceeds " +
        std::to_string(kMaxJointEntries) + " tuples");
  }

  const PixelTerms terms = pixel_terms(fringe, geometry);

  JointDistribution joint;
  joint.photon_number = n;
  joint.pixel_count = d;
  switch (source.kind) {
    case SourceKind::NoonState:
      joint.probabilities = noon_joint(n, terms);
      break;
    case SourceKind::Classical:
      joint.probabilities = classical_joint(n, singles_distribution(fringe, geometry));
      break;
    case SourceKind::Mixed: {
      std::vector<double> quantum = noon_joint(n, terms);
      normalize(quantum, "joint_distribution");
      std::vector<double> classical =
          classical_joint(n, singles_distribution(fringe, geometry));
      normalize(classical, "joint_distribution");
      const double eps = source.background_fraction;
      joint.probabilities.resize(quantum.size());
      for (std::size_t i = 0; i < quantum.size(); ++i) {
        joint.probabilities[i] = (1.0 - eps) * quantum[i] + eps * classical[i];
      }
      break;
    }
  }
  normalize(joint.probabilities, "joint_distribution");
  return joint;
}

}  // namespace ocm
