#pragma once

#include <optional>
#include <vector>

#include "ocm/projector.hpp"

namespace ocm {

struct FitOptions {
  // Fringe frequency in radians per pixel pitch along the centroid axis.
  // When set the frequency is held fixed; otherwise it is a free parameter
  // seeded from frequency_hint or, failing that, a periodogram scan.
  std::optional<double> fixed_frequency;
  std::optional<double> frequency_hint;
  int max_iterations = 200;
  double parameter_tolerance = 1e-8;
};

// Result of fitting A * exp(-(X - center)^2 / (2 width^2)) *
// (1 + V cos(frequency X + phase)) to a centroid histogram, X measured in
// pixel-pitch units (bin s sits at X = s / photon_number).
struct FitResult {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;
  // Best-fit modulation depth before clamping; may exceed 1 on noisy data.
  double visibility_raw = 0.0;
  double phase = 0.0;
  double frequency = 0.0;

  double amplitude_sigma = 0.0;
  double center_sigma = 0.0;
  double width_sigma = 0.0;
  double visibility_sigma = 0.0;
  double phase_sigma = 0.0;
  double frequency_sigma = 0.0;

  // Covariance of the free parameters, row major, parameter order
  // amplitude, center, width, visibility, phase, then frequency when free.
  std::vector<double> covariance;
  int n_free = 0;

  double chi_squared = 0.0;
  int degrees_of_freedom = 0;
  int iterations = 0;
  bool converged = false;
  bool frequency_fixed = false;
  bool visibility_clipped = false;

  // Visibility clamped to the physical range [0, 1].
  double visibility() const;
  // Fringe period along the centroid axis in pixel-pitch units.
  double fringe_period() const;
  // Model value at X (pixel-pitch units) using the raw parameters.
  double model_value(double x) const;
};

// Weighted least squares fringe fit with Levenberg-style damping.
// Weights are 1 / max(sigma, 1), so empty bins get the Poisson floor of 1
// count. Seeds come from histogram moments and the discrete Fourier
// component at the fringe frequency. Throws std::invalid_argument for
// degenerate histograms (fewer than 8 populated bins, or fewer bins than
// parameters); non-convergence is reported through the converged flag with
// the last iterate.
FitResult fit_fringe(const CentroidHistogram& hist, const FitOptions& options = {});

}  // namespace ocm
