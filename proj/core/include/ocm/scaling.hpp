#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace ocm {

// Expected centroid-fringe visibility for N independent classical photons
// with singles visibility V1: V1^N / 2^(N-1). The 2^(N-1) loss comes from
// the N-fold self-convolution of the singles pattern; a N00N state keeps
// visibility V1^N with no convolution penalty.
double classical_visibility_theory(int photon_number,
                                   double singles_visibility = 1.0);

enum class VisibilityKind {
  ClassicalTheory,
  ClassicalMeasured,
  QuantumRaw,
  QuantumCorrected,
};

std::string_view to_string(VisibilityKind kind);
VisibilityKind visibility_kind_from_string(std::string_view name);

struct VisibilityPoint {
  int photon_number = 0;
  VisibilityKind kind = VisibilityKind::ClassicalTheory;
  double visibility = 0.0;
  double sigma = 0.0;
};

// Visibility-versus-N table: the classical theory curve for N = 1..n_max
// followed by the supplied measured points.
std::vector<VisibilityPoint> scaling_table(
    int n_max, double singles_visibility,
    std::span<const VisibilityPoint> measured);

// Benchmark visibilities measured with an 11-pixel photon-counting array
// (classical light, and two-photon-interference N00N states before and
// after accidental subtraction), bundled for comparison overlays.
std::vector<VisibilityPoint> reference_visibilities();

}  // namespace ocm
