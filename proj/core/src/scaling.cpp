#include "ocm/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ocm {

double classical_visibility_theory(int photon_number, double singles_visibility) {
  if (photon_number < 1) {
    throw std::invalid_argument(
        "classical_visibility_theory: photon_number must be >= 1");
  }
  if (!(singles_visibility >= 0.0) || !(singles_visibility <= 1.0)) {
    throw std::invalid_argument(
        "classical_visibility_theory: singles_visibility must be in [0, 1]");
  }
  return std::pow(singles_visibility, photon_number) /
         std::pow(2.0, photon_number - 1);
}

std::string_view to_string(VisibilityKind kind) {
  switch (kind) {
    case VisibilityKind::ClassicalTheory:
      return "classical-theory";
    case VisibilityKind::ClassicalMeasured:
      return "classical-measured";
    case VisibilityKind::QuantumRaw:
      return "quantum-raw";
    case VisibilityKind::QuantumCorrected:
      return "quantum-corrected";
  }
  return "unknown";
}

VisibilityKind visibility_kind_from_string(std::string_view name) {
  if (name == "classical-theory") return VisibilityKind::ClassicalTheory;
  if (name == "classical-measured") return VisibilityKind::ClassicalMeasured;
  if (name == "quantum-raw") return VisibilityKind::QuantumRaw;
  if (name == "quantum-corrected") return VisibilityKind::QuantumCorrected;
  throw std::invalid_argument("unknown visibility kind: " + std::string(name));
}

std::vector<VisibilityPoint> scaling_table(
    int n_max, double singles_visibility,
    std::span<const VisibilityPoint> measured) {
  if (n_max < 1) {
    throw std::invalid_argument("scaling_table: n_max must be >= 1");
  }
  std::vector<VisibilityPoint> table;
  table.reserve(static_cast<std::size_t>(n_max) + measured.size());
  for (int n = 1; n <= n_max; ++n) {
    table.push_back({n, VisibilityKind::ClassicalTheory,
                     classical_visibility_theory(n, singles_visibility), 0.0});
  }
  table.insert(table.end(), measured.begin(), measured.end());
  return table;
}

std::vector<VisibilityPoint> reference_visibilities() {
  return {
      {2, VisibilityKind::ClassicalMeasured, 0.44, 0.09},
      {3, VisibilityKind::ClassicalMeasured, 0.18, 0.04},
      {4, VisibilityKind::ClassicalMeasured, 0.14, 0.04},
      {2, VisibilityKind::QuantumRaw, 0.49, 0.04},
      {3, VisibilityKind::QuantumRaw, 0.44, 0.05},
      {4, VisibilityKind::QuantumRaw, 0.41, 0.06},
      {2, VisibilityKind::QuantumCorrected, 0.65, 0.04},
      {3, VisibilityKind::QuantumCorrected, 0.61, 0.06},
      {4, VisibilityKind::QuantumCorrected, 0.59, 0.08},
  };
}

}  // namespace ocm
