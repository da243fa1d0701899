#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ocm/fringe.hpp"
#include "reference_setup.hpp"

using namespace ocm;
using ocmtest::reference_fringe;
using ocmtest::reference_geometry;

namespace {

// Straight-line recomputation of the singles law: envelope times
// (1 + V1 sinc(f w / 2) cos(f x + phase0)), normalized over the array.
std::vector<double> singles_oracle(const FringeConfig& fr, const ArrayGeometry& g) {
  const double f = 4.0 * std::numbers::pi * std::sin(fr.beam_angle / 2.0) /
                   fr.wavelength;
  const double u = f * g.core_width / 2.0;
  const double sinc = std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u;
  std::vector<double> p(static_cast<std::size_t>(g.pixel_count));
  double total = 0.0;
  for (int i = 0; i < g.pixel_count; ++i) {
    const double x = g.origin + g.pitch * i;
    const double env = fr.envelope.kind == Envelope::Kind::Uniform
                           ? 1.0
                           : std::exp(-0.5 * std::pow((x - fr.envelope.center) /
                                                          fr.envelope.sigma,
                                                      2));
    p[static_cast<std::size_t>(i)] =
        env * (1.0 + fr.singles_visibility * sinc * std::cos(f * x + fr.phase0));
    total += p[static_cast<std::size_t>(i)];
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("spatial frequency follows the two-beam formula") {
  FringeConfig fr = reference_fringe();
  const double expected = 4.0 * std::numbers::pi * (1.0 / 6.0);
  CHECK(fr.spatial_frequency() == doctest::Approx(expected).epsilon(1e-15));
  CHECK(fr.fringe_period() == doctest::Approx(3.0).epsilon(1e-15));
  // k1 in radians per pitch for the reference geometry
  CHECK(fr.spatial_frequency() * reference_geometry().pitch ==
        doctest::Approx(ocmtest::kRefK1).epsilon(1e-15));
}

TEST_CASE("core fringe factor matches sinc in both branches") {
  FringeConfig fr = reference_fringe();
  const double f = fr.spatial_frequency();
  // moderate core: direct sin(u)/u
  const double w = 0.3;
  CHECK(fr.core_fringe_factor(w) ==
        doctest::Approx(std::sin(f * w / 2.0) / (f * w / 2.0)).epsilon(1e-14));
  // tiny core: series branch must agree with the direct form to high order
  const double w_small = 1e-9;
  const double u = f * w_small / 2.0;
  CHECK(fr.core_fringe_factor(w_small) ==
        doctest::Approx(1.0 - u * u / 6.0).epsilon(1e-15));
  CHECK(fr.core_fringe_factor(1e-9) == 1.0);
  CHECK(fr.core_fringe_factor(0.0) == 1.0);
}

TEST_CASE("singles distribution matches the direct formula") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  const std::vector<double> p = singles_distribution(fr, g);
  const std::vector<double> oracle = singles_oracle(fr, g);
  REQUIRE(p.size() == 11);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] == doctest::Approx(oracle[i]).epsilon(1e-13));
    total += p[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("singles distribution regression pin") {
  // Frozen values for the reference configuration; these anchor every
  // sampling and projection golden downstream.
  const std::vector<double> expected = {
      0.00900480818127996,  0.00380146801840657,  0.04854272363738196,
      0.23009664533751845,  0.03848244362609454,  0.19467533043084784,
      0.3655716821476672,   0.02422146357380552,  0.04854272363738179,
      0.0361128069626302,   0.00094790444698594};
  const std::vector<double> p =
      singles_distribution(reference_fringe(), reference_geometry());
  REQUIRE(p.size() == expected.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("finite cores attenuate the fringe") {
  FringeConfig fr = reference_fringe();
  ArrayGeometry g = reference_geometry();
  g.core_width = 0.25;
  const std::vector<double> p = singles_distribution(fr, g);
  const std::vector<double> oracle = singles_oracle(fr, g);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] == doctest::Approx(oracle[i]).epsilon(1e-13));
  }
}

TEST_CASE("classical joint is the product of singles") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  const std::vector<double> p1 = singles_distribution(fr, g);
  const JointDistribution joint =
      joint_distribution(ocmtest::source_of(SourceKind::Classical, 3), fr, g);
  REQUIRE(joint.photon_number == 3);
  REQUIRE(joint.pixel_count == 11);
  REQUIRE(joint.probabilities.size() == 11u * 11u * 11u);
  for_each_tuple(3, 11, [&](std::span<const int> pix, std::size_t flat, int) {
    double prod = 1.0;
    for (const int i : pix) prod *= p1[static_cast<std::size_t>(i)];
    CHECK(joint.probabilities[flat] == doctest::Approx(prod).epsilon(1e-12));
  });
}

TEST_CASE("entangled joint modulates only the pixel sum") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  const JointDistribution joint =
      joint_distribution(ocmtest::source_of(SourceKind::NoonState, 2), fr, g);
  // For fixed i+j the ratio joint / (env_i env_j) must be constant.
  auto env = [&](int i) { return fr.envelope.value(g.pixel_center(i)); };
  for (int s = 0; s <= 20; ++s) {
    double ref = -1.0;
    for (int i = 0; i < 11; ++i) {
      const int j = s - i;
      if (j < 0 || j > 10) continue;
      const std::vector<int> pix = {i, j};
      const double ratio = joint.at(pix) / (env(i) * env(j));
      if (ref < 0.0) {
        ref = ratio;
      } else {
        CHECK(ratio == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("entangled joint is permutation symmetric") {
  const JointDistribution joint = joint_distribution(
      ocmtest::source_of(SourceKind::NoonState, 3), reference_fringe(),
      reference_geometry());
  const std::vector<std::vector<int>> tuples = {
      {1, 4, 9}, {9, 4, 1}, {4, 1, 9}, {1, 9, 4}};
  const double ref = joint.at(tuples[0]);
  for (const auto& t : tuples) {
    CHECK(joint.at(t) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("entangled marginal matches the closed form") {
  // Summing the N-photon joint over all but one coordinate must give
  // env(x) [S^(N-1) + a^N Re(e^{i(f x + N phase)} G^(N-1))] up to
  // normalization, where S = sum env_j, G = sum env_j e^{i f x_j}, and a
  // is the attenuated singles visibility.
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  for (const int n : {2, 3, 4}) {
    CAPTURE(n);
    const JointDistribution joint =
        joint_distribution(ocmtest::source_of(SourceKind::NoonState, n), fr, g);
    std::vector<double> marginal(11, 0.0);
    for_each_tuple(n, 11, [&](std::span<const int> pix, std::size_t flat, int) {
      marginal[static_cast<std::size_t>(pix[0])] += joint.probabilities[flat];
    });

    const double f = fr.spatial_frequency();
    const double a = fr.singles_visibility * fr.core_fringe_factor(g.core_width);
    double s_env = 0.0;
    std::complex<double> g_env = 0.0;
    for (int j = 0; j < 11; ++j) {
      const double e = fr.envelope.value(g.pixel_center(j));
      s_env += e;
      g_env += e * std::exp(std::complex<double>(0.0, f * g.pixel_center(j)));
    }
    std::vector<double> expected(11);
    double total = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double x = g.pixel_center(i);
      const std::complex<double> rot =
          std::exp(std::complex<double>(0.0, f * x + n * fr.phase0));
      expected[static_cast<std::size_t>(i)] =
          fr.envelope.value(x) *
          (std::pow(s_env, n - 1) +
           std::pow(a, n) * std::real(rot * std::pow(g_env, n - 1)));
      total += expected[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 11; ++i) {
      CHECK(marginal[static_cast<std::size_t>(i)] ==
            doctest::Approx(expected[static_cast<std::size_t>(i)] / total)
                .epsilon(1e-11));
    }
  }
}

TEST_CASE("mixed joint blends the two sources") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  const double eps = 0.37;
  const JointDistribution mixed = joint_distribution(
      ocmtest::source_of(SourceKind::Mixed, 2, eps), fr, g);
  const JointDistribution noon =
      joint_distribution(ocmtest::source_of(SourceKind::NoonState, 2), fr, g);
  const JointDistribution classical =
      joint_distribution(ocmtest::source_of(SourceKind::Classical, 2), fr, g);
  for (std::size_t i = 0; i < mixed.probabilities.size(); ++i) {
    const double expected =
        (1.0 - eps) * noon.probabilities[i] + eps * classical.probabilities[i];
    CHECK(mixed.probabilities[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("mixed endpoints collapse to the pure sources") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  const JointDistribution all_noon =
      joint_distribution(ocmtest::source_of(SourceKind::Mixed, 2, 0.0), fr, g);
  const JointDistribution noon =
      joint_distribution(ocmtest::source_of(SourceKind::NoonState, 2), fr, g);
  const JointDistribution all_cl =
      joint_distribution(ocmtest::source_of(SourceKind::Mixed, 2, 1.0), fr, g);
  const JointDistribution classical =
      joint_distribution(ocmtest::source_of(SourceKind::Classical, 2), fr, g);
  for (std::size_t i = 0; i < noon.probabilities.size(); ++i) {
    CHECK(all_noon.probabilities[i] ==
          doctest::Approx(noon.probabilities[i]).epsilon(1e-13));
    CHECK(all_cl.probabilities[i] ==
          doctest::Approx(classical.probabilities[i]).epsilon(1e-13));
  }
}

TEST_CASE("joint distributions are normalized and non-negative") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  for (const SourceKind kind :
       {SourceKind::Classical, SourceKind::NoonState}) {
    for (const int n : {1, 2, 4}) {
      CAPTURE(n);
      const JointDistribution joint =
          joint_distribution(ocmtest::source_of(kind, n), fr, g);
      double total = 0.0;
      for (const double p : joint.probabilities) {
        REQUIRE(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("tuple walker visits indices in row major order") {
  std::vector<std::size_t> flats;
  std::vector<int> sums;
  for_each_tuple(2, 3, [&](std::span<const int> pix, std::size_t flat, int sum) {
    flats.push_back(flat);
    sums.push_back(sum);
    CHECK(sum == pix[0] + pix[1]);
    CHECK(flat == static_cast<std::size_t>(pix[0] * 3 + pix[1]));
  });
  REQUIRE(flats.size() == 9);
  for (std::size_t i = 0; i < flats.size(); ++i) CHECK(flats[i] == i);
  CHECK(sums.back() == 4);
}

TEST_CASE("oversized joint tensors are refused") {
  const FringeConfig fr = reference_fringe();
  const ArrayGeometry g = reference_geometry();
  // 11^7 tuples exceed the entry cap
  CHECK_THROWS_AS(
      joint_distribution(ocmtest::source_of(SourceKind::Classical, 7), fr, g),
      std::invalid_argument);
}

TEST_CASE("configuration validation rejects bad inputs") {
  ArrayGeometry g = reference_geometry();
  g.pixel_count = 1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = reference_geometry();
  g.core_width = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = reference_geometry();
  g.core_width = 2.0;  // wider than the pitch
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);

  FringeConfig fr = reference_fringe();
  fr.wavelength = -1.0;
  CHECK_THROWS_AS(fr.validate(), std::invalid_argument);
  fr = reference_fringe();
  fr.beam_angle = 0.0;
  CHECK_THROWS_AS(fr.validate(), std::invalid_argument);
  fr = reference_fringe();
  fr.singles_visibility = 1.5;
  CHECK_THROWS_AS(fr.validate(), std::invalid_argument);
  fr = reference_fringe();
  fr.envelope.sigma = 0.0;
  CHECK_THROWS_AS(fr.validate(), std::invalid_argument);

  SourceModel s = ocmtest::source_of(SourceKind::Classical, 0);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ocmtest::source_of(SourceKind::Classical, 2);
  s.background_fraction = 0.2;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ocmtest::source_of(SourceKind::Mixed, 2, 1.5);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ocmtest::source_of(SourceKind::Mixed, 2, 0.4);
  CHECK_NOTHROW(s.validate());
}
