#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ocm {

// Deterministic generator for reproducible runs. xoshiro256++ core seeded
// through splitmix64, so any 64-bit seed (including 0) gives a well mixed
// state. Streams are separated with the generator's 2^128 jump, which
// guarantees non-overlapping subsequences for partitioned sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
    for (std::uint64_t i = 0; i < stream; ++i) jump();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Poisson deviate. Plain inversion for small means, Hormann's PTRS
  // transformed rejection for large ones so calibration exposures with
  // means in the millions stay O(1) per draw.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * std::log(mean) - mean - std::lgamma(kf + 1.0)) {
        return static_cast<std::uint64_t>(kf);
      }
    }
  }

  // Advance 2^128 steps (Blackman/Vigna jump polynomial).
  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
        0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc = {0, 0, 0, 0};
    for (const std::uint64_t word : kJump) {
      for (int bit = 0; bit < 64; ++bit) {
        if (word & (1ULL << bit)) {
          for (int i = 0; i < 4; ++i) acc[i] ^= state_[i];
        }
        next_u64();
      }
    }
    state_ = acc;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& sm_state) {
    std::uint64_t z = (sm_state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_;
};

// Inverse-CDF sampler over a fixed finite distribution. Weights are
// normalized on construction; draws cost one uniform plus a binary search.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("DiscreteSampler: empty weight vector");
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (const double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("DiscreteSampler: weights must be finite and >= 0");
      }
      total += w;
      cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw std::invalid_argument("DiscreteSampler: weights sum to zero");
    for (double& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t lo = 0;
    std::size_t hi = cumulative_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace ocm
