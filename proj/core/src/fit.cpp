#include "ocm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ocm {

namespace {

constexpr int kNumParams = 6;  // amplitude, center, width, visibility, phase, frequency

struct Params {
  std::array<double, kNumParams> v{};
  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

double model(const Params& p, double x) {
  const double u = (x - p[1]) / p[2];
  return p[0] * std::exp(-0.5 * u * u) * (1.0 + p[3] * std::cos(p[5] * x + p[4]));
}

void jacobian_row(const Params& p, double x, std::array<double, kNumParams>& row) {
  const double dx = x - p[1];
  const double g = std::exp(-0.5 * dx * dx / (p[2] * p[2]));
  const double c = std::cos(p[5] * x + p[4]);
  const double s = std::sin(p[5] * x + p[4]);
  const double f = 1.0 + p[3] * c;
  row[0] = g * f;
  row[1] = p[0] * g * f * dx / (p[2] * p[2]);
  row[2] = p[0] * g * f * dx * dx / (p[2] * p[2] * p[2]);
  row[3] = p[0] * g * c;
  row[4] = -p[0] * g * p[3] * s;
  row[5] = -p[0] * g * p[3] * s * x;
}

// Solves the symmetric system M x = b in place via Gaussian elimination
// with partial pivoting. Returns false when M is numerically singular.
bool solve_dense(std::vector<double> m, std::vector<double> b, int n,
                 std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(m[static_cast<std::size_t>(col * n + col)]);
    for (int row = col + 1; row < n; ++row) {
      const double cand = std::abs(m[static_cast<std::size_t>(row * n + col)]);
      if (cand > best) {
        best = cand;
        pivot = row;
      }
    }
    if (!(best > 1e-300)) return false;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(m[static_cast<std::size_t>(col * n + j)],
                  m[static_cast<std::size_t>(pivot * n + j)]);
      }
      std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
    }
    const double inv = 1.0 / m[static_cast<std::size_t>(col * n + col)];
    for (int row = col + 1; row < n; ++row) {
      const double factor = m[static_cast<std::size_t>(row * n + col)] * inv;
      if (factor == 0.0) continue;
      for (int j = col; j < n; ++j) {
        m[static_cast<std::size_t>(row * n + j)] -=
            factor * m[static_cast<std::size_t>(col * n + j)];
      }
      b[static_cast<std::size_t>(row)] -= factor * b[static_cast<std::size_t>(col)];
    }
  }
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[static_cast<std::size_t>(row)];
    for (int j = row + 1; j < n; ++j) {
      acc -= m[static_cast<std::size_t>(row * n + j)] * x[static_cast<std::size_t>(j)];
    }
    x[static_cast<std::size_t>(row)] = acc / m[static_cast<std::size_t>(row * n + row)];
  }
  return true;
}

bool invert_dense(const std::vector<double>& m, int n, std::vector<double>& inv) {
  inv.assign(static_cast<std::size_t>(n * n), 0.0);
  std::vector<double> column;
  std::vector<double> unit(static_cast<std::size_t>(n), 0.0);
  for (int col = 0; col < n; ++col) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[static_cast<std::size_t>(col)] = 1.0;
    if (!solve_dense(m, unit, n, column)) return false;
    for (int row = 0; row < n; ++row) {
      inv[static_cast<std::size_t>(row * n + col)] = column[static_cast<std::size_t>(row)];
    }
  }
  return true;
}

double weighted_cost(const Params& p, const std::vector<double>& x,
                     const std::vector<double>& y, const std::vector<double>& w) {
  double cost = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - model(p, x[i])) * w[i];
    cost += r * r;
  }
  return cost;
}

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  phi = std::fmod(phi, two_pi);
  if (phi > std::numbers::pi) phi -= two_pi;
  if (phi <= -std::numbers::pi) phi += two_pi;
  return phi;
}

}  // namespace

double FitResult::visibility() const {
  return std::clamp(visibility_raw, 0.0, 1.0);
}

double FitResult::fringe_period() const {
  return 2.0 * std::numbers::pi / frequency;
}

double FitResult::model_value(double x) const {
  const double u = (x - center) / width;
  return amplitude * std::exp(-0.5 * u * u) *
         (1.0 + visibility_raw * std::cos(frequency * x + phase));
}

FitResult fit_fringe(const CentroidHistogram& hist, const FitOptions& options) {
  hist.validate();
  const int bins = hist.bin_count();
  const int n_free = options.fixed_frequency ? 5 : 6;
  if (bins < n_free + 1) {
    throw std::invalid_argument("fit_fringe: fewer bins than fit parameters");
  }

  std::vector<double> x(static_cast<std::size_t>(bins));
  std::vector<double> weight(static_cast<std::size_t>(bins));
  int populated = 0;
  double total = 0.0;
  for (int s = 0; s < bins; ++s) {
    x[static_cast<std::size_t>(s)] = hist.pixel_coordinate(s);
    // Poisson floor: a bin with no counts still constrains the fit at the
    // one-count level, and propagated uncertainties below one count must
    // not dominate the weights.
    weight[static_cast<std::size_t>(s)] =
        1.0 / std::max(hist.sigma[static_cast<std::size_t>(s)], 1.0);
    if (hist.counts[static_cast<std::size_t>(s)] != 0.0) ++populated;
    total += hist.counts[static_cast<std::size_t>(s)];
  }
  if (populated < 8) {
    throw std::invalid_argument("fit_fringe: fewer than 8 populated bins");
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("fit_fringe: histogram total is not positive");
  }
  const std::vector<double>& y = hist.counts;

  // Moment seeds over the positive part of the histogram.
  double pos_total = 0.0;
  double mean = 0.0;
  for (int s = 0; s < bins; ++s) {
    const double c = std::max(y[static_cast<std::size_t>(s)], 0.0);
    pos_total += c;
    mean += c * x[static_cast<std::size_t>(s)];
  }
  mean /= pos_total;
  double rms = 0.0;
  for (int s = 0; s < bins; ++s) {
    const double c = std::max(y[static_cast<std::size_t>(s)], 0.0);
    const double d = x[static_cast<std::size_t>(s)] - mean;
    rms += c * d * d;
  }
  rms = std::sqrt(rms / pos_total);

  Params theta;
  theta[0] = *std::max_element(y.begin(), y.end());
  theta[1] = mean;
  theta[2] = rms;

  double k0;
  bool seeded = false;
  if (options.fixed_frequency) {
    k0 = *options.fixed_frequency;
  } else if (options.frequency_hint) {
    k0 = *options.frequency_hint;
  } else {
    // Frequency scan with the envelope profiled out: at each trial k solve
    // the linear problem y ~ g (b0 + b1 cos kX + b2 sin kX), g fixed from
    // the moment seeds, and keep the k with least weighted residual. A
    // plain periodogram fails here because on a short array the envelope
    // carries more low-frequency power than the fringe.
    const double dx = x[1] - x[0];
    const double k_hi = std::numbers::pi / dx;
    const double k_lo = 1e-3;
    const double g_width = std::max(rms, dx);
    std::vector<double> g(static_cast<std::size_t>(bins));
    double yty = 0.0;
    for (int s = 0; s < bins; ++s) {
      const double u = (x[static_cast<std::size_t>(s)] - mean) / g_width;
      g[static_cast<std::size_t>(s)] = std::exp(-0.5 * u * u);
      const double wy =
          y[static_cast<std::size_t>(s)] * weight[static_cast<std::size_t>(s)];
      yty += wy * wy;
    }
    double best_ssr = std::numeric_limits<double>::infinity();
    std::array<double, 3> best_coeff{0.0, 0.0, 0.0};
    k0 = k_lo;
    const int grid = 4096;
    std::vector<double> normal(9);
    std::vector<double> rhs(3);
    std::vector<double> coeff;
    for (int i = 0; i < grid; ++i) {
      const double k = k_lo + (k_hi - k_lo) * i / (grid - 1);
      std::fill(normal.begin(), normal.end(), 0.0);
      std::fill(rhs.begin(), rhs.end(), 0.0);
      for (int s = 0; s < bins; ++s) {
        const double xi = x[static_cast<std::size_t>(s)];
        const double wi = weight[static_cast<std::size_t>(s)];
        const double base = g[static_cast<std::size_t>(s)] * wi;
        const double phi[3] = {base, base * std::cos(k * xi),
                               base * std::sin(k * xi)};
        const double wy = y[static_cast<std::size_t>(s)] * wi;
        for (int a = 0; a < 3; ++a) {
          rhs[static_cast<std::size_t>(a)] += phi[a] * wy;
          for (int b = a; b < 3; ++b) {
            normal[static_cast<std::size_t>(a * 3 + b)] += phi[a] * phi[b];
          }
        }
      }
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < a; ++b) {
          normal[static_cast<std::size_t>(a * 3 + b)] =
              normal[static_cast<std::size_t>(b * 3 + a)];
        }
      }
      if (!solve_dense(normal, rhs, 3, coeff)) continue;
      const double ssr = yty - (coeff[0] * rhs[0] + coeff[1] * rhs[1] +
                                coeff[2] * rhs[2]);
      if (ssr < best_ssr) {
        best_ssr = ssr;
        k0 = k;
        best_coeff = {coeff[0], coeff[1], coeff[2]};
      }
    }
    if (best_coeff[0] > 0.0) {
      theta[0] = best_coeff[0];
      theta[3] = std::min(std::hypot(best_coeff[1], best_coeff[2]) /
                              best_coeff[0],
                          1.2);
      theta[4] = std::atan2(-best_coeff[2], best_coeff[1]);
      seeded = true;
    }
  }

  if (!seeded) {
    // Fringe seed from the discrete Fourier component at k0.
    std::complex<double> z = 0.0;
    for (int s = 0; s < bins; ++s) {
      z += y[static_cast<std::size_t>(s)] *
           std::exp(std::complex<double>(0.0, -k0 * x[static_cast<std::size_t>(s)]));
    }
    theta[3] = std::min(2.0 * std::abs(z) / total, 1.2);
    theta[4] = std::arg(z);
  }
  theta[5] = k0;

  std::vector<int> free_idx = {0, 1, 2, 3, 4};
  if (!options.fixed_frequency) free_idx.push_back(5);

  FitResult result;
  result.frequency_fixed = options.fixed_frequency.has_value();
  result.n_free = n_free;

  double lambda = 1e-3;
  double cost = weighted_cost(theta, x, y, weight);
  bool converged = false;
  int iterations = 0;

  std::vector<double> hessian(static_cast<std::size_t>(n_free * n_free));
  std::vector<double> gradient(static_cast<std::size_t>(n_free));
  std::vector<double> damped(static_cast<std::size_t>(n_free * n_free));
  std::vector<double> step;
  std::array<double, kNumParams> row{};

  for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
    iterations = iter + 1;
    std::fill(hessian.begin(), hessian.end(), 0.0);
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (int s = 0; s < bins; ++s) {
      const double xi = x[static_cast<std::size_t>(s)];
      const double wi = weight[static_cast<std::size_t>(s)];
      jacobian_row(theta, xi, row);
      const double r = (y[static_cast<std::size_t>(s)] - model(theta, xi)) * wi;
      for (int a = 0; a < n_free; ++a) {
        const double ja = row[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(a)])] * wi;
        gradient[static_cast<std::size_t>(a)] += ja * r;
        for (int b = a; b < n_free; ++b) {
          const double jb =
              row[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(b)])] * wi;
          hessian[static_cast<std::size_t>(a * n_free + b)] += ja * jb;
        }
      }
    }
    for (int a = 0; a < n_free; ++a) {
      for (int b = 0; b < a; ++b) {
        hessian[static_cast<std::size_t>(a * n_free + b)] =
            hessian[static_cast<std::size_t>(b * n_free + a)];
      }
    }

    for (int attempt = 0; attempt < 30; ++attempt) {
      damped = hessian;
      for (int a = 0; a < n_free; ++a) {
        damped[static_cast<std::size_t>(a * n_free + a)] *= 1.0 + lambda;
      }
      if (!solve_dense(damped, gradient, n_free, step)) {
        lambda *= 10.0;
        continue;
      }
      Params trial = theta;
      double rel = 0.0;
      for (int a = 0; a < n_free; ++a) {
        const int idx = free_idx[static_cast<std::size_t>(a)];
        trial[idx] += step[static_cast<std::size_t>(a)];
        rel = std::max(rel, std::abs(step[static_cast<std::size_t>(a)]) /
                                (std::abs(theta[idx]) + 1e-12));
      }
      trial[2] = std::abs(trial[2]);
      const double trial_cost = weighted_cost(trial, x, y, weight);
      if (trial_cost <= cost) {
        theta = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        if (rel < options.parameter_tolerance) converged = true;
        break;
      }
      lambda *= 10.0;
    }
  }

  // Canonical form: non-negative visibility, phase in (-pi, pi].
  if (theta[3] < 0.0) {
    theta[3] = -theta[3];
    theta[4] += std::numbers::pi;
  }
  theta[4] = wrap_phase(theta[4]);

  // Covariance from the undamped normal matrix at the final iterate.
  std::fill(hessian.begin(), hessian.end(), 0.0);
  for (int s = 0; s < bins; ++s) {
    const double wi = weight[static_cast<std::size_t>(s)];
    jacobian_row(theta, x[static_cast<std::size_t>(s)], row);
    for (int a = 0; a < n_free; ++a) {
      const double ja = row[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(a)])] * wi;
      for (int b = a; b < n_free; ++b) {
        const double jb =
            row[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(b)])] * wi;
        hessian[static_cast<std::size_t>(a * n_free + b)] += ja * jb;
      }
    }
  }
  for (int a = 0; a < n_free; ++a) {
    for (int b = 0; b < a; ++b) {
      hessian[static_cast<std::size_t>(a * n_free + b)] =
          hessian[static_cast<std::size_t>(b * n_free + a)];
    }
  }
  std::vector<double> cov;
  std::array<double, kNumParams> sig{};
  if (invert_dense(hessian, n_free, cov)) {
    for (int a = 0; a < n_free; ++a) {
      sig[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(a)])] =
          std::sqrt(std::max(cov[static_cast<std::size_t>(a * n_free + a)], 0.0));
    }
    result.covariance = std::move(cov);
  } else {
    result.covariance.clear();
  }

  result.amplitude = theta[0];
  result.center = theta[1];
  result.width = theta[2];
  result.visibility_raw = theta[3];
  result.phase = theta[4];
  result.frequency = theta[5];
  result.amplitude_sigma = sig[0];
  result.center_sigma = sig[1];
  result.width_sigma = sig[2];
  result.visibility_sigma = sig[3];
  result.phase_sigma = sig[4];
  result.frequency_sigma = sig[5];
  result.chi_squared = cost;
  result.degrees_of_freedom = bins - n_free;
  result.iterations = iterations;
  result.converged = converged;
  result.visibility_clipped = theta[3] > 1.0;
  return result;
}

}  // namespace ocm
