#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ocm/accidentals.hpp"
#include "ocm/coincidence.hpp"
#include "ocm/event_sim.hpp"
#include "ocm/fit.hpp"
#include "ocm/projector.hpp"
#include "ocm/rng.hpp"

namespace {

using namespace ocm;

ArrayGeometry bench_geometry() {
  ArrayGeometry g;
  g.pixel_count = 11;
  g.pitch = 1.0;
  g.core_width = 1e-9;
  g.origin = 0.0;
  return g;
}

FringeConfig bench_fringe() {
  FringeConfig f;
  f.wavelength = 1.0;
  f.beam_angle = 2.0 * std::asin(1.0 / 6.0);
  f.phase0 = 0.4;
  f.singles_visibility = 1.0;
  f.envelope.kind = Envelope::Kind::Gaussian;
  f.envelope.center = 5.0;
  f.envelope.sigma = 1.8;
  return f;
}

SimRun bench_run(SourceKind kind, int n, std::uint64_t events) {
  SimRun run;
  run.source.kind = kind;
  run.source.photon_number = n;
  run.fringe = bench_fringe();
  run.geometry = bench_geometry();
  run.detector.efficiency = 1.0;
  run.detector.number_resolving = true;
  run.n_events = events;
  run.seed = 12345;
  return run;
}

void BM_JointDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimRun run = bench_run(SourceKind::NoonState, n, 1);
  for (auto _ : state) {
    JointDistribution joint =
        joint_distribution(run.source, run.fringe, run.geometry);
    benchmark::DoNotOptimize(joint.probabilities.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_JointDistribution)->Arg(2)->Arg(3)->Arg(4);

void BM_ProjectDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimRun run = bench_run(SourceKind::Classical, n, 1);
  const JointDistribution joint =
      joint_distribution(run.source, run.fringe, run.geometry);
  for (auto _ : state) {
    CentroidHistogram h = project_distribution(joint, run.geometry);
    benchmark::DoNotOptimize(h.counts.data());
  }
}
BENCHMARK(BM_ProjectDistribution)->Arg(2)->Arg(4);

void BM_SampleEvents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimRun run = bench_run(SourceKind::NoonState, n, 100000);
  for (auto _ : state) {
    SampledEvents sampled = sample_events(run);
    benchmark::DoNotOptimize(sampled.events.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(run.n_events));
}
BENCHMARK(BM_SampleEvents)->Arg(2)->Arg(4);

void BM_ProjectEvents(benchmark::State& state) {
  const SimRun run = bench_run(SourceKind::NoonState, 4, 1000000);
  const SampledEvents sampled = sample_events(run);
  for (auto _ : state) {
    CentroidHistogram h = project_events(sampled.events, 4, run.geometry);
    benchmark::DoNotOptimize(h.counts.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(sampled.events.size()));
}
BENCHMARK(BM_ProjectEvents);

void BM_FitFringe(benchmark::State& state) {
  const bool free_frequency = state.range(0) != 0;
  const SimRun run = bench_run(SourceKind::NoonState, 4, 1000000);
  const SampledEvents sampled = sample_events(run);
  const CentroidHistogram hist =
      project_events(sampled.events, 4, run.geometry);
  FitOptions options;
  if (!free_frequency) {
    options.fixed_frequency = 4.0 * run.fringe.spatial_frequency() *
                              run.geometry.pitch;
  }
  for (auto _ : state) {
    FitResult fit = fit_fringe(hist, options);
    benchmark::DoNotOptimize(&fit);
  }
}
BENCHMARK(BM_FitFringe)->Arg(0)->Arg(1);

void BM_CoincidenceStream(benchmark::State& state) {
  Rng rng(99);
  std::vector<PulseRecord> records;
  records.reserve(100000);
  for (std::uint64_t pulse = 0; pulse < 100000; ++pulse) {
    PulseRecord r;
    r.pulse_id = pulse;
    for (int c = 0; c < 11; ++c) {
      if (rng.bernoulli(0.1)) r.fired.push_back(c);
    }
    records.push_back(std::move(r));
  }
  for (auto _ : state) {
    CoincidenceCounter counter(11, 2);
    for (const PulseRecord& r : records) counter.process(r);
    benchmark::DoNotOptimize(counter.pulses());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_CoincidenceStream);

void BM_AccidentalEstimate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimRun run = bench_run(SourceKind::Classical, n, 1);
  const std::vector<double> p1 =
      singles_distribution(run.fringe, run.geometry);
  SinglesRates rates;
  rates.rate.resize(p1.size());
  rates.sigma.assign(p1.size(), 1e-6);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    rates.rate[i] = 0.01 * p1[i];
  }
  for (auto _ : state) {
    CentroidHistogram h =
        estimate_accidentals(rates, rates, n, 1e9, run.geometry, false);
    benchmark::DoNotOptimize(h.counts.data());
  }
}
BENCHMARK(BM_AccidentalEstimate)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
