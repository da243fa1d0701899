#include "ocm/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "ocm/io.hpp"
#include "ocm/scaling.hpp"
#include "ocm/svg_plot.hpp"

namespace ocm {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError(what); }

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_fail(context + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) config_fail(context + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& context, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail(context + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& context,
                        const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<double>() < 0) {
    config_fail(context + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& context, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_fail(context + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& context,
                       const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) config_fail(context + "." + key + ": expected a string");
  return v.get<std::string>();
}

Envelope parse_envelope(const json& obj) {
  check_keys(obj, "fringe.envelope", {"kind", "center_mm", "sigma_mm"});
  Envelope env;
  const std::string kind = get_string(obj, "fringe.envelope", "kind", "uniform");
  if (kind == "uniform") {
    env.kind = Envelope::Kind::Uniform;
    if (obj.contains("center_mm") || obj.contains("sigma_mm")) {
      config_fail("fringe.envelope: center_mm/sigma_mm require kind 'gaussian'");
    }
  } else if (kind == "gaussian") {
    env.kind = Envelope::Kind::Gaussian;
    if (!obj.contains("center_mm") || !obj.contains("sigma_mm")) {
      config_fail("fringe.envelope: gaussian needs center_mm and sigma_mm");
    }
    env.center = get_number(obj, "fringe.envelope", "center_mm", 0.0) * 1e-3;
    env.sigma = get_number(obj, "fringe.envelope", "sigma_mm", 0.0) * 1e-3;
  } else {
    config_fail("fringe.envelope.kind: expected 'uniform' or 'gaussian'");
  }
  return env;
}

FringeConfig parse_fringe(const json& obj) {
  check_keys(obj, "fringe",
             {"wavelength_nm", "beam_angle_mrad", "phase0_rad",
              "singles_visibility", "envelope"});
  FringeConfig fringe;
  fringe.wavelength = get_number(obj, "fringe", "wavelength_nm", 808.0) * 1e-9;
  fringe.beam_angle = get_number(obj, "fringe", "beam_angle_mrad", 0.16) * 1e-3;
  fringe.phase0 = get_number(obj, "fringe", "phase0_rad", 0.0);
  fringe.singles_visibility = get_number(obj, "fringe", "singles_visibility", 1.0);
  if (obj.contains("envelope")) fringe.envelope = parse_envelope(obj.at("envelope"));
  return fringe;
}

ArrayGeometry parse_geometry(const json& obj) {
  check_keys(obj, "geometry",
             {"pixel_count", "pitch_um", "core_width_um", "origin_mm"});
  ArrayGeometry geometry;
  geometry.pixel_count =
      static_cast<int>(get_count(obj, "geometry", "pixel_count", 11));
  geometry.pitch = get_number(obj, "geometry", "pitch_um", 250.0) * 1e-6;
  geometry.core_width = get_number(obj, "geometry", "core_width_um", 62.5) * 1e-6;
  geometry.origin = get_number(obj, "geometry", "origin_mm", 0.0) * 1e-3;
  return geometry;
}

SourceModel parse_source(const json& obj) {
  check_keys(obj, "source", {"kind", "photon_number", "background_fraction"});
  SourceModel source;
  const std::string kind = get_string(obj, "source", "kind", "");
  if (kind == "classical") {
    source.kind = SourceKind::Classical;
  } else if (kind == "noon") {
    source.kind = SourceKind::NoonState;
  } else if (kind == "mixed") {
    source.kind = SourceKind::Mixed;
  } else {
    config_fail("source.kind: expected 'classical', 'noon' or 'mixed'");
  }
  if (!obj.contains("photon_number")) {
    config_fail("source.photon_number: required");
  }
  source.photon_number =
      static_cast<int>(get_count(obj, "source", "photon_number", 0));
  source.background_fraction =
      get_number(obj, "source", "background_fraction", 0.0);
  return source;
}

DetectorModel parse_detector(const json& obj) {
  check_keys(obj, "detector",
             {"efficiency", "number_resolving", "dark_rate_per_pulse"});
  DetectorModel detector;
  detector.efficiency = get_number(obj, "detector", "efficiency", 1.0);
  detector.number_resolving = get_bool(obj, "detector", "number_resolving", false);
  detector.dark_rate_per_pulse =
      get_number(obj, "detector", "dark_rate_per_pulse", 0.0);
  return detector;
}

AnalysisOptions parse_analysis(const json& obj) {
  check_keys(obj, "analysis",
             {"accidental_subtraction", "k1", "singles_fit_events",
              "assumed_pulses", "calibration_pulses", "write_events"});
  AnalysisOptions analysis;
  analysis.accidental_subtraction =
      get_bool(obj, "analysis", "accidental_subtraction", false);
  if (obj.contains("k1")) {
    const json& k1 = obj.at("k1");
    if (k1.is_string()) {
      const std::string mode = k1.get<std::string>();
      if (mode == "from-config") {
        analysis.k1_source = K1Source::FromConfig;
      } else if (mode == "from-singles-fit") {
        analysis.k1_source = K1Source::FromSinglesFit;
      } else {
        config_fail("analysis.k1: expected 'from-config', 'from-singles-fit' "
                    "or {\"rad_per_pixel\": value}");
      }
    } else if (k1.is_object()) {
      check_keys(k1, "analysis.k1", {"rad_per_pixel"});
      if (!k1.contains("rad_per_pixel")) {
        config_fail("analysis.k1.rad_per_pixel: required");
      }
      analysis.k1_source = K1Source::Explicit;
      analysis.k1_explicit = get_number(k1, "analysis.k1", "rad_per_pixel", 0.0);
      if (!(analysis.k1_explicit > 0.0)) {
        config_fail("analysis.k1.rad_per_pixel: must be positive");
      }
    } else {
      config_fail("analysis.k1: expected a string mode or an object");
    }
  }
  analysis.singles_fit_events =
      get_count(obj, "analysis", "singles_fit_events", 1'000'000);
  analysis.assumed_pulses = get_number(obj, "analysis", "assumed_pulses", 0.0);
  analysis.calibration_pulses =
      get_number(obj, "analysis", "calibration_pulses", 0.0);
  analysis.write_events = get_bool(obj, "analysis", "write_events", true);
  return analysis;
}

void validate_config(const ExperimentConfig& config) {
  try {
    config.run.validate();
  } catch (const std::invalid_argument& e) {
    config_fail(e.what());
  }
  if (config.label.empty() ||
      config.label.find('/') != std::string::npos ||
      config.label.find('\\') != std::string::npos) {
    config_fail("label: must be a non-empty name without path separators");
  }
  const AnalysisOptions& a = config.analysis;
  if (a.k1_source == K1Source::Explicit && !(a.k1_explicit > 0.0)) {
    config_fail("analysis.k1.rad_per_pixel: must be positive");
  }
  if (a.k1_source == K1Source::FromSinglesFit && a.singles_fit_events == 0) {
    config_fail("analysis.singles_fit_events: must be positive");
  }
  if (a.accidental_subtraction) {
    if (config.run.source.kind != SourceKind::Mixed ||
        config.run.source.background_fraction <= 0.0) {
      config_fail(
          "analysis.accidental_subtraction: requires a mixed source with "
          "background_fraction > 0");
    }
    if (config.run.n_pulses == 0 && !(a.assumed_pulses > 0.0)) {
      config_fail(
          "analysis.assumed_pulses: required for accidental subtraction when "
          "the run is configured by n_events");
    }
  }
  if (config.run.detector.dark_rate_per_pulse != 0.0) {
    config_fail(
        "detector.dark_rate_per_pulse: event pipeline does not model dark "
        "counts; use the pulse-stream tools");
  }
}

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

void write_fringe_plot(const std::filesystem::path& path,
                       const CentroidHistogram& hist, const FitResult& fit,
                       const std::string& title,
                       std::optional<double> singles_period) {
  const int bins = hist.bin_count();
  std::vector<double> x(static_cast<std::size_t>(bins));
  for (int s = 0; s < bins; ++s) {
    x[static_cast<std::size_t>(s)] = hist.pixel_coordinate(s);
  }
  SvgPlot plot(760, 480, title, "centroid position (pixel pitch)", "counts");
  if (singles_period) {
    // Guide lines one singles period apart; the N-photon fringe fits N
    // periods between adjacent pairs.
    const double t1 = *singles_period;
    const double x_lo = x.front();
    const double x_hi = x.back();
    const double anchor = fit.center;
    const int m_lo = static_cast<int>(std::ceil((x_lo - anchor) / t1));
    const int m_hi = static_cast<int>(std::floor((x_hi - anchor) / t1));
    for (int m = m_lo; m <= m_hi; ++m) {
      plot.add_vline(anchor + m * t1, "#999999", true);
    }
  }
  std::vector<double> fx;
  std::vector<double> fy;
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    const double xi = x.front() + (x.back() - x.front()) * i / samples;
    fx.push_back(xi);
    fy.push_back(fit.model_value(xi));
  }
  plot.add_line(fx, fy, "#c03030", false, "fit");
  plot.add_points(x, hist.counts, hist.sigma, "#1f4e9c", "data");
  plot.write(path);
}

io::KeyValues report_key_values(const ExperimentConfig& config,
                                const RunArtifacts& art) {
  io::KeyValues kv;
  const SimRun& run = config.run;
  kv.push_back({"label", config.label});
  switch (run.source.kind) {
    case SourceKind::Classical: kv.push_back({"source", "classical"}); break;
    case SourceKind::NoonState: kv.push_back({"source", "noon"}); break;
    case SourceKind::Mixed: kv.push_back({"source", "mixed"}); break;
  }
  kv.push_back({"photon_number", std::to_string(run.source.photon_number)});
  if (run.source.kind == SourceKind::Mixed) {
    kv.push_back({"background_fraction",
                  io::format_double(run.source.background_fraction)});
  }
  kv.push_back({"seed", std::to_string(run.seed)});
  kv.push_back({"generated", std::to_string(art.report.generated)});
  kv.push_back({"detected", std::to_string(art.report.detected)});
  kv.push_back({"dropped_same_pixel", std::to_string(art.report.dropped_same_pixel)});
  kv.push_back({"dropped_inefficiency",
                std::to_string(art.report.dropped_inefficiency)});
  kv.push_back({"k1_rad_per_pixel", io::format_double(art.k1)});
  kv.push_back({"fit_frequency", io::format_double(art.fit_raw.frequency)});
  kv.push_back({"visibility_raw", io::format_double(art.fit_raw.visibility())});
  kv.push_back(
      {"visibility_raw_sigma", io::format_double(art.fit_raw.visibility_sigma)});
  if (art.fit_corrected) {
    kv.push_back({"visibility_corrected",
                  io::format_double(art.fit_corrected->visibility())});
    kv.push_back({"visibility_corrected_sigma",
                  io::format_double(art.fit_corrected->visibility_sigma)});
  }
  if (art.fit_singles) {
    kv.push_back({"singles_visibility_fit",
                  io::format_double(art.fit_singles->visibility())});
    kv.push_back({"singles_k1_fit",
                  io::format_double(art.fit_singles->frequency)});
  }
  kv.push_back(
      {"classical_visibility_theory",
       io::format_double(classical_visibility_theory(
           run.source.photon_number, run.fringe.singles_visibility))});
  return kv;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "config",
             {"label", "fringe", "geometry", "source", "detector", "run",
              "analysis", "output_dir"});
  ExperimentConfig config;
  config.label = get_string(root, "config", "label", "run");
  if (!root.contains("source")) config_fail("source: required section");
  if (!root.contains("run")) config_fail("run: required section");
  try {
    if (root.contains("fringe")) config.run.fringe = parse_fringe(root.at("fringe"));
    if (root.contains("geometry")) {
      config.run.geometry = parse_geometry(root.at("geometry"));
    }
    config.run.source = parse_source(root.at("source"));
    if (root.contains("detector")) {
      config.run.detector = parse_detector(root.at("detector"));
    }
    const json& run = root.at("run");
    check_keys(run, "run", {"n_events", "n_pulses", "seed"});
    config.run.n_events = get_count(run, "run", "n_events", 0);
    config.run.n_pulses = get_count(run, "run", "n_pulses", 0);
    config.run.seed = get_count(run, "run", "seed", 1);
    if (root.contains("analysis")) {
      config.analysis = parse_analysis(root.at("analysis"));
    }
    config.output_dir = get_string(root, "config", "output_dir", "out");
  } catch (const json::exception& e) {
    config_fail(std::string("invalid config value: ") + e.what());
  }
  validate_config(config);
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& configured) {
  const char* env = std::getenv(kOutputDirEnvVar);
  if (env != nullptr && env[0] != '\0') return std::filesystem::path(env);
  return configured;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const SimRun& run = config.run;
  const int n = run.source.photon_number;

  RunArtifacts art;
  art.directory = resolve_output_dir(config.output_dir) / config.label;
  std::filesystem::create_directories(art.directory);

  const auto emit = [&](const std::filesystem::path& name, auto&& writer) {
    const std::filesystem::path full = art.directory / name;
    writer(full);
    art.files.push_back(full);
  };

  try {
    SampledEvents sampled =
        stage("simulate", [&] { return sample_events(run); });
    art.report = sampled.report;

    art.raw = stage("project", [&] {
      return project_events(sampled.events, n, run.geometry);
    });

    // Fringe frequency for the constrained fit, per pixel pitch.
    art.k1 = run.fringe.spatial_frequency() * run.geometry.pitch;
    if (config.analysis.k1_source == K1Source::Explicit) {
      art.k1 = config.analysis.k1_explicit;
    } else if (config.analysis.k1_source == K1Source::FromSinglesFit) {
      stage("singles-fit", [&] {
        SimRun singles_run = run;
        singles_run.source.kind = SourceKind::Classical;
        singles_run.source.photon_number = 1;
        singles_run.source.background_fraction = 0.0;
        singles_run.n_events = config.analysis.singles_fit_events;
        singles_run.n_pulses = 0;
        singles_run.seed = run.seed ^ 0x517cc1b727220a95ULL;
        const SampledEvents singles_sampled = sample_events(singles_run);
        art.singles = project_events(singles_sampled.events, 1, run.geometry);
        art.fit_singles = fit_fringe(*art.singles, FitOptions{});
        art.k1 = art.fit_singles->frequency;
        return 0;
      });
    }

    if (config.analysis.accidental_subtraction) {
      stage("accidentals", [&] {
        const double assumed_pulses = config.analysis.assumed_pulses > 0.0
                                          ? config.analysis.assumed_pulses
                                          : static_cast<double>(run.n_pulses);
        const double calibration_pulses =
            config.analysis.calibration_pulses > 0.0
                ? config.analysis.calibration_pulses
                : assumed_pulses;
        // Background singles scale that reproduces the configured
        // background fraction over the assumed pulse count, split evenly
        // between the two beams.
        const double scale =
            std::pow(run.source.background_fraction *
                         static_cast<double>(run.generation_count()) /
                         assumed_pulses,
                     1.0 / n);
        const double exposure = 0.5 * scale * calibration_pulses /
                                run.detector.efficiency;
        const std::vector<std::uint64_t> counts_a =
            sample_singles_calibration(run, CalibrationBeam::Primary, exposure);
        const std::vector<std::uint64_t> counts_b = sample_singles_calibration(
            run, CalibrationBeam::Background, exposure);
        const SinglesRates rates_a =
            SinglesRates::from_counts(counts_a, calibration_pulses);
        const SinglesRates rates_b =
            SinglesRates::from_counts(counts_b, calibration_pulses);
        art.accidentals = estimate_accidentals(
            rates_a, rates_b, n, assumed_pulses, run.geometry,
            !run.detector.number_resolving);
        art.corrected = subtract_accidentals(art.raw, *art.accidentals);
        return 0;
      });
    }

    stage("fit", [&] {
      FitOptions options;
      options.fixed_frequency = n * art.k1;
      art.fit_raw = fit_fringe(art.raw, options);
      if (art.corrected) {
        art.fit_corrected = fit_fringe(*art.corrected, options);
      }
      return 0;
    });

    stage("report", [&] {
      if (config.analysis.write_events) {
        emit("events.txt", [&](const std::filesystem::path& p) {
          io::write_event_stream(
              p, {n, run.geometry.pixel_count, std::move(sampled.events)});
        });
      }
      emit("histogram_raw.tsv", [&](const std::filesystem::path& p) {
        io::write_histogram(p, art.raw);
      });
      emit("fit_raw.txt", [&](const std::filesystem::path& p) {
        io::write_fit_report(p, art.fit_raw);
      });
      const double singles_period =
          2.0 * std::numbers::pi / art.k1;
      emit("plot_raw.svg", [&](const std::filesystem::path& p) {
        write_fringe_plot(p, art.raw, art.fit_raw,
                          config.label + ": centroid fringe (raw)",
                          n > 1 ? std::optional<double>(singles_period)
                                : std::nullopt);
      });
      if (art.singles && art.fit_singles) {
        emit("histogram_singles.tsv", [&](const std::filesystem::path& p) {
          io::write_histogram(p, *art.singles);
        });
        emit("fit_singles.txt", [&](const std::filesystem::path& p) {
          io::write_fit_report(p, *art.fit_singles);
        });
        emit("plot_singles.svg", [&](const std::filesystem::path& p) {
          write_fringe_plot(p, *art.singles, *art.fit_singles,
                            config.label + ": singles fringe", std::nullopt);
        });
      }
      if (art.accidentals) {
        emit("histogram_accidentals.tsv", [&](const std::filesystem::path& p) {
          io::write_histogram(p, *art.accidentals);
        });
      }
      if (art.corrected && art.fit_corrected) {
        emit("histogram_corrected.tsv", [&](const std::filesystem::path& p) {
          io::write_histogram(p, *art.corrected);
        });
        emit("fit_corrected.txt", [&](const std::filesystem::path& p) {
          io::write_fit_report(p, *art.fit_corrected);
        });
        emit("plot_corrected.svg", [&](const std::filesystem::path& p) {
          write_fringe_plot(p, *art.corrected, *art.fit_corrected,
                            config.label + ": centroid fringe (corrected)",
                            std::optional<double>(singles_period));
        });
      }
      emit("report.txt", [&](const std::filesystem::path& p) {
        io::write_key_values(p, report_key_values(config, art));
      });
      return 0;
    });
  } catch (...) {
    std::error_code ec;
    for (const std::filesystem::path& file : art.files) {
      std::filesystem::remove(file, ec);
    }
    std::filesystem::remove(art.directory, ec);  // only removes if empty
    throw;
  }
  return art;
}

namespace {

// Shared demonstration geometry: the 11-pixel array with 250 um pitch and
// 62.5 um cores, beam angle tuned to three pixels per fringe period so the
// array resolves the pattern, Gaussian beam spot covering the middle of
// the array.
ArrayGeometry preset_geometry() {
  ArrayGeometry geometry;
  geometry.pixel_count = 11;
  geometry.pitch = 250e-6;
  geometry.core_width = 62.5e-6;
  geometry.origin = 0.0;
  return geometry;
}

FringeConfig preset_fringe(bool uniform_envelope) {
  FringeConfig fringe;
  fringe.wavelength = 808e-9;
  const double pixels_per_period = 3.0;
  fringe.beam_angle =
      2.0 * std::asin(fringe.wavelength /
                      (2.0 * pixels_per_period * preset_geometry().pitch));
  fringe.phase0 = 0.0;
  fringe.singles_visibility = 0.9;
  if (uniform_envelope) {
    fringe.envelope.kind = Envelope::Kind::Uniform;
  } else {
    fringe.envelope.kind = Envelope::Kind::Gaussian;
    fringe.envelope.center = 1.25e-3;
    fringe.envelope.sigma = 0.45e-3;
  }
  return fringe;
}

DetectorModel preset_detector() {
  DetectorModel detector;
  detector.efficiency = 1.0;
  detector.number_resolving = true;
  detector.dark_rate_per_pulse = 0.0;
  return detector;
}

ExperimentConfig preset_run(const std::filesystem::path& dir,
                            const std::string& label, SourceKind kind, int n,
                            std::uint64_t events, std::uint64_t seed) {
  ExperimentConfig config;
  config.label = label;
  config.output_dir = dir;
  config.run.fringe = preset_fringe(false);
  config.run.geometry = preset_geometry();
  config.run.detector = preset_detector();
  config.run.source.kind = kind;
  config.run.source.photon_number = n;
  config.run.n_events = events;
  config.run.seed = seed;
  config.analysis.k1_source = K1Source::FromSinglesFit;
  config.analysis.singles_fit_events = events;
  config.analysis.write_events = false;
  return config;
}

PresetResult preset_figure1b(const std::filesystem::path& dir,
                             std::uint64_t seed, std::uint64_t events) {
  PresetResult result;
  result.directory = dir;
  std::filesystem::create_directories(dir);

  SourceModel classical{SourceKind::Classical, 2, 0.0};
  SourceModel noon{SourceKind::NoonState, 2, 0.0};
  const FringeConfig fringe = preset_fringe(true);
  const ArrayGeometry geometry = preset_geometry();

  const auto emit = [&](const std::string& name, auto&& writer) {
    const std::filesystem::path full = dir / name;
    writer(full);
    result.files.push_back(full);
  };

  const JointDistribution classical_joint =
      joint_distribution(classical, fringe, geometry);
  const JointDistribution noon_joint = joint_distribution(noon, fringe, geometry);
  emit("theory_classical_map.tsv", [&](const std::filesystem::path& p) {
    io::write_joint_map(p, joint_map_2d(classical_joint));
  });
  emit("theory_classical_map.svg", [&](const std::filesystem::path& p) {
    write_heatmap_svg(p, joint_map_2d(classical_joint),
                      "two-photon joint distribution, classical");
  });
  emit("theory_noon_map.tsv", [&](const std::filesystem::path& p) {
    io::write_joint_map(p, joint_map_2d(noon_joint));
  });
  emit("theory_noon_map.svg", [&](const std::filesystem::path& p) {
    write_heatmap_svg(p, joint_map_2d(noon_joint),
                      "two-photon joint distribution, N00N");
  });

  SimRun run;
  run.fringe = fringe;
  run.geometry = geometry;
  run.detector = preset_detector();
  run.n_events = events;
  for (const bool quantum : {false, true}) {
    run.source = quantum ? noon : classical;
    run.seed = seed + (quantum ? 1 : 0);
    const SampledEvents sampled = sample_events(run);
    const JointMap2D map = joint_map_2d(sampled.events, geometry.pixel_count);
    const std::string stem = quantum ? "sim_noon_map" : "sim_classical_map";
    emit(stem + ".tsv", [&](const std::filesystem::path& p) {
      io::write_joint_map(p, map);
    });
    emit(stem + ".svg", [&](const std::filesystem::path& p) {
      write_heatmap_svg(p, map,
                        quantum ? "sampled joint map, N00N"
                                : "sampled joint map, classical");
    });
  }
  return result;
}

void append_files(PresetResult& result, const RunArtifacts& art) {
  result.files.insert(result.files.end(), art.files.begin(), art.files.end());
}

PresetResult preset_figure3(const std::filesystem::path& dir,
                            std::uint64_t seed, std::uint64_t events) {
  PresetResult result;
  result.directory = dir;
  std::filesystem::create_directories(dir);

  std::vector<VisibilityPoint> measured;
  std::uint64_t run_seed = seed;
  for (int n = 1; n <= 4; ++n) {
    const RunArtifacts art = run_experiment(preset_run(
        dir, "classical-n" + std::to_string(n), SourceKind::Classical, n,
        events, run_seed++));
    append_files(result, art);
    measured.push_back({n, VisibilityKind::ClassicalMeasured,
                        art.fit_raw.visibility(),
                        art.fit_raw.visibility_sigma});
  }
  for (int n = 2; n <= 4; ++n) {
    const RunArtifacts art = run_experiment(
        preset_run(dir, "noon-n" + std::to_string(n), SourceKind::NoonState, n,
                   events, run_seed++));
    append_files(result, art);
    measured.push_back({n, VisibilityKind::QuantumRaw,
                        art.fit_raw.visibility(),
                        art.fit_raw.visibility_sigma});
  }

  const std::vector<VisibilityPoint> table =
      scaling_table(4, preset_fringe(false).singles_visibility, measured);
  const std::filesystem::path table_path = dir / "visibility_summary.tsv";
  io::write_scaling_table(table_path, table);
  result.files.push_back(table_path);
  return result;
}

void write_scaling_plot(const std::filesystem::path& path,
                        std::span<const VisibilityPoint> table,
                        std::span<const VisibilityPoint> reference) {
  SvgPlot plot(680, 480, "centroid fringe visibility vs photon number",
               "photon number N", "visibility");
  plot.set_y_log(true);
  std::vector<double> tx;
  std::vector<double> ty;
  for (const VisibilityPoint& p : table) {
    if (p.kind == VisibilityKind::ClassicalTheory) {
      tx.push_back(p.photon_number);
      ty.push_back(p.visibility);
    }
  }
  plot.add_line(tx, ty, "#444444", true, "classical theory");

  const auto add_kind = [&](std::span<const VisibilityPoint> points,
                            VisibilityKind kind, const std::string& color,
                            const std::string& label, double x_shift) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;
    for (const VisibilityPoint& p : points) {
      if (p.kind != kind) continue;
      x.push_back(p.photon_number + x_shift);
      y.push_back(p.visibility);
      err.push_back(p.sigma);
    }
    if (!x.empty()) plot.add_points(x, y, err, color, label);
  };
  add_kind(table, VisibilityKind::ClassicalMeasured, "#1f4e9c", "classical", 0.0);
  add_kind(table, VisibilityKind::QuantumRaw, "#c07820", "quantum raw", 0.0);
  add_kind(table, VisibilityKind::QuantumCorrected, "#208040",
           "quantum corrected", 0.0);
  add_kind(reference, VisibilityKind::ClassicalMeasured, "#9db7dd",
           "classical (reference)", 0.12);
  add_kind(reference, VisibilityKind::QuantumRaw, "#e0bc8a",
           "quantum raw (reference)", 0.12);
  add_kind(reference, VisibilityKind::QuantumCorrected, "#8fc9a4",
           "quantum corrected (reference)", 0.12);
  plot.write(path);
}

PresetResult preset_figure4(const std::filesystem::path& dir,
                            std::uint64_t seed, std::uint64_t events) {
  PresetResult result;
  result.directory = dir;
  std::filesystem::create_directories(dir);

  std::vector<VisibilityPoint> measured;
  std::uint64_t run_seed = seed;
  for (int n = 1; n <= 4; ++n) {
    const RunArtifacts art = run_experiment(preset_run(
        dir, "classical-n" + std::to_string(n), SourceKind::Classical, n,
        events, run_seed++));
    append_files(result, art);
    measured.push_back({n, VisibilityKind::ClassicalMeasured,
                        art.fit_raw.visibility(),
                        art.fit_raw.visibility_sigma});
  }
  for (int n = 2; n <= 4; ++n) {
    ExperimentConfig config =
        preset_run(dir, "mixed-n" + std::to_string(n), SourceKind::Mixed, n,
                   events, run_seed++);
    config.run.source.background_fraction = 0.4;
    config.analysis.accidental_subtraction = true;
    config.analysis.assumed_pulses = 1e9;
    const RunArtifacts art = run_experiment(config);
    append_files(result, art);
    measured.push_back({n, VisibilityKind::QuantumRaw,
                        art.fit_raw.visibility(),
                        art.fit_raw.visibility_sigma});
    measured.push_back({n, VisibilityKind::QuantumCorrected,
                        art.fit_corrected->visibility(),
                        art.fit_corrected->visibility_sigma});
  }

  const std::vector<VisibilityPoint> table =
      scaling_table(4, preset_fringe(false).singles_visibility, measured);
  const std::vector<VisibilityPoint> reference = reference_visibilities();

  const std::filesystem::path table_path = dir / "scaling_table.tsv";
  io::write_scaling_table(table_path, table);
  result.files.push_back(table_path);
  const std::filesystem::path ref_path = dir / "reference_visibilities.tsv";
  io::write_scaling_table(ref_path, reference);
  result.files.push_back(ref_path);
  const std::filesystem::path plot_path = dir / "scaling_plot.svg";
  write_scaling_plot(plot_path, table, reference);
  result.files.push_back(plot_path);
  return result;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"figure1b", "figure3", "figure4"};
}

PresetResult run_preset(const std::string& name,
                        const std::filesystem::path& output_dir,
                        std::uint64_t seed, std::uint64_t events) {
  const std::filesystem::path base =
      resolve_output_dir(output_dir.empty() ? std::filesystem::path("out")
                                            : output_dir) /
      name;
  const std::uint64_t use_seed = seed != 0 ? seed : 20230808;
  if (name == "figure1b") {
    return preset_figure1b(base, use_seed, events != 0 ? events : 200'000);
  }
  if (name == "figure3") {
    return preset_figure3(base, use_seed, events != 0 ? events : 1'000'000);
  }
  if (name == "figure4") {
    return preset_figure4(base, use_seed, events != 0 ? events : 1'000'000);
  }
  config_fail("unknown preset '" + name + "'; available: figure1b, figure3, figure4");
}

}  // namespace ocm
