// Command line front end for the centroid-fringe simulator: full
// simulation runs from JSON configs, canned demonstration presets, and
// standalone fitting / coincidence counting on saved data files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ocm/coincidence.hpp"
#include "ocm/io.hpp"
#include "ocm/pipeline.hpp"
#include "ocm/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int exit_config = 2;
constexpr int exit_runtime = 1;

fs::path output_base(const std::optional<std::string>& out_flag,
                     const fs::path& input) {
  if (out_flag) return fs::path(*out_flag);
  const char* env = std::getenv(ocm::kOutputDirEnvVar);
  if (env != nullptr && env[0] != '\0') return fs::path(env);
  const fs::path parent = input.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

void print_fit(const ocm::FitResult& fit) {
  std::cout << "  visibility   " << ocm::io::format_double(fit.visibility())
            << " +- " << ocm::io::format_double(fit.visibility_sigma);
  if (fit.visibility_clipped) {
    std::cout << " (raw " << ocm::io::format_double(fit.visibility_raw) << ")";
  }
  std::cout << "\n  frequency    " << ocm::io::format_double(fit.frequency)
            << " rad/pixel"
            << (fit.frequency_fixed ? " (fixed)" : " (free)")
            << "\n  period       " << ocm::io::format_double(fit.fringe_period())
            << " pixel pitch\n  chi2/dof     "
            << ocm::io::format_double(fit.chi_squared) << "/"
            << fit.degrees_of_freedom
            << (fit.converged ? "" : "\n  WARNING: fit did not converge")
            << "\n";
}

int cmd_run(const std::string& config_path) {
  const ocm::ExperimentConfig config =
      ocm::parse_config_file(fs::path(config_path));
  const ocm::RunArtifacts art = ocm::run_experiment(config);
  std::cout << "run '" << config.label << "': " << art.report.detected
            << " events detected of " << art.report.generated << " generated\n";
  std::cout << "raw fit:\n";
  print_fit(art.fit_raw);
  if (art.fit_corrected) {
    std::cout << "corrected fit:\n";
    print_fit(*art.fit_corrected);
  }
  std::cout << art.files.size() << " files written to " << art.directory.string()
            << "\n";
  return 0;
}

int cmd_preset(const std::string& name, const std::optional<std::string>& out,
               std::uint64_t seed, std::uint64_t events) {
  const ocm::PresetResult result = ocm::run_preset(
      name, out ? fs::path(*out) : fs::path(), seed, events);
  std::cout << "preset '" << name << "': " << result.files.size()
            << " files written to " << result.directory.string() << "\n";
  return 0;
}

int cmd_fit(const std::string& hist_path, const std::optional<double>& k1,
            const std::optional<std::string>& out, bool plot) {
  const fs::path input(hist_path);
  const ocm::CentroidHistogram hist = ocm::io::read_histogram(input);
  ocm::FitOptions options;
  if (k1) {
    if (!(*k1 > 0.0)) {
      throw ocm::ConfigError("--k1 must be positive");
    }
    options.fixed_frequency = *k1 * hist.photon_number;
  }
  const ocm::FitResult fit = ocm::fit_fringe(hist, options);
  std::cout << "fit of " << input.string() << " (N=" << hist.photon_number
            << ", " << hist.bin_count() << " bins):\n";
  print_fit(fit);

  const fs::path base = output_base(out, input);
  fs::create_directories(base);
  const std::string stem = input.stem().string();
  const fs::path report = base / ("fit_" + stem + ".txt");
  ocm::io::write_fit_report(report, fit);
  std::cout << "wrote " << report.string() << "\n";
  if (plot) {
    const fs::path svg = base / ("fit_" + stem + ".svg");
    const int bins = hist.bin_count();
    std::vector<double> x(static_cast<std::size_t>(bins));
    for (int s = 0; s < bins; ++s) {
      x[static_cast<std::size_t>(s)] = hist.pixel_coordinate(s);
    }
    ocm::SvgPlot chart(760, 480, "centroid fringe fit: " + stem,
                       "centroid position (pixel pitch)", "counts");
    std::vector<double> fx;
    std::vector<double> fy;
    for (int i = 0; i <= 400; ++i) {
      const double xi = x.front() + (x.back() - x.front()) * i / 400.0;
      fx.push_back(xi);
      fy.push_back(fit.model_value(xi));
    }
    chart.add_line(fx, fy, "#c03030", false, "fit");
    chart.add_points(x, hist.counts, hist.sigma, "#1f4e9c", "data");
    chart.write(svg);
    std::cout << "wrote " << svg.string() << "\n";
  }
  return 0;
}

int cmd_coincidences(const std::string& pulses_path, int fold,
                     const std::optional<int>& channels,
                     const std::optional<std::string>& out) {
  const fs::path input(pulses_path);
  ocm::io::PulseStream stream = ocm::io::read_pulse_stream(input);
  const int channel_count = channels ? *channels : stream.channel_count;
  if (channel_count < 2) {
    throw ocm::ConfigError(
        "channel count unknown; pass --channels or add a channel_count header");
  }
  ocm::CoincidenceCounter counter =
      ocm::extract_coincidences(stream.records, channel_count, fold);

  std::cout << counter.pulses() << " pulse records, " << counter.events().size()
            << " " << fold << "-fold events\n";
  for (int k = 0; k <= channel_count; ++k) {
    const std::uint64_t total = counter.fold_totals()[static_cast<std::size_t>(k)];
    if (total != 0) std::cout << "  fold " << k << ": " << total << "\n";
  }

  const fs::path base = output_base(out, input);
  fs::create_directories(base);
  const std::string stem = input.stem().string();

  const fs::path events_path = base / ("events_" + stem + ".txt");
  ocm::io::write_event_stream(events_path,
                              {fold, channel_count, counter.events()});
  std::cout << "wrote " << events_path.string() << "\n";

  const fs::path subsets_path = base / ("subsets_" + stem + ".tsv");
  {
    std::ofstream outfile(subsets_path);
    outfile << "# ocm-subset-counts\n";
    outfile << "# channel_count\t" << channel_count << "\n";
    outfile << "# columns\tfold\tchannels\tcount\n";
    for (int k = 1; k <= counter.max_tracked_fold(); ++k) {
      for (const auto& subset : counter.nonzero_subsets(k)) {
        outfile << k << '\t';
        for (std::size_t i = 0; i < subset.channels.size(); ++i) {
          if (i > 0) outfile << ',';
          outfile << subset.channels[i];
        }
        outfile << '\t' << subset.count << '\n';
      }
    }
  }
  std::cout << "wrote " << subsets_path.string() << "\n";

  const fs::path folds_path = base / ("folds_" + stem + ".txt");
  {
    ocm::io::KeyValues kv;
    kv.push_back({"pulses", std::to_string(counter.pulses())});
    kv.push_back({"target_fold", std::to_string(fold)});
    kv.push_back({"target_events", std::to_string(counter.events().size())});
    for (int k = 0; k <= channel_count; ++k) {
      kv.push_back({"fold_" + std::to_string(k),
                    std::to_string(counter.fold_totals()[static_cast<std::size_t>(k)])});
    }
    for (int c = 0; c < channel_count; ++c) {
      kv.push_back({"singles_rate_" + std::to_string(c),
                    ocm::io::format_double(counter.singles_rate(c))});
    }
    ocm::io::write_key_values(folds_path, kv);
  }
  std::cout << "wrote " << folds_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-photon centroid fringe simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "simulate and analyze one JSON config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();

  std::string preset_name;
  std::optional<std::string> preset_out;
  std::uint64_t preset_seed = 0;
  std::uint64_t preset_events = 0;
  bool preset_list = false;
  CLI::App* preset = app.add_subcommand("preset", "run a canned demonstration");
  preset->add_option("name", preset_name, "preset name");
  preset->add_option("--out", preset_out, "output directory");
  preset->add_option("--seed", preset_seed, "override the preset seed");
  preset->add_option("--events", preset_events, "override events per run");
  preset->add_flag("--list", preset_list, "list preset names and exit");

  std::string hist_path;
  std::optional<double> fit_k1;
  std::optional<std::string> fit_out;
  bool fit_plot = false;
  CLI::App* fit = app.add_subcommand("fit", "fit a saved centroid histogram");
  fit->add_option("histogram", hist_path, "histogram file (TSV)")->required();
  fit->add_option("--k1", fit_k1,
                  "singles fringe frequency (rad per pixel); constrains the "
                  "fit to N times this value");
  fit->add_option("--out", fit_out, "output directory");
  fit->add_flag("--plot", fit_plot, "also write an SVG plot");

  std::string pulses_path;
  int fold = 2;
  std::optional<int> channels;
  std::optional<std::string> coin_out;
  CLI::App* coin =
      app.add_subcommand("coincidences", "count coincidences in a pulse stream");
  coin->add_option("pulses", pulses_path, "pulse stream file")->required();
  coin->add_option("--fold", fold, "coincidence fold to extract (default 2)");
  coin->add_option("--channels", channels, "override the channel count");
  coin->add_option("--out", coin_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (preset->parsed()) {
      if (preset_list) {
        for (const std::string& name : ocm::preset_names()) {
          std::cout << name << "\n";
        }
        return 0;
      }
      if (preset_name.empty()) {
        throw ocm::ConfigError("preset: name required (or use --list)");
      }
      return cmd_preset(preset_name, preset_out, preset_seed, preset_events);
    }
    if (fit->parsed()) return cmd_fit(hist_path, fit_k1, fit_out, fit_plot);
    if (coin->parsed()) {
      return cmd_coincidences(pulses_path, fold, channels, coin_out);
    }
  } catch (const ocm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return 0;
}
