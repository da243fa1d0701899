#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ocm/io.hpp"
#include "ocm/rng.hpp"
#include "ocm/svg_plot.hpp"

using namespace ocm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ocm_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("doubles are written in shortest round-trip form") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-2.5) == "-2.5");
  CHECK(io::format_double(0.0) == "0");
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, 30.0 * (rng.uniform() - 0.5));
    const double back = std::stod(io::format_double(v));
    CHECK(back == v);
  }
}

TEST_CASE("event streams round trip") {
  TempDir tmp;
  io::EventStream stream;
  stream.photon_number = 2;
  stream.pixel_count = 11;
  stream.events = {{0, {1, 4}}, {7, {0, 0}}, {123456789012345ULL, {10, 10}}};
  const fs::path p = tmp.file("events.txt");
  io::write_event_stream(p, stream);
  const io::EventStream back = io::read_event_stream(p);
  CHECK(back.photon_number == 2);
  CHECK(back.pixel_count == 11);
  REQUIRE(back.events.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.events[i].pulse_id == stream.events[i].pulse_id);
    CHECK(back.events[i].pixels == stream.events[i].pixels);
  }
  const std::string text = slurp(p);
  CHECK(text.rfind("# ocm-event-stream", 0) == 0);
}

TEST_CASE("event stream reader reports the offending line") {
  TempDir tmp;
  const fs::path p = tmp.file("bad.txt");
  std::ofstream(p) << "# ocm-event-stream\n# photon_number\t2\n"
                   << "# pixel_count\t11\n0\t1\t4\n1\t3\n";
  try {
    (void)io::read_event_stream(p);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.txt") != std::string::npos);
    CHECK(msg.find("5") != std::string::npos);
  }
}

TEST_CASE("wrong magic is rejected") {
  TempDir tmp;
  const fs::path p = tmp.file("nope.txt");
  std::ofstream(p) << "# something-else\n";
  CHECK_THROWS_AS((void)io::read_event_stream(p), std::runtime_error);
  CHECK_THROWS_AS((void)io::read_histogram(p), std::runtime_error);
  CHECK_THROWS_AS((void)io::read_pulse_stream(p), std::runtime_error);
}

TEST_CASE("missing files fail with the path in the message") {
  try {
    (void)io::read_histogram("/definitely/not/here.tsv");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("here.tsv") != std::string::npos);
  }
}

TEST_CASE("pulse streams round trip including empty pulses") {
  TempDir tmp;
  io::PulseStream stream;
  stream.channel_count = 11;
  stream.n_pulses = 1000;
  stream.records = {{0, {3}}, {5, {}}, {999, {0, 4, 10}}};
  const fs::path p = tmp.file("pulses.txt");
  io::write_pulse_stream(p, stream);
  const io::PulseStream back = io::read_pulse_stream(p);
  CHECK(back.channel_count == 11);
  CHECK(back.n_pulses == 1000);
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[0].fired == std::vector<int>{3});
  CHECK(back.records[1].fired.empty());
  CHECK(back.records[2].fired == std::vector<int>{0, 4, 10});
}

TEST_CASE("histograms round trip bit exactly") {
  TempDir tmp;
  CentroidHistogram h;
  h.photon_number = 2;
  h.pixel_count = 4;
  h.pitch = 250e-6;
  h.origin = -1.25e-3;
  h.counts = {0.0, 1.5, 0.1 + 0.2, 7.0, 1e-17, 123456.0, 2.0};
  h.sigma = {0.0, 1.224744871391589, 0.5477, 2.6457513110645907, 1e-9, 351.36, 1.4142};
  const fs::path p = tmp.file("hist.tsv");
  io::write_histogram(p, h);
  const CentroidHistogram back = io::read_histogram(p);
  CHECK(back.photon_number == h.photon_number);
  CHECK(back.pixel_count == h.pixel_count);
  CHECK(back.pitch == h.pitch);
  CHECK(back.origin == h.origin);
  REQUIRE(back.counts.size() == h.counts.size());
  for (std::size_t s = 0; s < h.counts.size(); ++s) {
    CHECK(back.counts[s] == h.counts[s]);
    CHECK(back.sigma[s] == h.sigma[s]);
  }
}

TEST_CASE("writers are deterministic") {
  TempDir tmp;
  CentroidHistogram h;
  h.photon_number = 1;
  h.pixel_count = 3;
  h.pitch = 1.0;
  h.counts = {1.0, 2.0, 3.0};
  h.sigma = {1.0, 1.4142135623730951, 1.7320508075688772};
  io::write_histogram(tmp.file("a.tsv"), h);
  io::write_histogram(tmp.file("b.tsv"), h);
  CHECK(slurp(tmp.file("a.tsv")) == slurp(tmp.file("b.tsv")));
}

TEST_CASE("joint maps round trip") {
  TempDir tmp;
  JointMap2D map;
  map.pixel_count = 3;
  map.values = {0.0, 1.0, 2.0, 1.0, 0.5, 3.0, 2.0, 3.0, 0.25};
  const fs::path p = tmp.file("map.tsv");
  io::write_joint_map(p, map);
  const JointMap2D back = io::read_joint_map(p);
  CHECK(back.pixel_count == 3);
  REQUIRE(back.values.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(back.values[i] == map.values[i]);
}

TEST_CASE("scaling tables round trip") {
  TempDir tmp;
  std::vector<VisibilityPoint> points = {
      {1, VisibilityKind::ClassicalTheory, 1.0, 0.0},
      {2, VisibilityKind::QuantumRaw, 0.6320667461678883, 0.0033423044173358247},
      {4, VisibilityKind::QuantumCorrected, 0.59, 0.08}};
  const fs::path p = tmp.file("scaling.tsv");
  io::write_scaling_table(p, points);
  const std::vector<VisibilityPoint> back = io::read_scaling_table(p);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].photon_number == points[i].photon_number);
    CHECK(back[i].kind == points[i].kind);
    CHECK(back[i].visibility == points[i].visibility);
    CHECK(back[i].sigma == points[i].sigma);
  }
}

TEST_CASE("key-value files round trip") {
  TempDir tmp;
  const io::KeyValues items = {{"label", "demo"},
                               {"visibility", "0.9932"},
                               {"note", "spaces are fine"}};
  const fs::path p = tmp.file("report.txt");
  io::write_key_values(p, items);
  const io::KeyValues back = io::read_key_values(p);
  REQUIRE(back.size() == 3);
  CHECK(back[0].first == "label");
  CHECK(back[0].second == "demo");
  CHECK(back[2].second == "spaces are fine");
}

TEST_CASE("fit reports carry the headline numbers") {
  TempDir tmp;
  FitResult fit;
  fit.amplitude = 1234.5;
  fit.center = 5.5;
  fit.width = 2.1;
  fit.visibility_raw = 0.77;
  fit.phase = -0.4;
  fit.frequency = 4.2;
  fit.visibility_sigma = 0.01;
  fit.covariance = {1.0, 0.5, 0.5, 2.0};
  fit.n_free = 2;
  fit.chi_squared = 17.5;
  fit.degrees_of_freedom = 16;
  fit.converged = true;
  const fs::path p = tmp.file("fit.txt");
  io::write_fit_report(p, fit);
  const io::KeyValues kv = io::read_key_values(p);
  auto get = [&](const std::string& key) -> std::string {
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
    }
    FAIL("missing key " << key);
    return {};
  };
  CHECK(std::stod(get("visibility_raw")) == 0.77);
  CHECK(std::stod(get("frequency")) == 4.2);
  CHECK(std::stod(get("chi_squared")) == 17.5);
  CHECK(get("converged") == "1");
}

TEST_CASE("line plots embed their data values") {
  TempDir tmp;
  SvgPlot plot(640, 480, "demo", "x", "y");
  const std::vector<double> x = {0.0, 1.0, 2.0};
  const std::vector<double> y = {10.0, 30.0, 20.0};
  const std::vector<double> err = {1.0, 2.0, 1.5};
  plot.add_points(x, y, err, "#d62728", "data");
  plot.add_line(x, y, "#1f77b4", true, "model");
  plot.add_vline(1.5, "#999999");
  const fs::path p = tmp.file("plot.svg");
  plot.write(p);
  const std::string svg = slurp(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("data-x=\"1\"") != std::string::npos);
  CHECK(svg.find("data-y=\"30\"") != std::string::npos);
  CHECK(svg.find("data-x=\"1.5\"") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("log axes skip non-positive values") {
  TempDir tmp;
  SvgPlot plot(640, 480, "log demo", "x", "y");
  const std::vector<double> x = {0.0, 1.0, 2.0};
  const std::vector<double> y = {100.0, 0.0, 1000.0};
  const std::vector<double> err = {0.0, 0.0, 0.0};
  plot.add_points(x, y, err, "#d62728", "data");
  plot.set_y_log(true);
  const std::string svg = plot.render();
  CHECK(svg.find("data-y=\"100\"") != std::string::npos);
  CHECK(svg.find("data-y=\"0\"") == std::string::npos);
}

TEST_CASE("heatmaps carry per-cell values") {
  TempDir tmp;
  JointMap2D map;
  map.pixel_count = 2;
  map.values = {0.1, 0.4, 0.4, 0.25};
  const fs::path p = tmp.file("heat.svg");
  write_heatmap_svg(p, map, "pair map");
  const std::string svg = slurp(p);
  CHECK(svg.find("data-value=\"0.4\"") != std::string::npos);
  CHECK(svg.find("data-i=\"1\"") != std::string::npos);
  CHECK(svg.find("data-j=\"0\"") != std::string::npos);
  CHECK(svg.find("pair map") != std::string::npos);
}
