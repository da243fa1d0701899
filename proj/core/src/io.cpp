#include "ocm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ocm::io {

namespace {

void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string() + " for reading");
  }
  return in;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string token;
  while (iss >> token) tokens.push_back(token);
  return tokens;
}

double parse_double(const std::string& token, const std::filesystem::path& path,
                    std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(path, line, "bad number '" + token + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& token, const std::filesystem::path& path,
              std::size_t line) {
  Int value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(path, line, "bad integer '" + token + "'");
  }
  return value;
}

// Splits "# key<TAB>value..." header lines; returns false for data lines.
bool header_line(const std::string& line, std::string& key, std::string& value) {
  if (line.empty() || line[0] != '#') return false;
  std::size_t start = 1;
  while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
  const std::size_t sep = line.find_first_of(" \t", start);
  if (sep == std::string::npos) {
    key = line.substr(start);
    value.clear();
    return true;
  }
  key = line.substr(start, sep - start);
  std::size_t vstart = sep;
  while (vstart < line.size() && (line[vstart] == ' ' || line[vstart] == '\t')) ++vstart;
  value = line.substr(vstart);
  return true;
}

// Every container format opens with a magic line naming the format;
// readers refuse files that start with anything else.
void expect_magic(std::istream& in, const std::filesystem::path& path,
                  const char* magic) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("# ") + magic) {
    throw std::runtime_error(path.string() + ": not an " + magic + " file");
  }
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

void write_event_stream(const std::filesystem::path& path, const EventStream& stream) {
  std::ofstream out = open_out(path);
  out << "# ocm-event-stream\n";
  out << "# photon_number\t" << stream.photon_number << "\n";
  out << "# pixel_count\t" << stream.pixel_count << "\n";
  out << "# columns\tpulse_id\tpixels\n";
  for (const DetectionEvent& event : stream.events) {
    out << event.pulse_id;
    for (const int p : event.pixels) out << '\t' << p;
    out << '\n';
  }
}

EventStream read_event_stream(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, path, "ocm-event-stream");
  EventStream stream;
  std::string line;
  std::string key;
  std::string value;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (header_line(line, key, value)) {
      if (key == "photon_number") stream.photon_number = parse_int<int>(value, path, line_no);
      if (key == "pixel_count") stream.pixel_count = parse_int<int>(value, path, line_no);
      continue;
    }
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    DetectionEvent event;
    event.pulse_id = parse_int<std::uint64_t>(tokens[0], path, line_no);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      event.pixels.push_back(parse_int<int>(tokens[i], path, line_no));
    }
    if (stream.photon_number > 0 &&
        static_cast<int>(event.pixels.size()) != stream.photon_number) {
      fail(path, line_no, "event arity does not match photon_number header");
    }
    stream.events.push_back(std::move(event));
  }
  if (stream.photon_number == 0 && !stream.events.empty()) {
    stream.photon_number = static_cast<int>(stream.events.front().pixels.size());
  }
  return stream;
}

void write_pulse_stream(const std::filesystem::path& path, const PulseStream& stream) {
  std::ofstream out = open_out(path);
  out << "# ocm-pulse-stream\n";
  out << "# channel_count\t" << stream.channel_count << "\n";
  out << "# pulses\t" << stream.n_pulses << "\n";
  out << "# columns\tpulse_id\tfired_channels\n";
  for (const PulseRecord& record : stream.records) {
    out << record.pulse_id;
    for (const int c : record.fired) out << '\t' << c;
    out << '\n';
  }
}

PulseStream read_pulse_stream(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, path, "ocm-pulse-stream");
  PulseStream stream;
  std::string line;
  std::string key;
  std::string value;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (header_line(line, key, value)) {
      if (key == "channel_count") stream.channel_count = parse_int<int>(value, path, line_no);
      if (key == "pulses") stream.n_pulses = parse_int<std::uint64_t>(value, path, line_no);
      continue;
    }
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    PulseRecord record;
    record.pulse_id = parse_int<std::uint64_t>(tokens[0], path, line_no);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      record.fired.push_back(parse_int<int>(tokens[i], path, line_no));
    }
    stream.records.push_back(std::move(record));
  }
  if (stream.n_pulses == 0 && !stream.records.empty()) {
    stream.n_pulses = stream.records.back().pulse_id + 1;
  }
  return stream;
}

void write_histogram(const std::filesystem::path& path, const CentroidHistogram& hist) {
  hist.validate();
  std::ofstream out = open_out(path);
  out << "# ocm-centroid-histogram\n";
  out << "# photon_number\t" << hist.photon_number << "\n";
  out << "# pixel_count\t" << hist.pixel_count << "\n";
  out << "# pitch_m\t" << format_double(hist.pitch) << "\n";
  out << "# origin_m\t" << format_double(hist.origin) << "\n";
  out << "# columns\tbin_sum\tcentroid_mm\tcounts\tsigma\n";
  for (int s = 0; s < hist.bin_count(); ++s) {
    out << s << '\t' << format_double(hist.centroid_coordinate(s) * 1e3) << '\t'
        << format_double(hist.counts[static_cast<std::size_t>(s)]) << '\t'
        << format_double(hist.sigma[static_cast<std::size_t>(s)]) << '\n';
  }
}

CentroidHistogram read_histogram(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, path, "ocm-centroid-histogram");
  CentroidHistogram hist;
  std::string line;
  std::string key;
  std::string value;
  std::size_t line_no = 1;
  std::vector<std::pair<int, std::pair<double, double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (header_line(line, key, value)) {
      if (key == "photon_number") hist.photon_number = parse_int<int>(value, path, line_no);
      if (key == "pixel_count") hist.pixel_count = parse_int<int>(value, path, line_no);
      if (key == "pitch_m") hist.pitch = parse_double(value, path, line_no);
      if (key == "origin_m") hist.origin = parse_double(value, path, line_no);
      continue;
    }
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) fail(path, line_no, "expected 4 columns");
    rows.push_back({parse_int<int>(tokens[0], path, line_no),
                    {parse_double(tokens[2], path, line_no),
                     parse_double(tokens[3], path, line_no)}});
  }
  if (hist.photon_number < 1 || hist.pixel_count < 2) {
    throw std::runtime_error(path.string() + ": missing histogram headers");
  }
  const int bins = hist.bin_count();
  if (static_cast<int>(rows.size()) != bins) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(bins) +
                             " bins, found " + std::to_string(rows.size()));
  }
  hist.counts.assign(static_cast<std::size_t>(bins), 0.0);
  hist.sigma.assign(static_cast<std::size_t>(bins), 0.0);
  for (const auto& [s, cs] : rows) {
    if (s < 0 || s >= bins) {
      throw std::runtime_error(path.string() + ": bin_sum out of range");
    }
    hist.counts[static_cast<std::size_t>(s)] = cs.first;
    hist.sigma[static_cast<std::size_t>(s)] = cs.second;
  }
  hist.validate();
  return hist;
}

void write_fit_report(const std::filesystem::path& path, const FitResult& fit) {
  KeyValues kv;
  kv.push_back({"converged", fit.converged ? "1" : "0"});
  kv.push_back({"iterations", std::to_string(fit.iterations)});
  kv.push_back({"amplitude", format_double(fit.amplitude)});
  kv.push_back({"amplitude_sigma", format_double(fit.amplitude_sigma)});
  kv.push_back({"center", format_double(fit.center)});
  kv.push_back({"center_sigma", format_double(fit.center_sigma)});
  kv.push_back({"width", format_double(fit.width)});
  kv.push_back({"width_sigma", format_double(fit.width_sigma)});
  kv.push_back({"visibility", format_double(fit.visibility())});
  kv.push_back({"visibility_raw", format_double(fit.visibility_raw)});
  kv.push_back({"visibility_sigma", format_double(fit.visibility_sigma)});
  kv.push_back({"visibility_clipped", fit.visibility_clipped ? "1" : "0"});
  kv.push_back({"phase", format_double(fit.phase)});
  kv.push_back({"phase_sigma", format_double(fit.phase_sigma)});
  kv.push_back({"frequency", format_double(fit.frequency)});
  kv.push_back({"frequency_sigma", format_double(fit.frequency_sigma)});
  kv.push_back({"frequency_fixed", fit.frequency_fixed ? "1" : "0"});
  kv.push_back({"fringe_period", format_double(fit.fringe_period())});
  kv.push_back({"chi_squared", format_double(fit.chi_squared)});
  kv.push_back({"degrees_of_freedom", std::to_string(fit.degrees_of_freedom)});
  kv.push_back({"n_free", std::to_string(fit.n_free)});
  std::string cov;
  for (const double c : fit.covariance) {
    if (!cov.empty()) cov += '\t';
    cov += format_double(c);
  }
  kv.push_back({"covariance", cov});
  write_key_values(path, kv);
}

void write_joint_map(const std::filesystem::path& path, const JointMap2D& map) {
  std::ofstream out = open_out(path);
  out << "# ocm-joint-map\n";
  out << "# pixel_count\t" << map.pixel_count << "\n";
  for (int i = 0; i < map.pixel_count; ++i) {
    for (int j = 0; j < map.pixel_count; ++j) {
      if (j > 0) out << '\t';
      out << format_double(map.at(i, j));
    }
    out << '\n';
  }
}

JointMap2D read_joint_map(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, path, "ocm-joint-map");
  JointMap2D map;
  std::string line;
  std::string key;
  std::string value;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (header_line(line, key, value)) {
      if (key == "pixel_count") map.pixel_count = parse_int<int>(value, path, line_no);
      continue;
    }
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    for (const std::string& token : tokens) {
      map.values.push_back(parse_double(token, path, line_no));
    }
  }
  if (map.pixel_count < 2 ||
      map.values.size() != static_cast<std::size_t>(map.pixel_count) *
                               static_cast<std::size_t>(map.pixel_count)) {
    throw std::runtime_error(path.string() + ": malformed joint map");
  }
  return map;
}

void write_scaling_table(const std::filesystem::path& path,
                         std::span<const VisibilityPoint> points) {
  std::ofstream out = open_out(path);
  out << "# ocm-visibility-table\n";
  out << "# columns\tphoton_number\tkind\tvisibility\tsigma\n";
  for (const VisibilityPoint& point : points) {
    out << point.photon_number << '\t' << to_string(point.kind) << '\t'
        << format_double(point.visibility) << '\t' << format_double(point.sigma)
        << '\n';
  }
}

std::vector<VisibilityPoint> read_scaling_table(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, path, "ocm-visibility-table");
  std::vector<VisibilityPoint> points;
  std::string line;
  std::string key;
  std::string value;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (header_line(line, key, value)) continue;
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) fail(path, line_no, "expected 4 columns");
    VisibilityPoint point;
    point.photon_number = parse_int<int>(tokens[0], path, line_no);
    point.kind = visibility_kind_from_string(tokens[1]);
    point.visibility = parse_double(tokens[2], path, line_no);
    point.sigma = parse_double(tokens[3], path, line_no);
    points.push_back(point);
  }
  return points;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& items) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : items) {
    out << key << '\t' << value << '\n';
  }
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  KeyValues items;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::size_t sep = line.find('\t');
    if (sep == std::string::npos) {
      items.push_back({line, ""});
    } else {
      items.push_back({line.substr(0, sep), line.substr(sep + 1)});
    }
  }
  return items;
}

}  // namespace ocm::io
