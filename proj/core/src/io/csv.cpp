#include "cqed/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cqed/errors.hpp"

namespace cqed::io {

namespace {

using json = nlohmann::json;

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto s = path;
  s += ".json";
  return s;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("'" + path.string() + "': bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::pair<std::vector<double>, std::vector<double>> two_columns(const std::filesystem::path& path, const char* a,
                                                                const char* b) {
  const auto t = read_table(path);
  if (t.header != std::vector<std::string>{a, b})
    throw ConfigError("'" + path.string() + "': expected header " + a + "," + b);
  std::vector<double> x, y;
  for (const auto& r : t.rows) {
    x.push_back(parse_double(r[0], path));
    y.push_back(parse_double(r[1], path));
  }
  return {x, y};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void write_table(const std::filesystem::path& path, const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& row : t.rows) {
    require(row.size() == t.header.size(), "table row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += '\n';
  }
  write_text(path, s);
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size())
      throw ConfigError("'" + path.string() + "' line " + std::to_string(n) + ": wrong number of fields");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_dispersion(const std::filesystem::path& path, const optics::DispersionResult& d) {
  Table t{{"gap_m", "frequency_hz", "branch"}, {}};
  for (const auto& p : d.points) t.rows.push_back({format_double(p.gap), format_double(p.frequency), to_string(p.branch)});
  write_table(path, t);
}

void write_field(const std::filesystem::path& path, const optics::FieldProfile& p) {
  Table t{{"z_m", "n", "intensity"}, {}};
  for (std::size_t i = 0; i < p.z.size(); ++i)
    t.rows.push_back({format_double(p.z[i]), format_double(p.index[i]), format_double(p.intensity[i])});
  write_table(path, t);
}

void write_spectrum(const std::filesystem::path& path, const lindblad::Spectrum& s) {
  Table t{{"probe_detuning_hz", "transmission"}, {}};
  for (std::size_t i = 0; i < s.probe_detuning.size(); ++i)
    t.rows.push_back({format_double(s.probe_detuning[i]), format_double(s.transmission[i])});
  write_table(path, t);
}

void write_g2(const std::filesystem::path& path, const lindblad::G2Curve& g) {
  Table t{{"tau_s", "g2"}, {}};
  for (std::size_t i = 0; i < g.tau.size(); ++i) t.rows.push_back({format_double(g.tau[i]), format_double(g.g2[i])});
  write_table(path, t);
}

void write_scan(const std::filesystem::path& path, const analysis::ScanTrace& s) {
  s.validate();
  Table t{{"frequency_hz", "counts"}, {}};
  for (std::size_t i = 0; i < s.size(); ++i) t.rows.push_back({format_double(s.frequency[i]), format_double(s.counts[i])});
  write_table(path, t);
  write_json(sidecar(path), {{"integration_time_s", s.integration_time},
                             {"repump_applied", s.metadata.repump_applied},
                             {"scan_id", s.metadata.scan_id},
                             {"laser_power_w", s.metadata.laser_power}});
}

analysis::ScanTrace read_scan(const std::filesystem::path& path) {
  analysis::ScanTrace s;
  std::tie(s.frequency, s.counts) = two_columns(path, "frequency_hz", "counts");
  if (std::filesystem::exists(sidecar(path))) {
    std::ifstream in(sidecar(path));
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("'" + sidecar(path).string() + "' is not valid JSON");
    try {
      s.integration_time = j.value("integration_time_s", s.integration_time);
      s.metadata.repump_applied = j.value("repump_applied", false);
      s.metadata.scan_id = j.value("scan_id", 0);
      s.metadata.laser_power = j.value("laser_power_w", 0.0);
    } catch (const json::exception& e) {
      throw ConfigError("'" + sidecar(path).string() + "': " + e.what());
    }
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
  return s;
}

void write_histogram(const std::filesystem::path& path, const analysis::HistogramTrace& h) {
  h.validate();
  Table t{{"time_s", "counts"}, {}};
  for (std::size_t i = 0; i < h.size(); ++i) t.rows.push_back({format_double(h.time[i]), format_double(h.counts[i])});
  write_table(path, t);
  write_json(sidecar(path), {{"bin_width_s", h.bin_width}});
}

analysis::HistogramTrace read_histogram(const std::filesystem::path& path) {
  analysis::HistogramTrace h;
  std::tie(h.time, h.counts) = two_columns(path, "time_s", "counts");
  if (std::filesystem::exists(sidecar(path))) {
    std::ifstream in(sidecar(path));
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("'" + sidecar(path).string() + "' is not valid JSON");
    h.bin_width = j.value("bin_width_s", h.bin_width);
  } else if (h.size() >= 2) {
    h.bin_width = h.time[1] - h.time[0];
  }
  try {
    h.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
  return h;
}

}  // namespace cqed::io
