#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cqed/errors.hpp"
#include "cqed/io/config.hpp"
#include "cqed/io/csv.hpp"

using namespace cqed;
using namespace cqed::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cqed_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Config, DefaultsParseToPaperValues) {
  const auto cfg = parse_config(default_config());
  EXPECT_DOUBLE_EQ(cfg.geometry.air_gap, 6.5e-6);
  EXPECT_DOUBLE_EQ(cfg.kappa, 6.86e9);
  EXPECT_NEAR(cfg.system.kappa_in, 6.86e9 * 80.0 / 7500.0, 1e-3);
  EXPECT_NEAR(cfg.system.kappa_out, 6.86e9 * 2000.0 / 7500.0, 1e-3);
  EXPECT_NEAR(cfg.system.gamma + cfg.system.gamma_dp, 77.6e6, 1e-6);
  EXPECT_NEAR(cfg.system.gamma, 1.0 / (2.0 * 3.141592653589793 * 5e-9), 1e-3);
  EXPECT_EQ(cfg.vibration_points, 201);
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  auto doc = default_config();
  EXPECT_THROW(merge_config(doc, json::parse(R"({"geometry": {"air_gapp_m": 1e-6}})")), ConfigError);
  EXPECT_THROW(merge_config(doc, json::parse(R"({"nonsense": {}})")), ConfigError);
  EXPECT_THROW(merge_config(doc, json::parse(R"({"geometry": {"air_gap_m": "wide"}})")), ConfigError);
  EXPECT_NO_THROW(merge_config(doc, json::parse(R"({"vibration": {"sigma_length_m": 0}})")));
  EXPECT_DOUBLE_EQ(doc["vibration"]["sigma_length_m"].get<double>(), 0.0);
}

TEST(Config, OverridesUseDottedPaths) {
  auto doc = default_config();
  apply_override(doc, "system.g_hz=2.5e8");
  apply_override(doc, "mirrors.input.model=lumped");
  EXPECT_DOUBLE_EQ(doc["system"]["g_hz"].get<double>(), 2.5e8);
  EXPECT_EQ(doc["mirrors"]["input"]["model"].get<std::string>(), "lumped");
  EXPECT_THROW(apply_override(doc, "system.nope=1"), ConfigError);
  EXPECT_THROW(apply_override(doc, "missing_equals"), ConfigError);
  apply_override(doc, "mirrors.output.model=prism");
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, InvalidValuesBecomeConfigErrors) {
  auto doc = default_config();
  doc["geometry"]["air_gap_m"] = -1.0;
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = default_config();
  doc["mirrors"]["input"]["transmittance_ppm"] = 9000.0;
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, LoadsFilesAndResolvesNames) {
  const auto p = scratch("small.json");
  std::ofstream(p) << R"({"system": {"temperature_k": 4.0}})";
  const auto doc = load_config(p, {"system.g_hz=1e8"});
  EXPECT_DOUBLE_EQ(doc["system"]["temperature_k"].get<double>(), 4.0);
  EXPECT_DOUBLE_EQ(doc["system"]["g_hz"].get<double>(), 1e8);
  ::setenv("CQED_CONFIG_DIR", p.parent_path().c_str(), 1);
  EXPECT_EQ(resolve_config_path("small"), p);
  EXPECT_THROW(resolve_config_path("does_not_exist"), ConfigError);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ not json";
  EXPECT_THROW(load_config(bad), ConfigError);
  EXPECT_THROW(load_config(scratch("absent.json")), ConfigError);
}

TEST(Csv, DoublesRoundTripExactly) {
  for (double v : {0.0, -1.5, 6.86e9, 1.0 / 3.0, 2.55e-9, 5e-324}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

TEST(Csv, ScanRoundTripWithSidecar) {
  analysis::ScanTrace t;
  t.frequency = {558e9, 558.005e9, 558.01e9};
  t.counts = {3, 0, 17};
  t.integration_time = 0.02;
  t.metadata = {true, 12, 1.5e-12};
  const auto p = scratch("scan.csv");
  write_scan(p, t);
  const auto r = read_scan(p);
  EXPECT_EQ(r.frequency, t.frequency);
  EXPECT_EQ(r.counts, t.counts);
  EXPECT_DOUBLE_EQ(r.integration_time, 0.02);
  EXPECT_TRUE(r.metadata.repump_applied);
  EXPECT_EQ(r.metadata.scan_id, 12);
  EXPECT_DOUBLE_EQ(r.metadata.laser_power, 1.5e-12);
}

TEST(Csv, HistogramRoundTrip) {
  analysis::HistogramTrace h;
  h.time = {0.0, 0.1e-9, 0.2e-9};
  h.counts = {5, 9, 1};
  h.bin_width = 0.1e-9;
  const auto p = scratch("hist.csv");
  write_histogram(p, h);
  const auto r = read_histogram(p);
  EXPECT_EQ(r.time, h.time);
  EXPECT_EQ(r.counts, h.counts);
  EXPECT_DOUBLE_EQ(r.bin_width, 0.1e-9);
}

TEST(Csv, MalformedFilesAreConfigErrors) {
  const auto p = scratch("broken.csv");
  std::ofstream(p) << "frequency_hz,counts\n1.0,2.0\n3.0\n";
  EXPECT_THROW(read_scan(p), ConfigError);
  std::ofstream(p) << "time_s,counts\n1.0,abc\n";
  EXPECT_THROW(read_histogram(p), ConfigError);
  EXPECT_THROW(read_scan(scratch("nothing_here.csv")), ConfigError);
}
