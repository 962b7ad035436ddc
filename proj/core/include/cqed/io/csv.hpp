#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cqed/analysis/traces.hpp"
#include "cqed/lindblad/correlation.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/optics/cavity.hpp"

namespace cqed::io {

// Shortest decimal representation that round-trips exactly.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_table(const std::filesystem::path& path, const Table& t);
Table read_table(const std::filesystem::path& path);

void write_dispersion(const std::filesystem::path& path, const optics::DispersionResult& d);
void write_field(const std::filesystem::path& path, const optics::FieldProfile& p);
void write_spectrum(const std::filesystem::path& path, const lindblad::Spectrum& s);
void write_g2(const std::filesystem::path& path, const lindblad::G2Curve& g);

// frequency_hz,counts plus a JSON sidecar (<path>.json) with the metadata.
void write_scan(const std::filesystem::path& path, const analysis::ScanTrace& t);
analysis::ScanTrace read_scan(const std::filesystem::path& path);

// time_s,counts plus a JSON sidecar with the bin width.
void write_histogram(const std::filesystem::path& path, const analysis::HistogramTrace& h);
analysis::HistogramTrace read_histogram(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cqed::io
