#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rotjac/experiments.hpp"

namespace rotjac {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// One rendered cell; empty string for absent optional values.
std::string format_cell(const Cell& cell);

/// Header row plus one line per record, LF endings, UTF-8.
void write_csv(const Table& table, const std::string& path);

struct AssertionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Everything needed to reproduce and audit a run. Timestamps honor
/// SOURCE_DATE_EPOCH so reproducibility checks can pin them.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t master_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<MetricSummary> summaries;
  std::vector<AssertionResult> assertions;
};

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

/// Single JSON document {"manifest": ..., "records": [...]} for --format json.
void write_json(const RunManifest& manifest, const Table& table, const std::string& path);

std::string iso8601_now();

// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool scatter = false;
  bool dashed = false;
  std::string color = "#1f77b4";
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;
};

/// Self-contained SVG (axes, ticks, legend, polylines/markers); no external
/// assets.
void render_svg(const SvgPlot& plot, const std::string& path);

}  // namespace rotjac
