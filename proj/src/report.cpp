#include "rotjac/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rotjac/errors.hpp"

namespace rotjac {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else return std::to_string(v);
      },
      cell);
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw NumericalFailure("write_csv: cannot open " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
  if (!out) throw NumericalFailure("write_csv: write failed for " + path);
}

std::string iso8601_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

namespace {

nlohmann::json summary_to_json(const MetricSummary& s) {
  nlohmann::json j{{"name", s.name},
                   {"value", s.value},
                   {"std_error", s.std_error},
                   {"count", s.count}};
  if (s.prediction) j["prediction"] = *s.prediction;
  if (s.relative_error) j["relative_error"] = *s.relative_error;
  return j;
}

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : m.config) cfg[key] = value;
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : m.summaries) summaries.push_back(summary_to_json(s));
  nlohmann::json assertions = nlohmann::json::array();
  for (const auto& a : m.assertions)
    assertions.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  return nlohmann::json{{"tool_version", m.tool_version},
                        {"subcommand", m.subcommand},
                        {"config", cfg},
                        {"master_seed", m.master_seed},
                        {"started_at", m.started_at},
                        {"finished_at", m.finished_at},
                        {"summaries", summaries},
                        {"assertions", assertions}};
}

nlohmann::json cell_to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.empty()) return nullptr;
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      cell);
}

void dump_to(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalFailure("write json: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw NumericalFailure("write json: write failed for " + path);
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  return manifest_json(manifest).dump(2);
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  dump_to(manifest_json(manifest), path);
}

void write_json(const RunManifest& manifest, const Table& table, const std::string& path) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) rec[table.columns[c]] = cell_to_json(row[c]);
    records.push_back(rec);
  }
  dump_to(nlohmann::json{{"manifest", manifest_json(manifest)}, {"records", records}}, path);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 560.0;
constexpr double kMarginL = 80.0, kMarginR = 30.0, kMarginT = 50.0, kMarginB = 60.0;

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double to_unit(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h > l ? (a - l) / (h - l) : 0.5;
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int d0 = static_cast<int>(std::floor(std::log10(lo)));
      const int d1 = static_cast<int>(std::ceil(std::log10(hi)));
      for (int d = d0; d <= d1; ++d) {
        const double v = std::pow(10.0, d);
        if (v >= lo * 0.999 && v <= hi * 1.001) t.push_back(v);
      }
      if (t.empty()) t = {lo, hi};
      return t;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (mag * m >= raw) {
        step = mag * m;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
      t.push_back(v);
    return t;
  }
};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void render_svg(const SvgPlot& plot, const std::string& path) {
  // Collect finite (and, on log axes, positive) data bounds.
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (plot.log_x && x <= 0.0) continue;
      if (plot.log_y && y <= 0.0) continue;
      x_lo = std::min(x_lo, x); x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y); y_hi = std::max(y_hi, y);
    }
  if (!(x_lo <= x_hi)) throw DegenerateInput("render_svg: no plottable points");
  if (x_lo == x_hi) { x_lo -= 1.0; x_hi += 1.0; }
  if (y_lo == y_hi) { y_lo -= 1.0; y_hi += 1.0; }
  if (!plot.log_x) {
    const double pad = 0.03 * (x_hi - x_lo);
    x_lo -= pad; x_hi += pad;
  }
  if (!plot.log_y) {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad; y_hi += pad;
  }
  const Axis ax{x_lo, x_hi, plot.log_x};
  const Axis ay{y_lo, y_hi, plot.log_y};

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto px = [&](double v) { return kMarginL + ax.to_unit(v) * plot_w; };
  auto py = [&](double v) { return kMarginT + (1.0 - ay.to_unit(v)) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << xml_escape(plot.title) << "</text>\n";

  // Frame and ticks.
  svg << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = px(t);
    svg << "<line x1=\"" << x << "\" y1=\"" << kMarginT + plot_h << "\" x2=\"" << x << "\" y2=\""
        << kMarginT + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kMarginT + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    svg << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << y << "\" x2=\"" << kMarginL
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMarginL - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_double(t) << "</text>\n";
  }
  svg << "<text x=\"" << kMarginL + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << xml_escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kMarginT + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 "
      << kMarginT + plot_h / 2 << ")\">" << xml_escape(plot.y_label) << "</text>\n";

  std::size_t color_idx = 0;
  double legend_y = kMarginT + 14.0;
  for (const auto& s : plot.series) {
    const std::string color =
        s.color.empty() ? kPalette[color_idx % 8] : s.color;
    ++color_idx;
    if (s.scatter) {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if ((plot.log_x && x <= 0.0) || (plot.log_y && y <= 0.0)) continue;
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
            << "\" r=\"1.6\" fill=\"" << color << "\" fill-opacity=\"0.55\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.7\"";
      if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
      svg << " points=\"";
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if ((plot.log_x && x <= 0.0) || (plot.log_y && y <= 0.0)) continue;
        svg << px(x) << "," << py(y) << " ";
      }
      svg << "\"/>\n";
    }
    if (!s.label.empty()) {
      svg << "<line x1=\"" << kMarginL + plot_w - 170 << "\" y1=\"" << legend_y << "\" x2=\""
          << kMarginL + plot_w - 146 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
      svg << "<text x=\"" << kMarginL + plot_w - 140 << "\" y=\"" << legend_y + 4
          << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(s.label)
          << "</text>\n";
      legend_y += 18.0;
    }
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalFailure("render_svg: cannot open " + path);
  out << svg.str();
  if (!out) throw NumericalFailure("render_svg: write failed for " + path);
}

}  // namespace rotjac
