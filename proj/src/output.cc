// Copyright 2026 The DiSK Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "disk/output.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace disk {
namespace {

std::ofstream OpenForWrite(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

std::vector<std::vector<std::string>> ReadCsv(const std::string& path, const char* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error(path + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double ParseDouble(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

void CheckWidth(const std::vector<std::string>& row, std::size_t width, const std::string& path) {
  if (row.size() != width) throw std::runtime_error(path + ": malformed row");
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string Number(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

void WriteTraceCsv(const std::vector<StepRecord>& records, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kTraceHeader << '\n';
  for (const StepRecord& r : records) {
    out << r.step << ',' << r.loss << ',' << r.grad_norm << ',' << r.filtered_grad_norm << ','
        << r.epsilon_spent << '\n';
  }
}

std::vector<StepRecord> ReadTraceCsv(const std::string& path) {
  std::vector<StepRecord> out;
  for (const auto& row : ReadCsv(path, kTraceHeader)) {
    CheckWidth(row, 5, path);
    out.push_back({std::stoll(row[0]), ParseDouble(row[1]), ParseDouble(row[2]), ParseDouble(row[3]),
                   ParseDouble(row[4])});
  }
  return out;
}

void WriteComparisonCsv(const std::vector<ComparisonRow>& rows, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kComparisonHeader << '\n';
  for (const ComparisonRow& r : rows) {
    out << r.sigma_dp << ',' << r.method << ',' << r.seed << ',' << r.final_loss << '\n';
  }
}

std::vector<ComparisonRow> ReadComparisonCsv(const std::string& path) {
  std::vector<ComparisonRow> out;
  for (const auto& row : ReadCsv(path, kComparisonHeader)) {
    CheckWidth(row, 4, path);
    out.push_back({ParseDouble(row[0]), row[1], std::stoull(row[2]), ParseDouble(row[3])});
  }
  return out;
}

void WriteComparisonSummaryCsv(const std::vector<ComparisonSummaryRow>& rows,
                               const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << "sigma_dp,method,mean_final_loss\n";
  for (const ComparisonSummaryRow& r : rows) {
    out << r.sigma_dp << ',' << r.method << ',' << r.mean_final_loss << '\n';
  }
}

void WriteSweepCsv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << kSweepHeader << '\n';
  for (const SweepCell& c : sweep.cells) out << c.kappa << ',' << c.gamma << ',' << c.metric << '\n';
}

std::vector<SweepCell> ReadSweepCsv(const std::string& path) {
  std::vector<SweepCell> out;
  for (const auto& row : ReadCsv(path, kSweepHeader)) {
    CheckWidth(row, 3, path);
    out.push_back({ParseDouble(row[0]), ParseDouble(row[1]), ParseDouble(row[2])});
  }
  return out;
}

void WriteLinePlotSvg(const std::vector<PlotSeries>& series, const PlotOptions& options,
                      const std::string& path) {
  auto tx = [&](double v) { return options.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return options.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!options.log_x || x > 0.0) &&
           (!options.log_y || y > 0.0);
  };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, ty(s.y[i]));
      y_hi = std::max(y_hi, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ty(v) - y_lo) / (y_hi - y_lo) * ph; };

  std::ofstream out = OpenForWrite(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << Escape(options.title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_lo + (x_hi - x_lo) * k / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * k / 4.0;
    const double lx = kLeft + pw * k / 4.0;
    const double ly = kTop + ph - ph * k / 4.0;
    out << "<text x=\"" << lx << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
        << Number(options.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << ly + 4 << "\" text-anchor=\"end\">"
        << Number(options.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << Escape(options.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << Escape(options.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (usable(s.x[i], s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kWidth - kRight + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << ly << "\">" << Escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

void WriteHeatmapSvg(const SweepResult& sweep, const std::string& title, const std::string& path) {
  const std::size_t rows = sweep.kappas.size();
  const std::size_t cols = sweep.gammas.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const SweepCell& c : sweep.cells) {
    if (!std::isfinite(c.metric)) continue;
    lo = std::min(lo, c.metric);
    hi = std::max(hi, c.metric);
  }
  const double cell_w = 70.0;
  const double cell_h = 36.0;
  const double left = 80.0;
  const double top = 50.0;
  const double width = left + cell_w * static_cast<double>(cols) + 20.0;
  const double height = top + cell_h * static_cast<double>(rows) + 50.0;

  std::ofstream out = OpenForWrite(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << Escape(title) << "</text>\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const double y = top + cell_h * static_cast<double>(i);
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + cell_h / 2 + 4 << "\" text-anchor=\"end\">"
        << "k=" << Number(sweep.kappas[i]) << "</text>\n";
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = left + cell_w * static_cast<double>(j);
      const double v = sweep.at(i, j);
      std::string fill = "#999999";
      if (std::isfinite(v)) {
        // Low values dark blue, high values light yellow.
        const double f = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        const int r = static_cast<int>(30 + 225 * f);
        const int g = static_cast<int>(60 + 180 * f);
        const int b = static_cast<int>(140 - 40 * f);
        std::ostringstream os;
        os << "rgb(" << r << ',' << g << ',' << b << ')';
        fill = os.str();
      }
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
          << cell_h << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
      out << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
          << "\" text-anchor=\"middle\">" << (std::isfinite(v) ? Number(v) : "diverged")
          << "</text>\n";
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    out << "<text x=\"" << left + cell_w * (static_cast<double>(j) + 0.5) << "\" y=\""
        << top + cell_h * static_cast<double>(rows) + 16 << "\" text-anchor=\"middle\">"
        << "g=" << Number(sweep.gammas[j]) << "</text>\n";
  }
  out << "</svg>\n";
}

void PlotTraceCsv(const std::string& csv_path, const std::string& svg_path) {
  const std::vector<StepRecord> records = ReadTraceCsv(csv_path);
  PlotSeries loss{"loss", {}, {}};
  PlotSeries grad{"grad_norm", {}, {}};
  for (const StepRecord& r : records) {
    loss.x.push_back(static_cast<double>(r.step));
    loss.y.push_back(r.loss);
    grad.x.push_back(static_cast<double>(r.step));
    grad.y.push_back(r.grad_norm);
  }
  WriteLinePlotSvg({loss, grad}, {"training trace", "step", "value", false, true}, svg_path);
}

void PlotComparisonCsv(const std::string& csv_path, const std::string& svg_path) {
  // Seed-average per (method, sigma), methods in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const ComparisonRow& r : ReadComparisonCsv(csv_path)) {
    if (!acc.count(r.method)) order.push_back(r.method);
    auto& slot = acc[r.method][r.sigma_dp];
    slot.first += r.final_loss;
    slot.second += 1;
  }
  std::vector<PlotSeries> series;
  for (const std::string& m : order) {
    PlotSeries s{m, {}, {}};
    for (const auto& [sigma, sum] : acc[m]) {
      s.x.push_back(sigma);
      s.y.push_back(sum.first / sum.second);
    }
    series.push_back(std::move(s));
  }
  WriteLinePlotSvg(series, {"final loss vs noise", "sigma_dp", "mean final loss", true, true},
                   svg_path);
}

void PlotSweepCsv(const std::string& csv_path, const std::string& svg_path) {
  const std::vector<SweepCell> cells = ReadSweepCsv(csv_path);
  SweepResult sweep;
  for (const SweepCell& c : cells) {
    if (std::find(sweep.kappas.begin(), sweep.kappas.end(), c.kappa) == sweep.kappas.end()) {
      sweep.kappas.push_back(c.kappa);
    }
    if (std::find(sweep.gammas.begin(), sweep.gammas.end(), c.gamma) == sweep.gammas.end()) {
      sweep.gammas.push_back(c.gamma);
    }
  }
  if (sweep.kappas.size() * sweep.gammas.size() != cells.size()) {
    throw std::runtime_error(csv_path + ": sweep is not a full grid");
  }
  sweep.cells = cells;
  WriteHeatmapSvg(sweep, "final loss over (kappa, gamma)", svg_path);
}

}  // namespace disk
