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

#ifndef DISK_OUTPUT_H_
#define DISK_OUTPUT_H_

#include <string>
#include <vector>

#include "disk/harness.h"

namespace disk {

// Exact CSV headers.
inline constexpr char kTraceHeader[] = "step,loss,grad_norm,filtered_grad_norm,epsilon_spent";
inline constexpr char kComparisonHeader[] = "sigma_dp,method,seed,final_loss";
inline constexpr char kSweepHeader[] = "kappa,gamma,metric";

// Writers create missing parent directories and overwrite existing files.
// Numbers use 17 significant digits, so re-running writes identical bytes.
void WriteTraceCsv(const std::vector<StepRecord>& records, const std::string& path);
std::vector<StepRecord> ReadTraceCsv(const std::string& path);

void WriteComparisonCsv(const std::vector<ComparisonRow>& rows, const std::string& path);
std::vector<ComparisonRow> ReadComparisonCsv(const std::string& path);

// sigma_dp,method,mean_final_loss
void WriteComparisonSummaryCsv(const std::vector<ComparisonSummaryRow>& rows,
                               const std::string& path);

void WriteSweepCsv(const SweepResult& sweep, const std::string& path);
std::vector<SweepCell> ReadSweepCsv(const std::string& path);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

// Minimal SVG renderers; non-finite points (and non-positive ones on a log
// axis) are skipped.
void WriteLinePlotSvg(const std::vector<PlotSeries>& series, const PlotOptions& options,
                      const std::string& path);
void WriteHeatmapSvg(const SweepResult& sweep, const std::string& title, const std::string& path);

// Plots straight from the CSV files, so a figure always matches its data.
void PlotTraceCsv(const std::string& csv_path, const std::string& svg_path);
void PlotComparisonCsv(const std::string& csv_path, const std::string& svg_path);
void PlotSweepCsv(const std::string& csv_path, const std::string& svg_path);

}  // namespace disk

#endif  // DISK_OUTPUT_H_
