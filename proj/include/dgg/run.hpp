// Copyright 2026 The dggfso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "dgg/ber.hpp"

namespace dgg {

struct SnrRange {
  double start = 0.0;
  double stop = 60.0;
  double step = 2.0;

  /// start, start + step, ... up to stop inclusive (within step / 1000).
  std::vector<double> points() const;
};

/// A batch run: one BER curve per (aperture count, estimator).
///
/// With a single channel, each N in `n_values` replicates it N times
/// (i.i.d. branches). With several channels, each N must equal their count.
struct RunSpec {
  std::vector<DoubleGGChannel> channels;
  std::vector<int> n_values;
  SnrRange snr_db;
  std::vector<Estimator> estimators;
  MCConfig mc;
  RationalizeOptions channel_rationalization;
  ProductModelOptions product;
  bool perturb_ties = false;
  std::filesystem::path output_dir = ".";
  std::string prefix = "ber";
  bool plot = true;

  /// Throws ValidationError on any inconsistency; runs before computation.
  void validate() const;
};

/// Parses the JSON config format described in the README. Missing keys take
/// the defaults of RunSpec.
RunSpec parse_run_spec(const nlohmann::json& config);

struct RunResult {
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path metadata_file;
  std::filesystem::path plot_file;
};

RunResult run(const RunSpec& spec);

/// CSV body for one curve, header included. Rows with ber outside (0, 0.5]
/// are dropped.
std::string format_csv(std::span<const BERPoint> curve);

/// log10(BER) against SNR for the given CSV files.
std::string render_svg(std::span<const std::filesystem::path> csv_files,
                       const std::string& title);

/// The four channel presets with every parameter as published.
std::string format_presets();

/// Run specs for the four reference figures.
RunSpec figure_spec(int figure);

/// Default output directory: $DGGFSO_OUTPUT_DIR if set, else "dggfso_out".
std::filesystem::path default_output_dir();

}  // namespace dgg
