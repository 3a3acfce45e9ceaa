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

// Batch front-end: BER sweeps over Double GG channels.
//
//   dggfso presets
//   dggfso run --config run.json [--preset b --n 2 --estimator mc ...]
//   dggfso reproduce --figure 3

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dgg/errors.hpp"
#include "dgg/run.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw dgg::ValidationError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw dgg::ValidationError(std::string("invalid config: ") + e.what());
  }
}

void report(const dgg::RunResult& r) {
  for (const auto& f : r.csv_files) std::cout << f.string() << '\n';
  std::cout << r.metadata_file.string() << '\n';
  if (!r.plot_file.empty()) std::cout << r.plot_file.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BER analysis of SIMO free-space optical links over Double GG turbulence"};
  app.set_version_flag("--version", DGGFSO_VERSION);
  app.require_subcommand(1);

  auto* presets_cmd = app.add_subcommand("presets", "List the built-in channel presets");

  auto* run_cmd = app.add_subcommand("run", "Run a BER sweep from a JSON config and/or flags");
  std::string config_path;
  std::vector<std::string> preset_names, estimators;
  std::vector<int> n_values;
  double snr_start = 0, snr_stop = 0, snr_step = 0, confidence = 0, rel_tol = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0, batch = 0;
  int beta_cap = 0;
  std::int64_t max_den = 0;
  std::string policy, output_dir, prefix;
  bool perturb_ties = false, no_plot = false;
  run_cmd->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  auto* o_preset = run_cmd->add_option("--preset", preset_names, "Channel preset (repeatable)");
  auto* o_n = run_cmd->add_option("--n", n_values, "Number of apertures (repeatable)");
  auto* o_start = run_cmd->add_option("--snr-start", snr_start, "First SNR point in dB");
  auto* o_stop = run_cmd->add_option("--snr-stop", snr_stop, "Last SNR point in dB");
  auto* o_step = run_cmd->add_option("--snr-step", snr_step, "SNR step in dB");
  auto* o_est = run_cmd->add_option("--estimator", estimators, "mc, bound or asymptotic (repeatable)");
  auto* o_seed = run_cmd->add_option("--seed", seed, "Monte Carlo seed");
  auto* o_samples = run_cmd->add_option("--samples", samples, "Monte Carlo draws per SNR point");
  auto* o_batch = run_cmd->add_option("--batch", batch, "Draws per parallel batch");
  auto* o_conf = run_cmd->add_option("--confidence", confidence, "Confidence level of MC intervals");
  auto* o_cap = run_cmd->add_option("--beta-cap", beta_cap, "Largest admissible model order");
  auto* o_tol = run_cmd->add_option("--rel-tol", rel_tol, "Exponent rationalization tolerance");
  auto* o_den = run_cmd->add_option("--max-den", max_den, "Largest q for the p/q channel ratio");
  auto* o_policy = run_cmd->add_option("--policy", policy, "minimal_order or most_accurate");
  auto* o_ties = run_cmd->add_flag("--perturb-ties", perturb_ties,
                                   "Perturb tied minimal exponents in the asymptotic estimator");
  auto* o_dir = run_cmd->add_option("--output-dir", output_dir, "Output directory");
  auto* o_prefix = run_cmd->add_option("--prefix", prefix, "Output file name prefix");
  run_cmd->add_flag("--no-plot", no_plot, "Skip the SVG plot");

  auto* repro_cmd = app.add_subcommand("reproduce", "Recompute one of the four reference figures");
  int figure = 0;
  std::string repro_dir;
  std::size_t repro_samples = 0;
  repro_cmd->add_option("--figure", figure, "Figure number")->required()->check(CLI::Range(1, 4));
  auto* r_dir = repro_cmd->add_option("--output-dir", repro_dir, "Output directory");
  auto* r_samples = repro_cmd->add_option("--samples", repro_samples, "Monte Carlo draws per point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*presets_cmd) {
      std::cout << dgg::format_presets();
      return 0;
    }
    if (*run_cmd) {
      nlohmann::json cfg = load_config(config_path);
      auto section = [&](const char* key) -> nlohmann::json& {
        if (!cfg.contains(key)) cfg[key] = nlohmann::json::object();
        return cfg[key];
      };
      if (o_preset->count()) cfg["channels"] = preset_names;
      if (o_n->count()) cfg["n"] = n_values;
      if (o_start->count()) section("snr_db")["start"] = snr_start;
      if (o_stop->count()) section("snr_db")["stop"] = snr_stop;
      if (o_step->count()) section("snr_db")["step"] = snr_step;
      if (o_est->count()) cfg["estimators"] = estimators;
      if (o_seed->count()) section("mc")["seed"] = seed;
      if (o_samples->count()) section("mc")["n_samples"] = samples;
      if (o_batch->count()) section("mc")["batch_size"] = batch;
      if (o_conf->count()) section("mc")["confidence"] = confidence;
      if (o_cap->count()) section("rationalization")["beta_cap"] = beta_cap;
      if (o_tol->count()) section("rationalization")["rel_tol"] = rel_tol;
      if (o_den->count()) section("rationalization")["max_den"] = max_den;
      if (o_policy->count()) section("rationalization")["policy"] = policy;
      if (o_ties->count()) cfg["perturb_ties"] = true;
      if (o_dir->count()) section("output")["dir"] = output_dir;
      if (o_prefix->count()) section("output")["prefix"] = prefix;
      if (no_plot) section("output")["plot"] = false;
      dgg::RunSpec spec = dgg::parse_run_spec(cfg);
      if (spec.mc.batch_size > spec.mc.n_samples && !o_batch->count() &&
          !(cfg.contains("mc") && cfg["mc"].contains("batch_size"))) {
        spec.mc.batch_size = spec.mc.n_samples;
      }
      report(dgg::run(spec));
      return 0;
    }
    if (*repro_cmd) {
      dgg::RunSpec spec = dgg::figure_spec(figure);
      if (r_dir->count()) spec.output_dir = repro_dir;
      if (r_samples->count()) {
        spec.mc.n_samples = repro_samples;
        spec.mc.batch_size = std::min(spec.mc.batch_size, repro_samples);
      }
      report(dgg::run(spec));
      return 0;
    }
  } catch (const dgg::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
