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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dgg/dgg_model.hpp"
#include "dgg/product_sum.hpp"

namespace dgg {

/// Average electrical SNR eta^2 / N0. All internal math uses `gamma_bar`.
struct SNRConfig {
  double gamma_bar_db = 0.0;
  double gamma_bar = 1.0;

  static SNRConfig from_db(double db);
  static SNRConfig from_linear(double gamma_bar);
};

struct MCConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 1'000'000;
  std::size_t batch_size = 1 << 16;
  double confidence = 0.99;

  void validate() const;
};

enum class Estimator { kMC, kBound, kAsymptotic };

std::string_view to_string(Estimator e);
/// Accepts "mc", "bound", "asymptotic".
Estimator parse_estimator(std::string_view name);

struct BERPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
  Estimator estimator = Estimator::kMC;
  std::size_t n_samples = 0;
  /// Set when the confidence half-width exceeds half the estimate.
  bool low_precision = false;
};

enum class Execution { kParallel, kSerial };

/// 0.5 erfc(sqrt(gamma_bar) sum_i / (2N)).
double conditional_ber(double gamma_bar, int n, double sum_i);

/// Semi-analytic estimate: conditional_ber averaged over irradiance draws.
BERPoint mc_ber(std::span<const DoubleGGChannel> channels, const SNRConfig& snr,
                const MCConfig& cfg, Execution exec = Execution::kParallel);

/// One pass over the draws serves every SNR point (common random numbers).
/// Batches use their own substreams and are reduced in batch order, so the
/// serial and parallel paths agree bit for bit.
std::vector<BERPoint> mc_ber_curve(std::span<const DoubleGGChannel> channels,
                                   std::span<const double> snr_db, const MCConfig& cfg,
                                   Execution exec = Execution::kParallel);

/// Received EGC statistic r = (eta / N) x sum_i + v with v ~ N(0, N0 / 2).
/// The 1/N keeps the total aperture area of the SISO link.
double ook_received(int bit, double sum_i, int n, double eta, double noise);

/// Likelihood comparison between the on and off hypotheses given the
/// irradiances. Returns the detected bit.
int ook_detect(double r, double sum_i, int n, double eta, double n0);

/// Bit-level simulation of the OOK link with eta = 1 and N0 = 1 / gamma_bar.
BERPoint mc_ber_bitlevel(std::span<const DoubleGGChannel> channels, const SNRConfig& snr,
                         const MCConfig& cfg, Execution exec = Execution::kParallel);

/// Parameters of the closed-form bound for a product model over N channels.
struct BoundTerms {
  std::int64_t s = 1;
  std::int64_t q = 1;
  double mu = 0.0;
  std::vector<double> k_q;
  int n = 1;
  double log_prefactor = 0.0;
  /// Meijer G parameters; `log_argument` excludes the -s log(gamma_bar) term.
  MeijerGSpec spec;
};

BoundTerms bound_terms(const ProductModel& pm, int n);

double ber_upper_bound(const BoundTerms& terms, const SNRConfig& snr, double rel_tol = 1e-8);

double ber_upper_bound(const ProductModel& pm, int n, const SNRConfig& snr,
                       double rel_tol = 1e-8);

struct AsymptoticOptions {
  /// Shift tied minimal m_l by multiples of 1e-6 instead of failing.
  bool perturb_ties = false;
};

struct AsymptoticTerms {
  double c_k = 0.0;
  std::vector<double> c_j_list;
  double diversity_order = 0.0;
  /// log of the coefficient C in P = C gamma_bar^(-diversity_order).
  double log_coefficient = 0.0;
  bool perturbed = false;
};

AsymptoticTerms asymptotic_terms(const ProductModel& pm, int n,
                                 const AsymptoticOptions& opts = {});

double asymptotic_ber(const AsymptoticTerms& terms, const SNRConfig& snr);

double asymptotic_ber(const ProductModel& pm, int n, const SNRConfig& snr,
                      const AsymptoticOptions& opts = {});

/// 0.5 N min_l m_l gamma_l over the 2N factors.
double diversity_order(std::span<const DoubleGGChannel> channels, int n);

/// SNR (dB) where a decreasing curve crosses `target`, interpolating
/// log10(ber) linearly between the bracketing points.
std::optional<double> crossing_snr_db(std::span<const BERPoint> curve, double target);

/// SNR (dB) in [lo_db, hi_db] where the bound equals `target`.
double bound_crossing_snr_db(const BoundTerms& terms, double target, double lo_db,
                             double hi_db, double rel_tol = 1e-8);

}  // namespace dgg
