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

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dgg/special_numerics.hpp"

namespace dgg {

/// One Generalized Gamma factor: U^gamma ~ Gamma(shape m, scale omega / m).
struct GGParams {
  double m = 1.0;
  double gamma = 1.0;
  double omega = 1.0;

  /// Throws ValidationError("invalid shape parameters") unless m >= 0.5,
  /// gamma > 0 and omega > 0.
  void validate() const;
};

/// Irradiance I = U_x * U_y of two independent GG factors (large- and
/// small-scale eddies). `ratio` = p/q approximates gamma_1 / gamma_2 and is
/// what the closed-form pdf/cdf actually use.
struct DoubleGGChannel {
  GGParams large_scale;
  GGParams small_scale;
  RationalExponent ratio;
  std::string name;
};

struct RationalizeOptions {
  std::int64_t max_den = 25;
  double rel_tol = 5e-3;
  RationalizePolicy policy = RationalizePolicy::kSimplest;
};

double omega_from_shape(double m, double gamma);

double scintillation_variance(double m, double gamma);

/// Rationalizes gamma_1 / gamma_2 per `opts`.
DoubleGGChannel make_channel(const GGParams& large, const GGParams& small,
                             const RationalizeOptions& opts = {});

/// Uses the given exponent pair p/q as-is; its error against gamma_1/gamma_2 is
/// recorded, not checked.
DoubleGGChannel make_channel(const GGParams& large, const GGParams& small, std::int64_t p,
                             std::int64_t q);

void validate(const DoubleGGChannel& ch);

double pdf(const DoubleGGChannel& ch, double irradiance, double rel_tol = 1e-8);

double cdf(const DoubleGGChannel& ch, double irradiance, double rel_tol = 1e-8);

/// Draws one GG factor: (omega/m * G)^(1/gamma), G ~ Gamma(m, 1).
class GGSampler {
 public:
  explicit GGSampler(const GGParams& p)
      : shape_(p.m, 1.0), log_scale_(std::log(p.omega / p.m)), inv_gamma_(1.0 / p.gamma) {}

  template <class Urbg>
  double operator()(Urbg& g) {
    return std::exp((log_scale_ + std::log(shape_(g))) * inv_gamma_);
  }

 private:
  std::gamma_distribution<double> shape_;
  double log_scale_;
  double inv_gamma_;
};

class ChannelSampler {
 public:
  explicit ChannelSampler(const DoubleGGChannel& ch) : x_(ch.large_scale), y_(ch.small_scale) {}

  template <class Urbg>
  double operator()(Urbg& g) {
    const double ux = x_(g);
    return ux * y_(g);
  }

 private:
  GGSampler x_;
  GGSampler y_;
};

/// n i.i.d. irradiance draws; deterministic for a fixed seed.
std::vector<double> sample(const DoubleGGChannel& ch, std::uint64_t seed, std::size_t n);

enum class SpecialCase { kGammaGamma, kDoubleWeibull, kKChannel };

/// Free parameters of a special case. Parameters the case pins (e.g. gamma
/// for Gamma-Gamma) may be omitted or given at their pinned value.
struct SpecialCaseParams {
  std::optional<double> m1, m2;
  std::optional<double> gamma1, gamma2;
  std::optional<double> omega1, omega2;
};

DoubleGGChannel make_special_case(SpecialCase kind, const SpecialCaseParams& params);

struct Preset {
  std::string name;
  std::string description;
  DoubleGGChannel channel;
};

/// Channels a-d with their published parameter values, p and q included.
const std::vector<Preset>& presets();

/// Throws ValidationError listing the valid names for an unknown preset.
DoubleGGChannel preset(std::string_view name);

}  // namespace dgg
