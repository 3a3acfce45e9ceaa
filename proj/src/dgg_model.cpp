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

#include "dgg/dgg_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dgg/errors.hpp"
#include "dgg/rng.hpp"

namespace dgg {

namespace {

void check_shape(double m, double gamma) {
  if (!(m >= 0.5) || !(gamma > 0.0) || !std::isfinite(m) || !std::isfinite(gamma)) {
    throw ValidationError("invalid shape parameters: need m >= 0.5 and gamma > 0");
  }
}

void check_support(double irradiance) {
  if (!(irradiance > 0.0)) throw ValidationError("support violation: irradiance must be > 0");
}

// Shared pieces of the closed-form pdf/cdf: Meijer G parameters and the
// argument y = (I^g2 / W2)^p m1^q m2^p / (p^p q^q W1^q).
struct ClosedForm {
  double p, q;
  std::vector<double> b;
  double log_y;
  double log_common;  // log(p^(m2-1/2) q^(m1-1/2) / (G(m1) G(m2)))
};

ClosedForm closed_form(const DoubleGGChannel& ch, double irradiance) {
  validate(ch);
  check_support(irradiance);
  const GGParams& x = ch.large_scale;
  const GGParams& y = ch.small_scale;
  const double p = static_cast<double>(ch.ratio.num);
  const double q = static_cast<double>(ch.ratio.den);
  ClosedForm f{p, q, delta_seq(static_cast<int>(ch.ratio.den), x.m), 0.0, 0.0};
  const auto tail = delta_seq(static_cast<int>(ch.ratio.num), y.m);
  f.b.insert(f.b.end(), tail.begin(), tail.end());
  f.log_y = p * (y.gamma * std::log(irradiance) - std::log(y.omega)) + q * std::log(x.m) +
            p * std::log(y.m) - p * std::log(p) - q * std::log(q) - q * std::log(x.omega);
  f.log_common = (y.m - 0.5) * std::log(p) + (x.m - 0.5) * std::log(q) - std::lgamma(x.m) -
                 std::lgamma(y.m);
  return f;
}

}  // namespace

void GGParams::validate() const {
  check_shape(m, gamma);
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ValidationError("invalid shape parameters: omega must be > 0");
  }
}

double omega_from_shape(double m, double gamma) {
  check_shape(m, gamma);
  return std::exp(gamma * (std::lgamma(m) - std::lgamma(m + 1.0 / gamma))) * m;
}

double scintillation_variance(double m, double gamma) {
  check_shape(m, gamma);
  return std::exp(std::lgamma(m + 2.0 / gamma) + std::lgamma(m) -
                  2.0 * std::lgamma(m + 1.0 / gamma)) -
         1.0;
}

void validate(const DoubleGGChannel& ch) {
  ch.large_scale.validate();
  ch.small_scale.validate();
  if (ch.ratio.num < 1 || ch.ratio.den < 1) {
    throw ValidationError("invalid channel: exponent pair p, q must be positive integers");
  }
}

DoubleGGChannel make_channel(const GGParams& large, const GGParams& small,
                             const RationalizeOptions& opts) {
  large.validate();
  small.validate();
  return {large, small,
          rationalize(large.gamma / small.gamma, opts.max_den, opts.rel_tol, opts.policy), {}};
}

DoubleGGChannel make_channel(const GGParams& large, const GGParams& small, std::int64_t p,
                             std::int64_t q) {
  large.validate();
  small.validate();
  return {large, small, make_rational(p, q, large.gamma / small.gamma), {}};
}

double pdf(const DoubleGGChannel& ch, double irradiance, double rel_tol) {
  const ClosedForm f = closed_form(ch, irradiance);
  // G^{p+q,0}_{0,p+q}[y | -; D(q; m1), D(p; m2)]
  MeijerGSpec spec{{}, {}, f.b, {}, f.log_y};
  const ScaledValue g = meijer_g_scaled(spec, rel_tol);
  const double log_pre = std::log(ch.small_scale.gamma) + std::log(f.p) + f.log_common -
                         (0.5 * (f.p + f.q) - 1.0) * std::log(2.0 * std::numbers::pi) -
                         std::log(irradiance);
  return g.times_exp(log_pre).value();
}

double cdf(const DoubleGGChannel& ch, double irradiance, double rel_tol) {
  const ClosedForm f = closed_form(ch, irradiance);
  // G^{p+q,1}_{1,p+q+1}[y | 1; D(q; m1), D(p; m2), 0]
  MeijerGSpec spec{{1.0}, {}, f.b, {0.0}, f.log_y};
  const ScaledValue g = meijer_g_scaled(spec, rel_tol);
  const double log_pre =
      f.log_common + (1.0 - 0.5 * (f.p + f.q)) * std::log(2.0 * std::numbers::pi);
  return std::min(1.0, g.times_exp(log_pre).value());
}

std::vector<double> sample(const DoubleGGChannel& ch, std::uint64_t seed, std::size_t n) {
  validate(ch);
  if (n == 0) throw ValidationError("sample count must be >= 1");
  auto rng = make_stream(seed, 0);
  ChannelSampler draw(ch);
  std::vector<double> out(n);
  for (double& v : out) v = draw(rng);
  return out;
}

DoubleGGChannel make_special_case(SpecialCase kind, const SpecialCaseParams& params) {
  auto pinned = [](const std::optional<double>& given, double value, const char* what) {
    if (given && std::abs(*given - value) > 1e-12) {
      std::ostringstream os;
      os << "over-specified special case: " << what << " is fixed at " << value;
      throw ValidationError(os.str());
    }
    return value;
  };
  auto required = [](const std::optional<double>& given, const char* what) {
    if (!given) throw ValidationError(std::string("special case needs ") + what);
    return *given;
  };

  GGParams x, y;
  switch (kind) {
    case SpecialCase::kGammaGamma:
      x = {required(params.m1, "m1"), pinned(params.gamma1, 1.0, "gamma1"),
           pinned(params.omega1, 1.0, "omega1")};
      y = {required(params.m2, "m2"), pinned(params.gamma2, 1.0, "gamma2"),
           pinned(params.omega2, 1.0, "omega2")};
      break;
    case SpecialCase::kDoubleWeibull: {
      const double g1 = required(params.gamma1, "gamma1");
      const double g2 = required(params.gamma2, "gamma2");
      x = {pinned(params.m1, 1.0, "m1"), g1, params.omega1.value_or(omega_from_shape(1.0, g1))};
      y = {pinned(params.m2, 1.0, "m2"), g2, params.omega2.value_or(omega_from_shape(1.0, g2))};
      break;
    }
    case SpecialCase::kKChannel:
      x = {required(params.m1, "m1"), pinned(params.gamma1, 1.0, "gamma1"),
           pinned(params.omega1, 1.0, "omega1")};
      y = {pinned(params.m2, 1.0, "m2"), pinned(params.gamma2, 1.0, "gamma2"),
           pinned(params.omega2, 1.0, "omega2")};
      break;
  }
  RationalizeOptions exact;
  exact.max_den = 1000;
  exact.rel_tol = 1e-9;
  return make_channel(x, y, exact);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    auto make = [](std::string name, std::string description, GGParams x, GGParams y,
                   std::int64_t p, std::int64_t q) {
      DoubleGGChannel ch = make_channel(x, y, p, q);
      ch.name = name;
      return Preset{std::move(name), std::move(description), ch};
    };
    return std::vector<Preset>{
        make("a", "plane wave, moderate irradiance fluctuations", {0.55, 2.1690, 1.5793},
             {2.35, 0.8530, 0.9671}, 28, 11),
        make("b", "plane wave, strong irradiance fluctuations", {0.5, 1.8621, 1.5074},
             {1.8, 0.7638, 0.9280}, 17, 7),
        make("c", "spherical wave, moderate irradiance fluctuations", {2.65, 0.9135, 0.9836},
             {0.85, 1.4385, 1.1745}, 7, 11),
        make("d", "spherical wave, strong irradiance fluctuations", {3.2, 0.4205, 0.8336},
             {2.8, 0.6643, 0.9224}, 7, 11),
    };
  }();
  return table;
}

DoubleGGChannel preset(std::string_view name) {
  std::string valid;
  for (const Preset& p : presets()) {
    if (p.name == name) return p.channel;
    valid += valid.empty() ? p.name : ", " + p.name;
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

}  // namespace dgg
