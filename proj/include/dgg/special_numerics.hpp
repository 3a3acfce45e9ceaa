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
#include <vector>

namespace dgg {

/// A real number held as sign * mantissa * exp(log_scale).
///
/// Meijer G values and their prefactors routinely leave the double range
/// (orders of several hundred gamma factors), so they are combined in log
/// form and only collapsed at the end.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  /// log|value|; -inf for zero.
  double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }
  ScaledValue times_exp(double log_factor) const { return {mantissa, log_scale + log_factor}; }
};

/// Meijer G-function parameters
///
///   G^{m,n}_{p,q}( z | a_1..a_n, a_{n+1}..a_p ; b_1..b_m, b_{m+1}..b_q )
///
/// with a_top = a_1..a_n, a_bottom = a_{n+1}..a_p, b_top = b_1..b_m and
/// b_bottom = b_{m+1}..b_q. The argument z > 0 is stored as log z.
struct MeijerGSpec {
  std::vector<double> a_top;
  std::vector<double> a_bottom;
  std::vector<double> b_top;
  std::vector<double> b_bottom;
  double log_argument = 0.0;

  static MeijerGSpec with_argument(std::vector<double> a_top, std::vector<double> a_bottom,
                                   std::vector<double> b_top, std::vector<double> b_bottom,
                                   double z);
};

struct MeijerGOptions {
  double rel_tol = 1e-8;
  /// Number of step halvings allowed after the initial step.
  int max_refinements = 12;
};

/// Diagnostics of one contour evaluation.
struct MeijerGReport {
  ScaledValue value;
  double contour_abscissa = 0.0;
  double step = 0.0;
  int refinements = 0;
  std::int64_t nodes = 0;
  /// sum |terms| / |sum|; the cancellation the quadrature had to absorb.
  double condition = 1.0;
  bool extended_precision = false;
};

/// Evaluates the Meijer G-function by the Mellin–Barnes integral along the
/// vertical line through the real saddle point of the integrand.
///
/// Requires a vertical line separating the poles of Gamma(b_j - s) (b_top)
/// from those of Gamma(1 - a_j + s) (a_top), and m + n > (p + q) / 2 so that
/// the integrand decays exponentially along it. Throws ValidationError
/// ("malformed spec") otherwise and NumericError ("evaluation failed") when
/// step halving stops converging.
MeijerGReport meijer_g_report(const MeijerGSpec& spec, const MeijerGOptions& opts = {});

ScaledValue meijer_g_scaled(const MeijerGSpec& spec, double rel_tol = 1e-8);

double meijer_g(const MeijerGSpec& spec, double rel_tol = 1e-8);

/// Complementary error function.
double erfc(double x);

/// The sequence x/j, (x+1)/j, ..., (x+j-1)/j.
std::vector<double> delta_seq(int j, double x);

/// Positive rational approximation num/den of a real target.
struct RationalExponent {
  std::int64_t num = 1;
  std::int64_t den = 1;
  double target = 1.0;
  double rel_error = 0.0;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class RationalizePolicy {
  /// Closest fraction with den <= max_den (convergents and semiconvergents).
  kBest,
  /// First continued-fraction convergent whose relative error meets rel_tol.
  kSimplest,
};

/// Throws ValidationError("rationalization failed; ...") when no admissible
/// fraction meets rel_tol.
RationalExponent rationalize(double x, std::int64_t max_den = 25, double rel_tol = 5e-3,
                             RationalizePolicy policy = RationalizePolicy::kBest);

/// Builds a RationalExponent from an explicit fraction, reducing it.
RationalExponent make_rational(std::int64_t num, std::int64_t den, double target);

}  // namespace dgg
